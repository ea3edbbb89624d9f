//! SPARQL protocol endpoint over an immutable graph.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use tiny_http::{Header, Method, Request, Response, Server};

use super::{evaluate, results, sparql, Graph};

const WORKERS: usize = 4;

pub struct Endpoint {
    server: Arc<Server>,
    addr: SocketAddr,
    workers: Vec<JoinHandle<()>>,
    served: Arc<AtomicU64>,
}

impl Endpoint {
    /// Binds `addr` (port 0 picks a free port) and starts answering queries.
    pub fn serve(graph: Arc<Graph>, addr: &str) -> std::io::Result<Endpoint> {
        let server = Server::http(addr).map_err(std::io::Error::other)?;
        let addr = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| std::io::Error::other("endpoint bound to a non-IP address"))?;
        let server = Arc::new(server);
        let served = Arc::new(AtomicU64::new(0));
        let workers = (0..WORKERS)
            .map(|_| {
                let (server, graph, served) = (server.clone(), graph.clone(), served.clone());
                std::thread::spawn(move || {
                    while let Ok(req) = server.recv() {
                        served.fetch_add(1, Ordering::Relaxed);
                        handle(&graph, req);
                    }
                })
            })
            .collect();
        log::info!("SPARQL endpoint listening on http://{addr}/sparql");
        Ok(Endpoint { server, addr, workers, served })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}/sparql", self.addr)
    }

    /// Requests received so far.
    pub fn requests_served(&self) -> u64 {
        self.served.load(Ordering::Relaxed)
    }

    /// Blocks until the endpoint is shut down from another thread.
    pub fn wait(mut self) {
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        for _ in 0..self.workers.len() {
            self.server.unblock();
        }
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

impl Drop for Endpoint {
    fn drop(&mut self) {
        self.stop();
    }
}

fn header(name: &str, value: &str) -> Header {
    Header::from_bytes(name.as_bytes(), value.as_bytes()).expect("static header")
}

fn query_param(encoded: &str) -> Option<String> {
    url::form_urlencoded::parse(encoded.as_bytes())
        .find(|(k, _)| k == "query")
        .map(|(_, v)| v.into_owned())
}

fn extract_query(req: &mut Request) -> Result<String, String> {
    match req.method() {
        Method::Get => {
            let qs = req.url().split_once('?').map(|(_, q)| q).unwrap_or("");
            query_param(qs).ok_or_else(|| "missing 'query' parameter".to_string())
        }
        Method::Post => {
            let ctype = req
                .headers()
                .iter()
                .find(|h| h.field.equiv("Content-Type"))
                .map(|h| h.value.as_str().to_ascii_lowercase())
                .unwrap_or_default();
            let mut body = String::new();
            req.as_reader().read_to_string(&mut body).map_err(|e| format!("unreadable body: {e}"))?;
            if ctype.starts_with("application/sparql-query") {
                Ok(body)
            } else if ctype.starts_with("application/x-www-form-urlencoded") {
                query_param(&body).ok_or_else(|| "missing 'query' form field".to_string())
            } else {
                Err(format!("unsupported content type {ctype:?}"))
            }
        }
        other => Err(format!("method {other} not allowed")),
    }
}

fn handle(graph: &Graph, mut req: Request) {
    let outcome = extract_query(&mut req).and_then(|text| {
        let q = sparql::parse(&text).map_err(|e| e.to_string())?;
        Ok(results::to_string(&evaluate(graph, &q)))
    });
    let resp = match outcome {
        Ok(body) => Response::from_string(body)
            .with_header(header("Content-Type", "application/sparql-results+json")),
        Err(msg) => {
            log::debug!("rejecting query: {msg}");
            Response::from_string(msg)
                .with_status_code(400)
                .with_header(header("Content-Type", "text/plain; charset=utf-8"))
        }
    };
    let _ = req.respond(resp);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ntriples;
    use crate::model::Iri;
    use crate::graph::Term;

    fn fixture() -> Arc<Graph> {
        Arc::new(
            ntriples::parse(
                "<http://www.wikidata.org/entity/Q7286> <http://www.wikidata.org/prop/direct/P166> <http://www.wikidata.org/entity/Q38104> .\n\
                 <http://www.wikidata.org/entity/Q7286> <http://www.wikidata.org/prop/direct/P166> <http://www.wikidata.org/entity/Q902788> .\n",
            )
            .unwrap(),
        )
    }

    #[test]
    fn get_post_and_errors() {
        let ep = Endpoint::serve(fixture(), "127.0.0.1:0").unwrap();
        let agent = ureq::agent();
        let q = "SELECT ?x WHERE { ?x wdt:P166 wd:Q38104 }";
        let body = agent.get(&ep.url()).query("query", q).call().unwrap().into_string().unwrap();
        let s = results::from_str(&body).unwrap();
        assert_eq!(s.rows, [[Some(Term::Iri(Iri::new("http://www.wikidata.org/entity/Q7286").unwrap()))]]);

        let resp = agent
            .post(&ep.url())
            .set("Content-Type", "application/sparql-query")
            .send_string("SELECT ?y WHERE { ?x wdt:P166 ?y } LIMIT 1")
            .unwrap();
        assert_eq!(resp.content_type(), "application/sparql-results+json");
        assert_eq!(results::from_str(&resp.into_string().unwrap()).unwrap().len(), 1);

        let form = agent.post(&ep.url()).send_form(&[("query", "SELECT ?y WHERE { ?x wdt:P166 ?y }")]).unwrap();
        assert_eq!(results::from_str(&form.into_string().unwrap()).unwrap().len(), 2);

        match agent.get(&ep.url()).query("query", "SELECT * WHERE {}").call() {
            Err(ureq::Error::Status(400, r)) => assert!(r.into_string().unwrap().contains("SELECT * unsupported")),
            other => panic!("expected 400, got {other:?}"),
        }
        assert_eq!(ep.requests_served(), 4);
        ep.shutdown();
    }
}
