use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use lru::LruCache;

use super::{RequestSnapshot, StoreError, StoreOptions};
use crate::graph::{evaluate, results, Graph, SelectQuery, Solutions};

/// Cached pages per handle.
pub const CACHE_CAPACITY: usize = 1024;
const BODY_SNIPPET: usize = 300;

#[derive(Debug, Default)]
pub struct RequestStats {
    requests: AtomicU64,
    nanos: AtomicU64,
}

impl RequestStats {
    pub fn record(&self, elapsed: Duration) {
        self.requests.fetch_add(1, Ordering::Relaxed);
        self.nanos.fetch_add(elapsed.as_nanos() as u64, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> RequestSnapshot {
        RequestSnapshot {
            requests: self.requests.load(Ordering::Relaxed),
            elapsed: Duration::from_nanos(self.nanos.load(Ordering::Relaxed)),
        }
    }
}

/// Something that answers queries in the SPARQL subset.
pub trait QueryExecutor: Send + Sync {
    /// Endpoint URL, or a description of the local graph.
    fn name(&self) -> &str;

    fn execute(&self, q: &SelectQuery) -> Result<Solutions, StoreError>;

    /// Requests answered so far and time spent answering them.
    fn stats(&self) -> RequestSnapshot;
}

/// Evaluates queries over an in-process graph.
pub struct GraphExecutor {
    graph: Arc<Graph>,
    name: String,
    stats: RequestStats,
}

impl GraphExecutor {
    pub fn new(graph: Arc<Graph>) -> Self {
        let name = format!("<graph of {} triples>", graph.len());
        GraphExecutor { graph, name, stats: RequestStats::default() }
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }
}

impl QueryExecutor for GraphExecutor {
    fn name(&self) -> &str {
        &self.name
    }

    fn execute(&self, q: &SelectQuery) -> Result<Solutions, StoreError> {
        let start = Instant::now();
        let out = evaluate(&self.graph, q);
        self.stats.record(start.elapsed());
        Ok(out)
    }

    fn stats(&self) -> RequestSnapshot {
        self.stats.snapshot()
    }
}

/// Sends queries to a SPARQL protocol endpoint. Only the HTTP exchange is
/// timed.
pub struct HttpExecutor {
    url: String,
    agent: ureq::Agent,
    stats: RequestStats,
}

impl HttpExecutor {
    pub fn new(url: &str, timeout: Duration) -> Result<Self, StoreError> {
        url::Url::parse(url).map_err(|e| StoreError::Options(format!("bad endpoint URL {url:?}: {e}")))?;
        // No connection reuse: endpoints that write a response in several
        // small segments stall for a delayed ACK on a kept-alive connection.
        let agent = ureq::AgentBuilder::new().timeout(timeout).max_idle_connections(0).build();
        Ok(HttpExecutor { url: url.to_string(), agent, stats: RequestStats::default() })
    }
}

fn snippet(s: &str) -> String {
    match s.char_indices().nth(BODY_SNIPPET) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.to_string(),
    }
}

impl QueryExecutor for HttpExecutor {
    fn name(&self) -> &str {
        &self.url
    }

    fn execute(&self, q: &SelectQuery) -> Result<Solutions, StoreError> {
        let text = q.to_string();
        log::debug!("POST {}: {}", self.url, text);
        let start = Instant::now();
        let resp = self
            .agent
            .post(&self.url)
            .set("Content-Type", "application/sparql-query")
            .set("Accept", "application/sparql-results+json")
            .send_string(&text);
        let body = match resp {
            Ok(r) => r.into_string().map_err(|e| e.to_string()),
            Err(ureq::Error::Status(status, r)) => {
                self.stats.record(start.elapsed());
                let body = r.into_string().unwrap_or_default();
                return Err(StoreError::Http { endpoint: self.url.clone(), status, body: snippet(&body) });
            }
            Err(ureq::Error::Transport(t)) => Err(t.to_string()),
        };
        self.stats.record(start.elapsed());
        let body = body.map_err(|message| StoreError::Transport { endpoint: self.url.clone(), message })?;
        results::from_str(&body)
            .map_err(|e| StoreError::Results { endpoint: self.url.clone(), message: e.to_string() })
    }

    fn stats(&self) -> RequestSnapshot {
        self.stats.snapshot()
    }
}

/// An executor behind an optional LRU cache keyed by query text.
pub struct QueryRunner {
    exec: Arc<dyn QueryExecutor>,
    cache: Option<Mutex<LruCache<String, Arc<Solutions>>>>,
}

impl QueryRunner {
    pub fn new(exec: Arc<dyn QueryExecutor>, options: &StoreOptions) -> Self {
        let cap = NonZeroUsize::new(CACHE_CAPACITY).expect("non-zero capacity");
        let cache = options.cache_enabled.then(|| Mutex::new(LruCache::new(cap)));
        QueryRunner { exec, cache }
    }

    pub fn executor(&self) -> &Arc<dyn QueryExecutor> {
        &self.exec
    }

    pub fn run(&self, q: &SelectQuery) -> Result<Arc<Solutions>, StoreError> {
        let Some(cache) = &self.cache else {
            return self.exec.execute(q).map(Arc::new);
        };
        let key = q.to_string();
        if let Some(hit) = cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let sols = Arc::new(self.exec.execute(q)?);
        cache.lock().expect("cache lock").put(key, sols.clone());
        Ok(sols)
    }
}
