use std::collections::BTreeSet;
use std::io::{BufRead, BufReader};
use std::process::{Child, Command, Output, Stdio};
use std::sync::Arc;

use kif_core::codec::decode;
use kif_core::graph::ntriples;
use kif_core::model::{wd, FilterPattern, Statement};
use kif_core::sample::Dataset;
use kif_core::sexpr::{self, Object};
use kif_core::store::{collect, RdfStore, Store, StoreOptions};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn kif(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kif")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn statements(text: &str) -> Vec<Statement> {
    sexpr::parse_many(text)
        .unwrap()
        .into_iter()
        .map(|o| match o {
            Object::Statement(s) => s,
            other => panic!("not a statement: {other:?}"),
        })
        .collect()
}

struct Served(Child, String);

impl Served {
    fn start(graph: &str) -> Served {
        let mut child = Command::new(env!("CARGO_BIN_EXE_kif"))
            .args(["serve", "--graph", graph, "--port", "0"])
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
        let url = line.trim().strip_prefix("listening on ").unwrap().to_string();
        Served(child, url)
    }
}

impl Drop for Served {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn solubility_filter_reparses_to_api_result() {
    let rdf = format!("rdf:{}", fixture("wd.nt"));
    let out = kif(&["filter", "--store", &rdf, "--subject", "wd:Q2270", "--property", "wd:P2177", "--limit", "10"]);
    assert!(out.status.success());
    let got = statements(&stdout(&out));
    let graph = ntriples::parse(&std::fs::read_to_string(fixture("wd.nt")).unwrap()).unwrap();
    let store = RdfStore::rdf(Arc::new(graph), StoreOptions::default()).unwrap();
    let p = FilterPattern::any().with_subject(wd::item("Q2270")).with_property(wd::property("P2177"));
    assert_eq!(got, collect(store.filter(&p, Some(10)).unwrap()).unwrap());
    assert_eq!(got.len(), 1);
}

#[test]
fn no_store_is_a_usage_error() {
    let out = kif(&["filter", "--subject", "wd:Q2270"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--store"));
}

#[test]
fn bad_arguments_exit_2_with_positions() {
    let rdf = format!("rdf:{}", fixture("wd.nt"));
    let out = kif(&["filter", "--store", &rdf, "--value", "(Quantity 1 wd:Q1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:1"));
    assert_eq!(kif(&["filter", "--store", "ftp:x"]).status.code(), Some(2));
    let out = kif(&["decode-sparql", "SELECT ?s WHERE {\n ?s p:P31 ?o }"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:2"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unreachable_endpoint_exits_3() {
    let out = kif(&["count", "--store", "sparql:http://127.0.0.1:9/sparql", "--timeout", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mixed_stores_in_flag_order() {
    let mapper = format!("mapper:{}@rdf:{}", fixture("pubchem-mapping.json"), fixture("pubchem.nt"));
    let rdf = format!("rdf:{}", fixture("wd.nt"));
    let snak = r#"(ValueSnak wd:P234 (String "InChI=1S/C6H6/c1-2-4-6-5-3-1/h1-6H"))"#;
    for extra in [None, Some("--parallel")] {
        let mut args = vec!["filter", "--store", &mapper, "--store", &rdf, "--subject-snak", snak, "--property", "wd:P2067"];
        args.extend(extra);
        let out = kif(&args);
        assert!(out.status.success());
        let got = statements(&stdout(&out));
        let subjects: Vec<_> = got.iter().map(|s| s.subject.iri().as_str().to_string()).collect();
        assert_eq!(
            subjects,
            ["http://www.wikidata.org/entity/Q_PUBCHEM_CID241", "http://www.wikidata.org/entity/Q2270"]
        );
    }
}

#[test]
fn served_graph_answers_like_the_file() {
    let served = Served::start(&fixture("wd.nt"));
    let sparql = format!("sparql:{}", served.1);
    let rdf = format!("rdf:{}", fixture("wd.nt"));
    for args in [vec![], vec!["--subject", "wd:Q7286"], vec!["--value", "wd:Q5"], vec!["--property", "wd:P2067"]] {
        let run = |store: &str| {
            let mut a = vec!["filter", "--store", store, "--annotations"];
            a.extend(args.iter().copied());
            let out = kif(&a);
            assert!(out.status.success());
            stdout(&out).lines().map(str::to_string).collect::<BTreeSet<_>>()
        };
        assert_eq!(run(&sparql), run(&rdf), "{args:?}");
    }
    let count = kif(&["count", "--store", &sparql]);
    assert_eq!(stdout(&count).trim(), "7");
}

#[test]
fn decode_sparql_prints_the_pattern() {
    let out = kif(&["decode-sparql", "SELECT ?v WHERE { wd:Q2270 wdt:P2177 ?v } LIMIT 10"]);
    assert!(out.status.success());
    let p: FilterPattern = sexpr::parse_as(stdout(&out).trim()).unwrap();
    assert_eq!(p, FilterPattern::any().with_subject(wd::item("Q2270")).with_property(wd::property("P2177")));
}

#[test]
fn describe_marie_curie() {
    let memory = format!("memory:{}", fixture("wikidata.sexp"));
    let out = kif(&["describe", "--store", &memory, "--entity", "wd:Q7286"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"Marie Curie\""));
    let fr = kif(&["describe", "--store", &memory, "--entity", "wd:Q7286", "--language", "fr"]);
    assert!(stdout(&fr).contains("physicienne"));
}

#[test]
fn contains_and_annotations() {
    let memory = format!("memory:{}", fixture("wikidata.sexp"));
    let yes = "(Statement wd:Q7286 (ValueSnak wd:P31 wd:Q5))";
    let no = "(Statement wd:Q7286 (ValueSnak wd:P31 wd:Q6))";
    let out = kif(&["contains", "--store", &memory, "--statement", yes, "--statement", no]);
    assert_eq!(stdout(&out), "true\nfalse\n");
    let out = kif(&["annotations", "--store", &memory, "--statement", yes]);
    match sexpr::parse(stdout(&out).trim()).unwrap() {
        Object::AnnotatedStatement(_, recs) => assert_eq!(recs.len(), 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn json_and_ntriples_formats() {
    let memory = format!("memory:{}", fixture("wikidata.sexp"));
    let out = kif(&["filter", "--store", &memory, "--subject", "wd:Q2270", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 4);

    let out = kif(&["filter", "--store", &memory, "--subject", "wd:Q7286", "--format", "ntriples"]);
    let graph = ntriples::parse(&stdout(&out)).unwrap();
    let decoded = decode(&graph);
    assert!(decoded.diagnostics.is_empty());
    let ds = Dataset::from_sexp(&std::fs::read_to_string(fixture("wikidata.sexp")).unwrap()).unwrap();
    let want: BTreeSet<_> =
        ds.annotated().filter(|(s, _)| s.subject == wd::item("Q7286").into()).map(|(s, a)| (s.clone(), a.clone())).collect();
    let got: BTreeSet<_> = decoded.encoded().map(|e| (e.statement.clone(), e.annotation.clone())).collect();
    assert_eq!(got, want);
}

#[test]
fn load_reproduces_the_checked_in_graph() {
    let out = kif(&["load", "--fixture", &fixture("wikidata.sexp")]);
    assert!(out.status.success());
    let got = ntriples::parse(&stdout(&out)).unwrap();
    let want = ntriples::parse(&std::fs::read_to_string(fixture("wd.nt")).unwrap()).unwrap();
    assert_eq!(got, want);
}

#[test]
fn query_answers_sparql() {
    let memory = format!("memory:{}", fixture("wikidata.sexp"));
    let out = kif(&["query", "--store", &memory, "SELECT ?s WHERE { ?s wdt:P31 wd:Q5 }"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["bindings"][0]["s"]["value"], "http://www.wikidata.org/entity/Q7286");
}

#[test]
fn memory_bench_overhead_is_one() {
    let memory = format!("memory:{}", fixture("wikidata.sexp"));
    let out = kif(&["bench", "--store", &memory, "--queries", &fixture("bench_queries.txt"), "--runs", "2"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<(String, f64, f64, f64)> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 53);
    assert!(rows.iter().all(|r| r.3 == 1.0));
}
