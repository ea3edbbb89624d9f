use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use super::executor::{GraphExecutor, HttpExecutor, QueryExecutor, QueryRunner};
use super::{PagedStream, RequestSnapshot, StatementStream, Store, StoreError, StoreOptions};
use crate::codec::compile::{compile_annotations, compile_filter, describe_query, descriptor_query, Level};
use crate::codec::{decode, Ns};
use crate::graph::{Graph, Term, Triple};
use crate::model::{AnnotationRecord, Descriptor, Entity, FilterPattern, Fingerprint, Iri, Statement};

/// Nodes per describe query.
const DESCRIBE_CHUNK: usize = 200;

/// A store over data in the Wikidata RDF dialect, reached through a query
/// executor: an embedded graph ([`RdfStore`]) or an endpoint
/// ([`SparqlStore`]).
#[derive(Clone)]
pub struct WikidataStore {
    inner: Arc<Inner>,
}

pub type RdfStore = WikidataStore;
pub type SparqlStore = WikidataStore;

struct Inner {
    runner: QueryRunner,
    options: StoreOptions,
    backend: &'static str,
}

impl WikidataStore {
    pub fn with_executor(
        exec: Arc<dyn QueryExecutor>,
        backend: &'static str,
        options: StoreOptions,
    ) -> Result<Self, StoreError> {
        options.validate()?;
        let runner = QueryRunner::new(exec, &options);
        Ok(WikidataStore { inner: Arc::new(Inner { runner, options, backend }) })
    }

    /// A store over an embedded graph.
    pub fn rdf(graph: Arc<Graph>, options: StoreOptions) -> Result<Self, StoreError> {
        Self::with_executor(Arc::new(GraphExecutor::new(graph)), "rdf", options)
    }

    /// A store over a SPARQL endpoint.
    pub fn sparql(url: &str, options: StoreOptions) -> Result<Self, StoreError> {
        let exec = HttpExecutor::new(url, options.request_timeout)?;
        Self::with_executor(Arc::new(exec), "sparql", options)
    }

    pub fn endpoint(&self) -> &str {
        self.inner.runner.executor().name()
    }
}

fn iri_at(row: &[Option<Term>], col: Option<usize>) -> Option<&Iri> {
    col.and_then(|c| row[c].as_ref()).and_then(Term::as_iri)
}

fn is_node(iri: &Iri) -> bool {
    matches!(Ns::split(iri.as_str()), Some((Ns::Wds | Ns::Wdv | Ns::Wdref, _)))
}

impl Inner {
    /// Adds every triple about `nodes`, following links to value and
    /// reference nodes.
    fn describe(&self, nodes: Vec<Iri>, g: &mut Graph) -> Result<(), StoreError> {
        let mut seen: HashSet<Iri> = nodes.iter().cloned().collect();
        let mut frontier = nodes;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for chunk in frontier.chunks(DESCRIBE_CHUNK) {
                let sols = self.runner.run(&describe_query(chunk))?;
                let (n, p, o) = (sols.column("n"), sols.column("pp"), sols.column("o"));
                for row in &sols.rows {
                    let (Some(s), Some(pred), Some(obj)) =
                        (iri_at(row, n), iri_at(row, p), o.and_then(|c| row[c].clone()))
                    else {
                        continue;
                    };
                    if let Term::Iri(i) = &obj {
                        if is_node(i) && seen.insert(i.clone()) {
                            next.push(i.clone());
                        }
                    }
                    g.insert(Triple::new(s.clone(), pred.clone(), obj));
                }
            }
            frontier = next;
        }
        Ok(())
    }

    /// One page of candidates, decoded into matching statements.
    fn page(&self, pattern: &FilterPattern, offset: usize) -> Result<(Vec<Statement>, bool), StoreError> {
        let size = self.options.page_size;
        let q = compile_filter(pattern, Level::Full, Some(size), Some(offset))?;
        let sols = self.runner.run(&q)?;
        let exhausted = sols.len() < size;
        let (cs, cp, cst, cv) = (sols.column("s"), sols.column("p"), sols.column("st"), sols.column("v"));
        let fixed_subject = match &pattern.subject {
            Some(Fingerprint::Entity(e)) => Some(e.iri().clone()),
            _ => None,
        };
        let fixed_link = pattern.property_constant().and_then(|p| Ns::Wd.local(p.iri())).map(|l| Ns::P.iri(l));
        let mut g = Graph::new();
        let mut nodes = Vec::new();
        let mut values: HashMap<Iri, HashSet<Term>> = HashMap::new();
        for row in &sols.rows {
            let subject = iri_at(row, cs).or(fixed_subject.as_ref());
            let link = iri_at(row, cp).or(fixed_link.as_ref());
            let (Some(s), Some(l), Some(st)) = (subject, link, iri_at(row, cst)) else { continue };
            if g.insert(Triple::new(s.clone(), l.clone(), st.clone())) {
                nodes.push(st.clone());
            }
            if let Some(v) = cv.and_then(|c| row[c].clone()) {
                values.entry(st.clone()).or_default().insert(v);
            }
        }
        nodes.sort();
        nodes.dedup();
        self.describe(nodes, &mut g)?;
        let decoded = decode(&g);
        for d in &decoded.diagnostics {
            log::warn!("{}: {d}", self.runner.executor().name());
        }
        let value_is_snak_fp = matches!(pattern.value, Some(Fingerprint::Snak(_) | Fingerprint::SnakSet(_)));
        let mut out = Vec::new();
        for d in decoded.statements {
            let Some(node) = &d.node else { continue };
            let stmt = d.encoded.statement;
            if !pattern.matches_locally(&stmt) {
                continue;
            }
            if value_is_snak_fp {
                let main = stmt.snak.value().map(|v| v.simple_value());
                if !main.is_some_and(|m| values.get(node).is_some_and(|vs| vs.contains(&m))) {
                    continue;
                }
            }
            out.push(stmt);
        }
        Ok((out, exhausted))
    }
}

impl Store for WikidataStore {
    fn options(&self) -> &StoreOptions {
        &self.inner.options
    }

    fn backend(&self) -> &'static str {
        self.inner.backend
    }

    /// Pages through candidate statement nodes with LIMIT/OFFSET; the next
    /// page is requested only when the consumer gets that far.
    fn filter(&self, pattern: &FilterPattern, limit: Option<usize>) -> Result<StatementStream, StoreError> {
        pattern.validate()?;
        compile_filter(pattern, Level::Full, None, None)?;
        let (inner, pattern) = (self.inner.clone(), pattern.clone());
        let size = inner.options.page_size;
        Ok(Box::new(PagedStream::new(size, limit, move |offset| inner.page(&pattern, offset))))
    }

    fn get_annotations(&self, stmts: &[Statement]) -> Result<Vec<(Statement, BTreeSet<AnnotationRecord>)>, StoreError> {
        let inner = &self.inner;
        let mut g = Graph::new();
        let mut nodes = Vec::new();
        for (stmt, q) in stmts.iter().zip(compile_annotations(stmts)?) {
            let local = Ns::Wd.local(stmt.snak.property().iri()).expect("compiled property");
            let sols = inner.runner.run(&q)?;
            let col = sols.column("st");
            for row in &sols.rows {
                if let Some(st) = iri_at(row, col) {
                    g.insert(Triple::new(stmt.subject.iri().clone(), Ns::P.iri(local), st.clone()));
                    nodes.push(st.clone());
                }
            }
        }
        nodes.sort();
        nodes.dedup();
        inner.describe(nodes, &mut g)?;
        let mut found: BTreeMap<Statement, BTreeSet<AnnotationRecord>> = BTreeMap::new();
        for d in decode(&g).statements {
            found.entry(d.encoded.statement).or_default().insert(d.encoded.annotation);
        }
        Ok(stmts
            .iter()
            .map(|s| (s.clone(), inner.options.tag(found.get(s).cloned().unwrap_or_default())))
            .collect())
    }

    fn get_descriptor(&self, entities: &[Entity], language: &str) -> Result<Vec<(Entity, Descriptor)>, StoreError> {
        let language = language.to_lowercase();
        let mut g = Graph::new();
        for chunk in entities.chunks(DESCRIBE_CHUNK) {
            let sols = self.inner.runner.run(&descriptor_query(chunk))?;
            let (e, p, o) = (sols.column("e"), sols.column("pp"), sols.column("o"));
            for row in &sols.rows {
                if let (Some(s), Some(pred), Some(obj)) = (iri_at(row, e), iri_at(row, p), o.and_then(|c| row[c].clone())) {
                    g.insert(Triple::new(s.clone(), pred.clone(), obj));
                }
            }
        }
        let by_iri: HashMap<Iri, BTreeMap<String, Descriptor>> =
            decode(&g).descriptors.into_iter().map(|(e, d)| (e.iri().clone(), d)).collect();
        Ok(entities
            .iter()
            .map(|e| {
                let d = by_iri.get(e.iri()).and_then(|m| m.get(&language)).cloned().unwrap_or_default();
                (e.clone(), d)
            })
            .collect())
    }

    fn request_stats(&self) -> RequestSnapshot {
        self.inner.runner.executor().stats()
    }
}
