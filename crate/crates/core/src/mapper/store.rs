use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{translate_pattern, translate_results, MappingSpec, Translation};
use crate::graph::{Graph, PatternTerm, SelectQuery, Term, TriplePattern, ValuesBlock};
use crate::model::{AnnotationRecord, Descriptor, Entity, FilterPattern, Iri, Statement, TextValue};
use crate::store::{
    GraphExecutor, HttpExecutor, PagedStream, QueryExecutor, QueryRunner, RequestSnapshot, StatementStream, Store,
    StoreError, StoreOptions,
};

/// Entities per label query.
const LABEL_CHUNK: usize = 200;

/// A Wikidata-shaped view of a source reached through a query executor.
#[derive(Clone)]
pub struct MapperStore {
    inner: Arc<Inner>,
}

struct Inner {
    spec: MappingSpec,
    runner: QueryRunner,
    options: StoreOptions,
}

impl MapperStore {
    pub fn new(exec: Arc<dyn QueryExecutor>, spec: MappingSpec, options: StoreOptions) -> Result<Self, StoreError> {
        options.validate()?;
        let runner = QueryRunner::new(exec, &options);
        Ok(MapperStore { inner: Arc::new(Inner { spec, runner, options }) })
    }

    pub fn rdf(graph: Arc<Graph>, spec: MappingSpec, options: StoreOptions) -> Result<Self, StoreError> {
        Self::new(Arc::new(GraphExecutor::new(graph)), spec, options)
    }

    pub fn sparql(url: &str, spec: MappingSpec, options: StoreOptions) -> Result<Self, StoreError> {
        let exec = HttpExecutor::new(url, options.request_timeout)?;
        Self::new(Arc::new(exec), spec, options)
    }

    pub fn spec(&self) -> &MappingSpec {
        &self.inner.spec
    }
}

impl Inner {
    fn page(&self, pattern: &FilterPattern, q: &SelectQuery, offset: usize) -> Result<(Vec<Statement>, bool), StoreError> {
        let size = self.options.page_size;
        let mut q = q.clone();
        q.limit = Some(size);
        q.offset = (offset > 0).then_some(offset);
        let sols = self.runner.run(&q)?;
        let (stmts, diagnostics) = translate_results(&self.spec, &sols);
        for d in diagnostics {
            log::warn!("mapper {}: {d}", self.spec.name);
        }
        Ok((stmts.into_iter().filter(|s| pattern.matches_locally(s)).collect(), sols.len() < size))
    }
}

impl Store for MapperStore {
    fn options(&self) -> &StoreOptions {
        &self.inner.options
    }

    fn backend(&self) -> &'static str {
        "mapper"
    }

    fn filter(&self, pattern: &FilterPattern, limit: Option<usize>) -> Result<StatementStream, StoreError> {
        pattern.validate()?;
        let q = match translate_pattern(&self.inner.spec, pattern, None, None) {
            Translation::Query(q) => q,
            Translation::Unsupported(reason) => {
                log::info!("mapper {}: {reason}; no results", self.inner.spec.name);
                return Ok(Box::new(std::iter::empty()));
            }
        };
        let (inner, pattern) = (self.inner.clone(), pattern.clone());
        let size = inner.options.page_size;
        Ok(Box::new(PagedStream::new(size, limit, move |offset| inner.page(&pattern, &q, offset))))
    }

    /// Sources carry no qualifiers or references, so a present statement
    /// gets one normal-rank record holding only the extra references.
    fn get_annotations(&self, stmts: &[Statement]) -> Result<Vec<(Statement, BTreeSet<AnnotationRecord>)>, StoreError> {
        stmts
            .iter()
            .map(|s| {
                let recs = if self.contains(s)? { [AnnotationRecord::default()].into() } else { BTreeSet::new() };
                Ok((s.clone(), self.inner.options.tag(recs)))
            })
            .collect()
    }

    /// Labels only, and only when the spec names a label predicate.
    fn get_descriptor(&self, entities: &[Entity], language: &str) -> Result<Vec<(Entity, Descriptor)>, StoreError> {
        let spec = &self.inner.spec;
        let language = language.to_lowercase();
        let mut labels: HashMap<Iri, TextValue> = HashMap::new();
        if let Some(pred) = &spec.label_predicate {
            let sources: Vec<Iri> = entities.iter().filter_map(|e| spec.to_source(e)).collect();
            for chunk in sources.chunks(LABEL_CHUNK) {
                let mut q = SelectQuery::new(
                    &["e", "o"],
                    vec![TriplePattern::new(PatternTerm::var("e"), pred.clone(), PatternTerm::var("o"))],
                );
                q.distinct = true;
                q.values = Some(ValuesBlock {
                    vars: vec!["e".into()],
                    rows: chunk.iter().map(|i| vec![Some(Term::Iri(i.clone()))]).collect(),
                });
                let sols = self.inner.runner.run(&q)?;
                let (ce, co) = (sols.column("e"), sols.column("o"));
                for row in &sols.rows {
                    let cell = |c: Option<usize>| c.and_then(|i| row[i].as_ref());
                    let (Some(Term::Iri(e)), Some(Term::Literal(l))) = (cell(ce), cell(co)) else { continue };
                    if l.language() != Some(language.as_str()) {
                        continue;
                    }
                    let Ok(t) = TextValue::new(l.lexical(), &language) else { continue };
                    match labels.get(e) {
                        Some(old) if *old <= t => {}
                        _ => {
                            labels.insert(e.clone(), t);
                        }
                    }
                }
            }
        }
        Ok(entities
            .iter()
            .map(|e| {
                let label = spec.to_source(e).and_then(|s| labels.get(&s).cloned());
                (e.clone(), Descriptor::new(label, None, []))
            })
            .collect())
    }

    fn request_stats(&self) -> RequestSnapshot {
        self.inner.runner.executor().stats()
    }
}
