use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{StatementStream, Store, StoreError, StoreOptions};
use crate::graph::Term;
use crate::model::{
    AnnotationRecord, Descriptor, Entity, FilterPattern, Fingerprint, Iri, Rank, Snak, Statement, TextValue, Value,
};
use crate::sample::Dataset;

/// Statements held natively, answered by scanning in canonical order.
///
/// Snak fingerprints are resolved against the truthy view: an entity has a
/// snak when some non-deprecated statement about it carries a value with the
/// same simple value. This is what a `wdt:` triple pattern sees.
#[derive(Debug, Default)]
pub struct MemoryStore {
    options: StoreOptions,
    records: BTreeMap<Statement, BTreeSet<AnnotationRecord>>,
    truthy: HashSet<(Iri, Iri, Term)>,
    descriptors: BTreeMap<Iri, BTreeMap<String, Descriptor>>,
}

fn keep_min(slot: &mut Option<TextValue>, t: TextValue) {
    match slot {
        Some(old) if *old <= t => {}
        _ => *slot = Some(t),
    }
}

impl MemoryStore {
    pub fn new(
        records: impl IntoIterator<Item = (Statement, AnnotationRecord)>,
        descriptors: impl IntoIterator<Item = (Entity, Descriptor)>,
    ) -> Self {
        let mut store = MemoryStore::default();
        for (s, a) in records {
            store.insert(s, a);
        }
        for (e, d) in descriptors {
            store.describe(&e, d);
        }
        store
    }

    pub fn from_dataset(ds: &Dataset) -> Self {
        MemoryStore::new(
            ds.annotated().map(|(s, a)| (s.clone(), a.clone())),
            ds.descriptors.iter().cloned(),
        )
    }

    pub fn with_options(mut self, options: StoreOptions) -> Self {
        self.options = options;
        self
    }

    pub fn insert(&mut self, stmt: Statement, annotation: AnnotationRecord) {
        if annotation.rank != Rank::Deprecated {
            if let Snak::Value(p, v) = &stmt.snak {
                self.truthy.insert((stmt.subject.iri().clone(), p.iri().clone(), v.simple_value()));
            }
        }
        self.records.entry(stmt).or_default().insert(annotation);
    }

    /// Adds descriptor fields, split by language. Where two labels or two
    /// descriptions compete, the smaller one is kept.
    pub fn describe(&mut self, entity: &Entity, d: Descriptor) {
        let langs = self.descriptors.entry(entity.iri().clone()).or_default();
        if let Some(l) = d.label.clone() {
            keep_min(&mut langs.entry(l.language().to_string()).or_default().label, l);
        }
        if let Some(x) = d.description.clone() {
            keep_min(&mut langs.entry(x.language().to_string()).or_default().description, x);
        }
        for a in d.aliases() {
            langs.entry(a.language().to_string()).or_default().merge(Descriptor::new(None, None, [a.clone()]));
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn has_snak(&self, entity: &Iri, snak: &Snak) -> bool {
        match snak {
            Snak::Value(p, v) => self.truthy.contains(&(entity.clone(), p.iri().clone(), v.simple_value())),
            _ => false,
        }
    }

    fn identifies(&self, fp: &Fingerprint, entity: &Iri) -> bool {
        match fp {
            Fingerprint::Entity(e) => e.iri() == entity,
            Fingerprint::Value(_) => false,
            Fingerprint::Snak(s) => self.has_snak(entity, s),
            Fingerprint::SnakSet(set) => set.iter().all(|s| self.has_snak(entity, s)),
        }
    }

    /// Full match, snak fingerprints included.
    pub fn matches(&self, p: &FilterPattern, stmt: &Statement) -> bool {
        if !p.matches_locally(stmt) {
            return false;
        }
        if let Some(fp @ (Fingerprint::Snak(_) | Fingerprint::SnakSet(_))) = &p.subject {
            if !self.identifies(fp, stmt.subject.iri()) {
                return false;
            }
        }
        if let Some(fp @ (Fingerprint::Snak(_) | Fingerprint::SnakSet(_))) = &p.value {
            match stmt.snak.value() {
                Some(Value::Entity(e)) if self.identifies(fp, e.iri()) => {}
                _ => return false,
            }
        }
        true
    }
}

impl Store for MemoryStore {
    fn options(&self) -> &StoreOptions {
        &self.options
    }

    fn backend(&self) -> &'static str {
        "memory"
    }

    fn filter(&self, pattern: &FilterPattern, limit: Option<usize>) -> Result<StatementStream, StoreError> {
        pattern.validate()?;
        let hits: Vec<Statement> = self
            .records
            .keys()
            .filter(|s| self.matches(pattern, s))
            .take(limit.unwrap_or(usize::MAX))
            .cloned()
            .collect();
        Ok(Box::new(hits.into_iter().map(Ok)))
    }

    fn contains(&self, stmt: &Statement) -> Result<bool, StoreError> {
        Ok(self.records.contains_key(stmt))
    }

    fn get_annotations(&self, stmts: &[Statement]) -> Result<Vec<(Statement, BTreeSet<AnnotationRecord>)>, StoreError> {
        Ok(stmts
            .iter()
            .map(|s| {
                let recs = self.records.get(s).cloned().unwrap_or_default();
                (s.clone(), self.options.tag(recs))
            })
            .collect())
    }

    fn get_descriptor(&self, entities: &[Entity], language: &str) -> Result<Vec<(Entity, Descriptor)>, StoreError> {
        let language = language.to_lowercase();
        Ok(entities
            .iter()
            .map(|e| {
                let d = self.descriptors.get(e.iri()).and_then(|m| m.get(&language)).cloned().unwrap_or_default();
                (e.clone(), d)
            })
            .collect())
    }
}
