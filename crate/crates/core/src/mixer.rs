//! The virtual union of child stores.
//!
//! Results come in child order, each child's own order preserved, with
//! duplicates dropped at their later occurrences. With `parallel` set the
//! children are queried concurrently but the merged stream is the same as
//! the sequential one. A failing child either ends the stream with an error
//! naming its index (the default) or, when lenient, is skipped with a
//! warning.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::model::{AnnotationRecord, Descriptor, Entity, FilterPattern, Statement};
use crate::store::{RequestSnapshot, StatementStream, Store, StoreError, StoreHandle, StoreOptions};

pub struct MixerStore {
    children: Vec<StoreHandle>,
    parallel: bool,
    lenient: bool,
    options: StoreOptions,
}

impl MixerStore {
    pub fn new(children: Vec<StoreHandle>) -> Result<Self, StoreError> {
        if children.is_empty() {
            return Err(StoreError::Options("a mixer needs at least one child store".into()));
        }
        Ok(MixerStore { children, parallel: false, lenient: false, options: StoreOptions::default() })
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    /// Skip failing children instead of failing the whole call.
    pub fn with_lenient(mut self, lenient: bool) -> Self {
        self.lenient = lenient;
        self
    }

    /// Extra references given here are added on top of the children's own.
    pub fn with_options(mut self, options: StoreOptions) -> Self {
        self.options = options;
        self
    }

    pub fn children(&self) -> &[StoreHandle] {
        &self.children
    }

    /// `f` applied to every child, in child order, concurrently when
    /// `parallel` is set.
    fn each<T: Send>(&self, f: impl Fn(&dyn Store) -> T + Sync) -> Vec<T> {
        if !self.parallel || self.children.len() == 1 {
            return self.children.iter().map(|c| f(c.as_ref())).collect();
        }
        std::thread::scope(|scope| {
            let f = &f;
            let handles: Vec<_> =
                self.children.iter().map(|c| scope.spawn(move || f(c.as_ref()))).collect();
            handles.into_iter().map(|h| h.join().expect("child store panicked")).collect()
        })
    }

    /// Keeps successful answers; a failure becomes a `Child` error, or is
    /// logged and dropped when lenient.
    fn settle<T>(&self, answers: Vec<Result<T, StoreError>>) -> Result<Vec<(usize, T)>, StoreError> {
        let mut out = Vec::new();
        for (index, a) in answers.into_iter().enumerate() {
            match a {
                Ok(x) => out.push((index, x)),
                Err(e) if self.lenient => log::warn!("child store {index} skipped: {e}"),
                Err(e) => return Err(StoreError::Child { index, source: Box::new(e) }),
            }
        }
        Ok(out)
    }
}

/// Where a child's statements come from: the child itself, asked when the
/// merge reaches it, or results already drained from it.
enum Source {
    Lazy(StoreHandle),
    Ready(Option<Result<StatementStream, StoreError>>),
}

/// Pulls from child streams in order, opening each only when reached.
struct Merge {
    sources: Vec<Source>,
    pattern: FilterPattern,
    child_limit: Option<usize>,
    lenient: bool,
    index: usize,
    current: Option<StatementStream>,
    seen: HashSet<Statement>,
    remaining: usize,
}

impl Merge {
    fn open(&mut self, index: usize) -> Result<StatementStream, StoreError> {
        match &mut self.sources[index] {
            Source::Lazy(child) => child.filter(&self.pattern, self.child_limit),
            Source::Ready(ready) => ready.take().expect("each source is opened once"),
        }
    }
}

impl Iterator for Merge {
    type Item = Result<Statement, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        while self.remaining > 0 && self.index < self.sources.len() {
            let index = self.index;
            let failure = match &mut self.current {
                None => match self.open(index) {
                    Ok(s) => {
                        self.current = Some(s);
                        continue;
                    }
                    Err(e) => e,
                },
                Some(stream) => match stream.next() {
                    Some(Ok(s)) => {
                        if self.seen.insert(s.clone()) {
                            self.remaining -= 1;
                            return Some(Ok(s));
                        }
                        continue;
                    }
                    Some(Err(e)) => e,
                    None => {
                        self.current = None;
                        self.index += 1;
                        continue;
                    }
                },
            };
            self.current = None;
            self.index += 1;
            if self.lenient {
                log::warn!("child store {index} skipped: {failure}");
            } else {
                self.remaining = 0;
                return Some(Err(StoreError::Child { index, source: Box::new(failure) }));
            }
        }
        None
    }
}

impl Store for MixerStore {
    fn options(&self) -> &StoreOptions {
        &self.options
    }

    fn backend(&self) -> &'static str {
        "mixer"
    }

    /// Each child contributes at most `limit` statements, which is all the
    /// merged prefix can need from it.
    fn filter(&self, pattern: &FilterPattern, limit: Option<usize>) -> Result<StatementStream, StoreError> {
        pattern.validate()?;
        let merge = Merge {
            sources: self.children.iter().cloned().map(Source::Lazy).collect(),
            pattern: pattern.clone(),
            child_limit: limit,
            lenient: self.lenient,
            index: 0,
            current: None,
            seen: HashSet::new(),
            remaining: limit.unwrap_or(usize::MAX),
        };
        if !self.parallel || self.children.len() == 1 {
            return Ok(Box::new(merge));
        }
        // Drain every child concurrently, then feed the results through the
        // same merge so order and error handling match the sequential case.
        let drained = self.each(|c| -> Result<StatementStream, StoreError> {
            let mut items = Vec::new();
            for item in c.filter(pattern, limit)? {
                let stop = item.is_err();
                items.push(item);
                if stop {
                    break;
                }
            }
            Ok(Box::new(items.into_iter()))
        });
        let sources = drained.into_iter().map(|r| Source::Ready(Some(r))).collect();
        Ok(Box::new(Merge { sources, ..merge }))
    }

    /// True at the first child, by child order, that holds `stmt`. Errors of
    /// later children do not matter, in parallel mode too.
    fn contains(&self, stmt: &Statement) -> Result<bool, StoreError> {
        let mut prefetched = self.parallel.then(|| self.each(|c| c.contains(stmt)).into_iter());
        for (index, c) in self.children.iter().enumerate() {
            let answer = match &mut prefetched {
                Some(answers) => answers.next().expect("one answer per child"),
                None => c.contains(stmt),
            };
            match answer {
                Ok(true) => return Ok(true),
                Ok(false) => {}
                Err(e) if self.lenient => log::warn!("child store {index} skipped: {e}"),
                Err(e) => return Err(StoreError::Child { index, source: Box::new(e) }),
            }
        }
        Ok(false)
    }

    /// Per-statement union of the children's records.
    fn get_annotations(&self, stmts: &[Statement]) -> Result<Vec<(Statement, BTreeSet<AnnotationRecord>)>, StoreError> {
        let answers = self.settle(self.each(|c| c.get_annotations(stmts)))?;
        let mut union: Vec<BTreeSet<AnnotationRecord>> = vec![BTreeSet::new(); stmts.len()];
        for (_, answer) in answers {
            let by_stmt: BTreeMap<Statement, BTreeSet<AnnotationRecord>> = answer.into_iter().collect();
            for (slot, s) in union.iter_mut().zip(stmts) {
                if let Some(recs) = by_stmt.get(s) {
                    slot.extend(recs.iter().cloned());
                }
            }
        }
        Ok(stmts.iter().cloned().zip(union.into_iter().map(|u| self.options.tag(u))).collect())
    }

    /// The first non-empty descriptor by child order. Children are asked
    /// only about entities still undescribed; in parallel mode all are asked
    /// about everything up front and the answers are read the same way.
    fn get_descriptor(&self, entities: &[Entity], language: &str) -> Result<Vec<(Entity, Descriptor)>, StoreError> {
        let mut out: Vec<(Entity, Descriptor)> = entities.iter().map(|e| (e.clone(), Descriptor::default())).collect();
        let mut prefetched = if self.parallel {
            self.each(|c| c.get_descriptor(entities, language)).into_iter().map(Some).collect()
        } else {
            Vec::new()
        };
        for (index, c) in self.children.iter().enumerate() {
            let missing: Vec<usize> = (0..out.len()).filter(|i| out[*i].1.is_empty()).collect();
            if missing.is_empty() {
                break;
            }
            let answer = match prefetched.get_mut(index).and_then(Option::take) {
                Some(all) => all.map(|all| missing.iter().map(|i| all[*i].clone()).collect::<Vec<_>>()),
                None => {
                    let ask: Vec<Entity> = missing.iter().map(|i| out[*i].0.clone()).collect();
                    c.get_descriptor(&ask, language)
                }
            };
            match answer {
                Ok(answer) => {
                    for (i, (_, d)) in missing.into_iter().zip(answer) {
                        out[i].1 = d;
                    }
                }
                Err(e) if self.lenient => log::warn!("child store {index} skipped: {e}"),
                Err(e) => return Err(StoreError::Child { index, source: Box::new(e) }),
            }
        }
        Ok(out)
    }

    fn request_stats(&self) -> RequestSnapshot {
        self.children.iter().map(|c| c.request_stats()).fold(RequestSnapshot::default(), |a, b| a + b)
    }
}
