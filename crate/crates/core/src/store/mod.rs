//! The store interface and its backends.
//!
//! Every backend answers the same five operations. [`MemoryStore`] scans
//! native statements and serves as the reference; [`WikidataStore`] runs
//! generated SPARQL against either an embedded [`Graph`](crate::graph::Graph)
//! or a remote endpoint and decodes the answers.

mod executor;
mod memory;
mod wikidata;

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::ops::Add;
use std::sync::Arc;
use std::time::Duration;

pub use executor::{GraphExecutor, HttpExecutor, QueryExecutor, QueryRunner, RequestStats};
pub use memory::MemoryStore;
pub use wikidata::{RdfStore, SparqlStore, WikidataStore};

use crate::codec::CodecError;
use crate::model::{AnnotationRecord, Descriptor, Entity, FilterPattern, PatternError, ReferenceRecord, Statement};

pub const DEFAULT_PAGE_SIZE: usize = 100;
pub const PAGE_SIZE_ENV: &str = "KIF_PAGE_SIZE";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("cannot reach {endpoint}: {message}")]
    Transport { endpoint: String, message: String },
    #[error("{endpoint} answered HTTP {status}: {body}")]
    Http { endpoint: String, status: u16, body: String },
    #[error("bad results from {endpoint}: {message}")]
    Results { endpoint: String, message: String },
    #[error(transparent)]
    Codec(CodecError),
    #[error("child store {index}: {source}")]
    Child {
        index: usize,
        #[source]
        source: Box<StoreError>,
    },
    #[error("invalid store options: {0}")]
    Options(String),
}

impl From<CodecError> for StoreError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::Pattern(p) => StoreError::Pattern(p),
            other => StoreError::Codec(other),
        }
    }
}

impl StoreError {
    /// Whether the failure came from talking to an endpoint rather than from
    /// the query itself.
    pub fn is_transport(&self) -> bool {
        match self {
            StoreError::Transport { .. } | StoreError::Http { .. } | StoreError::Results { .. } => true,
            StoreError::Child { source, .. } => source.is_transport(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreOptions {
    pub page_size: usize,
    pub cache_enabled: bool,
    /// Added to the references of every annotation record the store returns.
    pub extra_references: BTreeSet<ReferenceRecord>,
    pub request_timeout: Duration,
}

impl Default for StoreOptions {
    /// Page size from `KIF_PAGE_SIZE` when set to a positive integer.
    fn default() -> Self {
        let page_size = std::env::var(PAGE_SIZE_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|n| *n >= 1)
            .unwrap_or(DEFAULT_PAGE_SIZE);
        StoreOptions {
            page_size,
            cache_enabled: true,
            extra_references: BTreeSet::new(),
            request_timeout: Duration::from_secs(30),
        }
    }
}

impl StoreOptions {
    pub fn with_page_size(mut self, n: usize) -> Self {
        self.page_size = n;
        self
    }

    pub fn with_cache(mut self, enabled: bool) -> Self {
        self.cache_enabled = enabled;
        self
    }

    pub fn with_extra_reference(mut self, r: ReferenceRecord) -> Self {
        self.extra_references.insert(r);
        self
    }

    pub fn with_timeout(mut self, t: Duration) -> Self {
        self.request_timeout = t;
        self
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        if self.page_size == 0 {
            return Err(StoreError::Options("page_size must be at least 1".into()));
        }
        Ok(())
    }

    /// `records` with the extra references merged into each one.
    pub fn tag(&self, records: BTreeSet<AnnotationRecord>) -> BTreeSet<AnnotationRecord> {
        if self.extra_references.is_empty() {
            return records;
        }
        records
            .into_iter()
            .map(|mut r| {
                r.references.extend(self.extra_references.iter().cloned());
                r
            })
            .collect()
    }
}

/// Requests sent and time spent inside them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RequestSnapshot {
    pub requests: u64,
    pub elapsed: Duration,
}

impl Add for RequestSnapshot {
    type Output = RequestSnapshot;

    fn add(self, o: RequestSnapshot) -> RequestSnapshot {
        RequestSnapshot { requests: self.requests + o.requests, elapsed: self.elapsed + o.elapsed }
    }
}

/// Distinct statements; single consumer.
pub type StatementStream = Box<dyn Iterator<Item = Result<Statement, StoreError>> + Send>;

pub type StoreHandle = Arc<dyn Store>;

pub trait Store: Send + Sync {
    fn options(&self) -> &StoreOptions;

    /// Short backend name: `memory`, `rdf`, `sparql`, `mapper` or `mixer`.
    fn backend(&self) -> &'static str;

    /// Statements matching `pattern`, at most `limit` of them.
    fn filter(&self, pattern: &FilterPattern, limit: Option<usize>) -> Result<StatementStream, StoreError>;

    fn count(&self, pattern: &FilterPattern) -> Result<usize, StoreError> {
        let mut n = 0;
        for s in self.filter(pattern, None)? {
            s?;
            n += 1;
        }
        Ok(n)
    }

    fn contains(&self, stmt: &Statement) -> Result<bool, StoreError> {
        for s in self.filter(&FilterPattern::exact(stmt), None)? {
            if &s? == stmt {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Annotation records of each statement, in input order. Absent
    /// statements get an empty set.
    fn get_annotations(&self, stmts: &[Statement]) -> Result<Vec<(Statement, BTreeSet<AnnotationRecord>)>, StoreError>;

    /// Descriptor of each entity restricted to `language` (exact tag match),
    /// in input order. Unknown entities get an empty descriptor.
    fn get_descriptor(&self, entities: &[Entity], language: &str) -> Result<Vec<(Entity, Descriptor)>, StoreError>;

    /// Requests sent to endpoints so far and time spent in them.
    fn request_stats(&self) -> RequestSnapshot {
        RequestSnapshot::default()
    }
}

/// Collects a stream, stopping at the first error.
pub fn collect(stream: StatementStream) -> Result<Vec<Statement>, StoreError> {
    stream.collect()
}

/// Pulls pages from `fetch(offset)` only as the consumer advances, dropping
/// statements already yielded. `fetch` returns a page and whether it was the
/// last one. The first error ends the stream.
pub struct PagedStream<F> {
    fetch: F,
    page_size: usize,
    remaining: usize,
    offset: usize,
    exhausted: bool,
    buffer: VecDeque<Statement>,
    seen: HashSet<Statement>,
}

impl<F> PagedStream<F>
where
    F: FnMut(usize) -> Result<(Vec<Statement>, bool), StoreError>,
{
    pub fn new(page_size: usize, limit: Option<usize>, fetch: F) -> Self {
        PagedStream {
            fetch,
            page_size,
            remaining: limit.unwrap_or(usize::MAX),
            offset: 0,
            exhausted: false,
            buffer: VecDeque::new(),
            seen: HashSet::new(),
        }
    }
}

impl<F> Iterator for PagedStream<F>
where
    F: FnMut(usize) -> Result<(Vec<Statement>, bool), StoreError>,
{
    type Item = Result<Statement, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.remaining == 0 {
                return None;
            }
            if let Some(s) = self.buffer.pop_front() {
                self.remaining -= 1;
                return Some(Ok(s));
            }
            if self.exhausted {
                return None;
            }
            match (self.fetch)(self.offset) {
                Ok((stmts, exhausted)) => {
                    self.exhausted = exhausted;
                    self.offset += self.page_size;
                    for s in stmts {
                        if self.seen.insert(s.clone()) {
                            self.buffer.push_back(s);
                        }
                    }
                }
                Err(e) => {
                    self.exhausted = true;
                    self.remaining = 0;
                    return Some(Err(e));
                }
            }
        }
    }
}
