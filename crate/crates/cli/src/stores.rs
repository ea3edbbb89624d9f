//! `--store` specifications.
//!
//! ```text
//! sparql:<url>  rdf:<file.nt>  memory:<fixture.sexp>  mapper:<spec.json>@<inner>
//! ```
//!
//! The inner store of a mapper is itself an `rdf:` or `sparql:` spec.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use kif_core::graph::{ntriples, Graph};
use kif_core::mapper::{MapperStore, MappingSpec};
use kif_core::mixer::MixerStore;
use kif_core::sample::Dataset;
use kif_core::store::{MemoryStore, RdfStore, SparqlStore, StoreHandle, StoreOptions};

use crate::{read_file, CliError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StoreSpec {
    Sparql(String),
    Rdf(String),
    Memory(String),
    Mapper { spec: String, inner: Box<StoreSpec> },
}

impl FromStr for StoreSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Usage(format!("bad store spec {s:?}: {why}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected <kind>:<location>"))?;
        if rest.is_empty() {
            return Err(bad("missing location"));
        }
        match kind {
            "sparql" => Ok(StoreSpec::Sparql(rest.to_string())),
            "rdf" => Ok(StoreSpec::Rdf(rest.to_string())),
            "memory" => Ok(StoreSpec::Memory(rest.to_string())),
            "mapper" => {
                let (spec, inner) = rest.split_once('@').ok_or_else(|| bad("expected mapper:<spec.json>@<inner>"))?;
                let inner: StoreSpec = inner.parse()?;
                if !matches!(inner, StoreSpec::Rdf(_) | StoreSpec::Sparql(_)) {
                    return Err(bad("a mapper reads from an rdf: or sparql: store"));
                }
                Ok(StoreSpec::Mapper { spec: spec.to_string(), inner: Box::new(inner) })
            }
            other => Err(bad(&format!("unknown kind {other:?}"))),
        }
    }
}

impl fmt::Display for StoreSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoreSpec::Sparql(u) => write!(f, "sparql:{u}"),
            StoreSpec::Rdf(p) => write!(f, "rdf:{p}"),
            StoreSpec::Memory(p) => write!(f, "memory:{p}"),
            StoreSpec::Mapper { spec, inner } => write!(f, "mapper:{spec}@{inner}"),
        }
    }
}

pub fn load_graph(path: &str) -> Result<Graph, CliError> {
    ntriples::parse(&read_file(path)?).map_err(|e| CliError::Data { path: path.to_string(), message: e.to_string() })
}

pub fn load_dataset(path: &str) -> Result<Dataset, CliError> {
    Dataset::from_sexp(&read_file(path)?).map_err(|e| CliError::sexpr(path, e))
}

impl StoreSpec {
    pub fn open(&self, options: &StoreOptions) -> Result<StoreHandle, CliError> {
        let options = options.clone();
        Ok(match self {
            StoreSpec::Sparql(url) => Arc::new(SparqlStore::sparql(url, options)?),
            StoreSpec::Rdf(path) => Arc::new(RdfStore::rdf(Arc::new(load_graph(path)?), options)?),
            StoreSpec::Memory(path) => Arc::new(MemoryStore::from_dataset(&load_dataset(path)?).with_options(options)),
            StoreSpec::Mapper { spec, inner } => {
                let mapping = MappingSpec::from_json(&read_file(spec)?)?;
                match inner.as_ref() {
                    StoreSpec::Sparql(url) => Arc::new(MapperStore::sparql(url, mapping, options)?),
                    StoreSpec::Rdf(path) => Arc::new(MapperStore::rdf(Arc::new(load_graph(path)?), mapping, options)?),
                    _ => unreachable!("checked when parsed"),
                }
            }
        })
    }
}

/// One store per spec; two or more become a mixer in the given order.
pub fn open_all(
    specs: &[StoreSpec],
    options: &StoreOptions,
    parallel: bool,
    lenient: bool,
) -> Result<StoreHandle, CliError> {
    if specs.is_empty() {
        return Err(CliError::Usage("at least one --store is required".into()));
    }
    let mut children = specs.iter().map(|s| s.open(options)).collect::<Result<Vec<_>, _>>()?;
    if children.len() == 1 {
        return Ok(children.pop().unwrap());
    }
    Ok(Arc::new(MixerStore::new(children)?.with_parallel(parallel).with_lenient(lenient)))
}
