//! Virtual knowledge integration over Wikidata-shaped statement stores.
//!
//! The [`model`] module holds the Wikibase data model; [`sexpr`] reads and
//! prints it. [`codec`] maps statements to and from the Wikidata RDF
//! dialect, [`graph`] supplies the RDF substrate (N-Triples, a SPARQL subset,
//! an HTTP endpoint). Stores answering filter queries live in [`store`],
//! with [`mapper`] and [`mixer`] composing them, and [`decoder`] turns
//! SPARQL into filter patterns.

pub mod codec;
pub mod decoder;
pub mod graph;
pub mod mapper;
pub mod mixer;
pub mod model;
pub mod sample;
pub mod sexpr;
pub mod store;

use std::fmt;

/// 1-based line and column in some input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}
