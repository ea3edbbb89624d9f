//! Codec between annotated statements and the Wikidata RDF dialect of the
//! query service: truthy `wdt:` triples next to reified `wds:` statement
//! nodes, `wdv:` deep-value nodes and `wdref:` reference nodes. Node IRIs
//! are content digests, so encoding is deterministic.
//!
//! [`compile`] turns store operations into queries in the SPARQL subset
//! understood by [`crate::graph`].

pub mod compile;
mod decode;
mod encode;
pub mod namespace;

pub use compile::{compile_annotations, compile_filter, Level};
pub use decode::{decode, lift, Decoded, DecodedStatement};
pub use encode::{
    deep_value_triples, encode, encode_all, encode_descriptor, reference_node, some_value_node, statement_node,
    truthy_triple, value_node, EncodedStatement,
};
pub use namespace::Ns;

use crate::model::PatternError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("cannot encode: {0}")]
    Unencodable(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}
