//! Immutable value types for the Wikibase data model.
//!
//! Every type here is compared structurally: two statements with the same
//! subject and snak are the same statement, whatever annotations a store
//! keeps for them. The derived `Ord` instances define the canonical order
//! used for set serialization and digests.

mod decimal;
mod pattern;
mod time;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

pub use decimal::Decimal;
pub use pattern::{FilterPattern, Fingerprint, PatternError, SnakKind, SnakMask};
pub use time::{TimeValue, Timestamp};

use crate::codec::namespace::Ns;
use crate::graph::{Literal, Term};
use crate::sexpr::{self, Mode, ToSexp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("invalid decimal {0:?}")]
    InvalidDecimal(String),
    #[error("invalid timestamp {0:?}")]
    InvalidTimestamp(String),
    #[error("time precision {0} outside 0..=14")]
    InvalidPrecision(u8),
    #[error("quantity bounds violated: {0}")]
    QuantityBounds(String),
    #[error("language tag must not be empty")]
    EmptyLanguage,
    #[error("reference record must contain at least one snak")]
    EmptyReference,
}

/// Absolute IRI.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(s: impl AsRef<str>) -> Result<Self, ModelError> {
        let s = s.as_ref();
        let scheme_ok = match s.find(':') {
            Some(i) if i > 0 => {
                let scheme = &s[..i];
                scheme.as_bytes()[0].is_ascii_alphabetic()
                    && scheme.bytes().all(|b| b.is_ascii_alphanumeric() || b"+-.".contains(&b))
            }
            _ => false,
        };
        let chars_ok = s
            .chars()
            .all(|c| !c.is_whitespace() && !c.is_control() && !"<>\"{}|^`\\".contains(c));
        if !scheme_ok || !chars_ok {
            return Err(ModelError::InvalidIri(s.to_string()));
        }
        Ok(Iri(Arc::from(s)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl serde::Serialize for Iri {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl std::str::FromStr for Iri {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Iri::new(s)
    }
}

/// A person or thing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Item(pub Iri);

/// A (binary) relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Property(pub Iri);

impl Item {
    pub fn iri(&self) -> &Iri {
        &self.0
    }
}

impl Property {
    pub fn iri(&self) -> &Iri {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Entity {
    Item(Item),
    Property(Property),
}

impl Entity {
    pub fn iri(&self) -> &Iri {
        match self {
            Entity::Item(i) => &i.0,
            Entity::Property(p) => &p.0,
        }
    }
}

impl From<Item> for Entity {
    fn from(i: Item) -> Self {
        Entity::Item(i)
    }
}

impl From<Property> for Entity {
    fn from(p: Property) -> Self {
        Entity::Property(p)
    }
}

/// Text in a given language. The tag is stored lowercase.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct TextValue {
    content: String,
    language: String,
}

impl TextValue {
    pub const DEFAULT_LANGUAGE: &'static str = "en";

    pub fn new(content: impl Into<String>, language: impl AsRef<str>) -> Result<Self, ModelError> {
        let language = language.as_ref().trim().to_lowercase();
        if language.is_empty() {
            return Err(ModelError::EmptyLanguage);
        }
        Ok(TextValue { content: content.into(), language })
    }

    pub fn content(&self) -> &str {
        &self.content
    }

    pub fn language(&self) -> &str {
        &self.language
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Quantity {
    amount: Decimal,
    unit: Option<Item>,
    lower: Option<Decimal>,
    upper: Option<Decimal>,
}

impl Quantity {
    pub fn new(
        amount: Decimal,
        unit: Option<Item>,
        lower: Option<Decimal>,
        upper: Option<Decimal>,
    ) -> Result<Self, ModelError> {
        if let Some(lo) = &lower {
            if lo > &amount {
                return Err(ModelError::QuantityBounds(format!("lower {lo} > amount {amount}")));
            }
        }
        if let Some(hi) = &upper {
            if hi < &amount {
                return Err(ModelError::QuantityBounds(format!("upper {hi} < amount {amount}")));
            }
        }
        Ok(Quantity { amount, unit, lower, upper })
    }

    pub fn unitless(amount: Decimal) -> Self {
        Quantity { amount, unit: None, lower: None, upper: None }
    }

    pub fn amount(&self) -> &Decimal {
        &self.amount
    }

    pub fn unit(&self) -> Option<&Item> {
        self.unit.as_ref()
    }

    pub fn lower(&self) -> Option<&Decimal> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Decimal> {
        self.upper.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Value {
    Entity(Entity),
    Iri(Iri),
    Text(TextValue),
    String(String),
    Quantity(Quantity),
    Time(TimeValue),
}

impl Value {
    /// The single literal (or IRI) standing for this value in truthy triples.
    pub fn simple_value(&self) -> Term {
        match self {
            Value::Entity(e) => Term::Iri(e.iri().clone()),
            Value::Iri(i) => Term::Iri(i.clone()),
            Value::Text(t) => Term::Literal(Literal::lang(t.content(), t.language())),
            Value::String(s) => Term::Literal(Literal::string(s.as_str())),
            Value::Quantity(q) => Term::Literal(Literal::typed(q.amount().as_str(), Ns::Xsd.iri("decimal"))),
            Value::Time(t) => Term::Literal(Literal::typed(
                t.timestamp().to_datetime_string(),
                Ns::Xsd.iri("dateTime"),
            )),
        }
    }

    /// Quantities and times carry structure beyond their simple value.
    pub fn is_deep(&self) -> bool {
        matches!(self, Value::Quantity(_) | Value::Time(_))
    }
}

impl From<Entity> for Value {
    fn from(e: Entity) -> Self {
        Value::Entity(e)
    }
}

impl From<Item> for Value {
    fn from(i: Item) -> Self {
        Value::Entity(Entity::Item(i))
    }
}

impl From<Quantity> for Value {
    fn from(q: Quantity) -> Self {
        Value::Quantity(q)
    }
}

impl From<TimeValue> for Value {
    fn from(t: TimeValue) -> Self {
        Value::Time(t)
    }
}

impl From<TextValue> for Value {
    fn from(t: TextValue) -> Self {
        Value::Text(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Snak {
    Value(Property, Value),
    SomeValue(Property),
    NoValue(Property),
}

impl Snak {
    pub fn property(&self) -> &Property {
        match self {
            Snak::Value(p, _) | Snak::SomeValue(p) | Snak::NoValue(p) => p,
        }
    }

    pub fn kind(&self) -> SnakKind {
        match self {
            Snak::Value(..) => SnakKind::Value,
            Snak::SomeValue(_) => SnakKind::SomeValue,
            Snak::NoValue(_) => SnakKind::NoValue,
        }
    }

    pub fn value(&self) -> Option<&Value> {
        match self {
            Snak::Value(_, v) => Some(v),
            _ => None,
        }
    }
}

/// A claim about `subject`. Identity is the pair (subject, snak).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Statement {
    pub subject: Entity,
    pub snak: Snak,
}

impl Statement {
    pub fn new(subject: impl Into<Entity>, snak: Snak) -> Self {
        Statement { subject: subject.into(), snak }
    }
}

/// Non-empty set of snaks recording provenance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct ReferenceRecord(BTreeSet<Snak>);

impl ReferenceRecord {
    pub fn new(snaks: impl IntoIterator<Item = Snak>) -> Result<Self, ModelError> {
        let set: BTreeSet<Snak> = snaks.into_iter().collect();
        if set.is_empty() {
            return Err(ModelError::EmptyReference);
        }
        Ok(ReferenceRecord(set))
    }

    pub fn snaks(&self) -> &BTreeSet<Snak> {
        &self.0
    }
}

/// Ordered so that `Preferred > Normal > Deprecated`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Rank {
    Deprecated,
    #[default]
    Normal,
    Preferred,
}

impl Rank {
    pub const ALL: [Rank; 3] = [Rank::Preferred, Rank::Normal, Rank::Deprecated];
}

/// Qualifiers, references and rank attached to a statement in some store.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct AnnotationRecord {
    pub qualifiers: BTreeSet<Snak>,
    pub references: BTreeSet<ReferenceRecord>,
    pub rank: Rank,
}

impl AnnotationRecord {
    pub fn new(
        qualifiers: impl IntoIterator<Item = Snak>,
        references: impl IntoIterator<Item = ReferenceRecord>,
        rank: Rank,
    ) -> Self {
        AnnotationRecord {
            qualifiers: qualifiers.into_iter().collect(),
            references: references.into_iter().collect(),
            rank,
        }
    }
}

/// Label, description and aliases of an entity. Aliases are kept sorted and
/// duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Descriptor {
    pub label: Option<TextValue>,
    pub description: Option<TextValue>,
    aliases: Vec<TextValue>,
}

impl Descriptor {
    pub fn new(
        label: Option<TextValue>,
        description: Option<TextValue>,
        aliases: impl IntoIterator<Item = TextValue>,
    ) -> Self {
        let aliases: BTreeSet<TextValue> = aliases.into_iter().collect();
        Descriptor { label, description, aliases: aliases.into_iter().collect() }
    }

    pub fn aliases(&self) -> &[TextValue] {
        &self.aliases
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_none() && self.description.is_none() && self.aliases.is_empty()
    }

    /// Keeps only the fields in `language`.
    pub fn restricted_to(&self, language: &str) -> Descriptor {
        let language = language.to_lowercase();
        let keep = |t: &&TextValue| t.language() == language;
        Descriptor::new(
            self.label.as_ref().filter(keep).cloned(),
            self.description.as_ref().filter(keep).cloned(),
            self.aliases.iter().filter(keep).cloned(),
        )
    }

    /// Field-wise union; fields already present win.
    pub fn merge(&mut self, other: Descriptor) {
        if self.label.is_none() {
            self.label = other.label;
        }
        if self.description.is_none() {
            self.description = other.description;
        }
        let mut aliases: BTreeSet<TextValue> = std::mem::take(&mut self.aliases).into_iter().collect();
        aliases.extend(other.aliases);
        self.aliases = aliases.into_iter().collect();
    }
}

/// SHA-256 over the canonical full-mode S-expression, hex encoded.
pub fn content_digest<T: ToSexp + ?Sized>(x: &T) -> String {
    let text = sexpr::print(x, Mode::Full);
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Convenience constructors for Wikidata entities.
pub mod wd {
    use super::*;

    pub fn item(id: &str) -> Item {
        Item(Ns::Wd.iri(id))
    }

    pub fn property(id: &str) -> Property {
        Property(Ns::Wd.iri(id))
    }
}
