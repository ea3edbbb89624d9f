//! Presents a non-Wikidata source as a Wikidata-shaped store.
//!
//! A [`MappingSpec`] pairs IRI templates for entities with one rule per
//! target property. Filter patterns are rewritten into source-vocabulary
//! SPARQL at query time and the bindings are rewritten back. Patterns that
//! mention a property the spec does not map are answered with nothing,
//! without contacting the source.
//!
//! Specs are JSON:
//!
//! ```json
//! {
//!   "name": "pubchem",
//!   "entity_rules": [
//!     { "source": "http://rdf.ncbi.nlm.nih.gov/pubchem/compound/CID{n}",
//!       "target": "http://www.wikidata.org/entity/Q_PUBCHEM_CID{n}" }
//!   ],
//!   "property_rules": [
//!     { "property": "P234", "predicate": "http://example.org/inchi", "codec": "string" },
//!     { "property": "P2067", "predicate": "http://example.org/mass",
//!       "codec": "decimal-quantity", "unit": "Q28924753" }
//!   ],
//!   "label_predicate": "http://www.w3.org/2000/01/rdf-schema#label"
//! }
//! ```

mod store;
mod translate;

use std::collections::BTreeSet;

use serde::Deserialize;

pub use store::MapperStore;
pub use translate::{translate_pattern, translate_results, Translation};

use crate::codec::namespace::{entity_of, Ns};
use crate::graph::{Literal, Term};
use crate::model::{Decimal, Entity, Iri, Item, Property, Quantity, TextValue, Value};

#[derive(Debug, thiserror::Error)]
pub enum MapperError {
    #[error("mapping spec is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad IRI template {template:?}: {reason}")]
    Template { template: String, reason: String },
    #[error("property {0} has more than one rule")]
    DuplicateProperty(String),
    #[error("bad mapping spec: {0}")]
    Invalid(String),
}

/// An IRI with exactly one `{name}` capture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    prefix: String,
    suffix: String,
}

impl Template {
    pub fn parse(text: &str) -> Result<Template, MapperError> {
        let bad = |reason: &str| MapperError::Template { template: text.to_string(), reason: reason.to_string() };
        let open = text.find('{').ok_or_else(|| bad("no {capture}"))?;
        let close = text[open..].find('}').map(|i| open + i).ok_or_else(|| bad("unclosed {"))?;
        let (prefix, suffix) = (&text[..open], &text[close + 1..]);
        if suffix.contains(['{', '}']) || prefix.contains('}') {
            return Err(bad("more than one capture"));
        }
        if prefix.is_empty() {
            return Err(bad("capture at the start"));
        }
        Iri::new(format!("{prefix}x{suffix}")).map_err(|e| bad(&e.to_string()))?;
        Ok(Template { prefix: prefix.to_string(), suffix: suffix.to_string() })
    }

    /// The captured text, if `iri` is an instance of the template.
    pub fn capture<'a>(&self, iri: &'a str) -> Option<&'a str> {
        let rest = iri.strip_prefix(&self.prefix)?.strip_suffix(&self.suffix)?;
        (!rest.is_empty()).then_some(rest)
    }

    pub fn instantiate(&self, capture: &str) -> Option<Iri> {
        Iri::new(format!("{}{capture}{}", self.prefix, self.suffix)).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityRule {
    pub source: Template,
    pub target: Template,
}

/// How source terms become values of a target property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueCodec {
    /// Plain literals as strings.
    String,
    /// IRIs, kept as they are.
    Iri,
    /// IRIs rewritten through the entity rules into items.
    Item,
    /// Numeric literals as quantities in a fixed unit. Constants are
    /// written back with `datatype`.
    DecimalQuantity { unit: Option<Item>, datatype: Iri },
    /// Literals tagged with one language.
    Text { language: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyRule {
    pub property: Property,
    pub predicate: Iri,
    pub codec: ValueCodec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingSpec {
    pub name: String,
    pub entity_rules: Vec<EntityRule>,
    pub property_rules: Vec<PropertyRule>,
    pub label_predicate: Option<Iri>,
}

#[derive(Deserialize)]
struct RawSpec {
    name: String,
    #[serde(default)]
    entity_rules: Vec<RawEntityRule>,
    #[serde(default)]
    property_rules: Vec<RawPropertyRule>,
    #[serde(default)]
    label_predicate: Option<String>,
}

#[derive(Deserialize)]
struct RawEntityRule {
    source: String,
    target: String,
}

#[derive(Deserialize)]
struct RawPropertyRule {
    property: String,
    predicate: String,
    codec: String,
    #[serde(default)]
    unit: Option<String>,
    #[serde(default)]
    datatype: Option<String>,
    #[serde(default)]
    language: Option<String>,
}

/// `P31` and `Q5` are Wikidata ids; anything with a colon is a full IRI.
fn wikidata_iri(text: &str) -> Result<Iri, MapperError> {
    if text.contains(':') {
        Iri::new(text).map_err(|e| MapperError::Invalid(e.to_string()))
    } else {
        Ok(Ns::Wd.iri(text))
    }
}

fn full_iri(text: &str) -> Result<Iri, MapperError> {
    Iri::new(text).map_err(|e| MapperError::Invalid(format!("{text:?}: {e}")))
}

impl TryFrom<RawPropertyRule> for PropertyRule {
    type Error = MapperError;

    fn try_from(r: RawPropertyRule) -> Result<Self, MapperError> {
        let unused = |field: &str, v: &Option<String>| match v {
            Some(_) => Err(MapperError::Invalid(format!("{}: codec {} takes no {field}", r.property, r.codec))),
            None => Ok(()),
        };
        let codec = match r.codec.as_str() {
            "string" | "iri" | "item" => {
                unused("unit", &r.unit)?;
                unused("datatype", &r.datatype)?;
                unused("language", &r.language)?;
                match r.codec.as_str() {
                    "string" => ValueCodec::String,
                    "iri" => ValueCodec::Iri,
                    _ => ValueCodec::Item,
                }
            }
            "decimal-quantity" => {
                unused("language", &r.language)?;
                ValueCodec::DecimalQuantity {
                    unit: r.unit.as_deref().map(wikidata_iri).transpose()?.map(Item),
                    datatype: r.datatype.as_deref().map(full_iri).transpose()?.unwrap_or_else(|| Ns::Xsd.iri("decimal")),
                }
            }
            "text" => {
                unused("unit", &r.unit)?;
                unused("datatype", &r.datatype)?;
                let language = r
                    .language
                    .clone()
                    .ok_or_else(|| MapperError::Invalid(format!("{}: codec text needs a language", r.property)))?;
                TextValue::new("", &language).map_err(|e| MapperError::Invalid(e.to_string()))?;
                ValueCodec::Text { language: language.to_lowercase() }
            }
            other => return Err(MapperError::Invalid(format!("{}: unknown codec {other:?}", r.property))),
        };
        let property = wikidata_iri(&r.property)?;
        if entity_of(&property).is_none_or(|e| !matches!(e, Entity::Property(_))) {
            return Err(MapperError::Invalid(format!("{} is not a Wikidata property", r.property)));
        }
        Ok(PropertyRule { property: Property(property), predicate: full_iri(&r.predicate)?, codec })
    }
}

impl TryFrom<RawSpec> for MappingSpec {
    type Error = MapperError;

    fn try_from(raw: RawSpec) -> Result<Self, MapperError> {
        let entity_rules = raw
            .entity_rules
            .iter()
            .map(|r| Ok(EntityRule { source: Template::parse(&r.source)?, target: Template::parse(&r.target)? }))
            .collect::<Result<Vec<_>, MapperError>>()?;
        let property_rules =
            raw.property_rules.into_iter().map(PropertyRule::try_from).collect::<Result<Vec<_>, _>>()?;
        let mut seen = BTreeSet::new();
        for r in &property_rules {
            if !seen.insert(r.property.clone()) {
                return Err(MapperError::DuplicateProperty(r.property.iri().to_string()));
            }
        }
        let label_predicate = raw.label_predicate.as_deref().map(full_iri).transpose()?;
        Ok(MappingSpec { name: raw.name, entity_rules, property_rules, label_predicate })
    }
}

impl MappingSpec {
    pub fn from_json(text: &str) -> Result<MappingSpec, MapperError> {
        let raw: RawSpec = serde_json::from_str(text)?;
        MappingSpec::try_from(raw)
    }

    pub fn rule(&self, property: &Property) -> Option<&PropertyRule> {
        self.property_rules.iter().find(|r| &r.property == property)
    }

    pub fn rule_for_predicate(&self, predicate: &Iri) -> Option<&PropertyRule> {
        self.property_rules.iter().find(|r| &r.predicate == predicate)
    }

    /// Source IRI of a target entity, by the first rule whose target
    /// template it instantiates.
    pub fn to_source(&self, entity: &Entity) -> Option<Iri> {
        self.entity_rules.iter().find_map(|r| r.target.capture(entity.iri().as_str()).and_then(|c| r.source.instantiate(c)))
    }

    /// Target entity of a source IRI.
    pub fn to_target(&self, iri: &Iri) -> Option<Entity> {
        let target =
            self.entity_rules.iter().find_map(|r| r.source.capture(iri.as_str()).and_then(|c| r.target.instantiate(c)))?;
        Some(entity_of(&target).unwrap_or(Entity::Item(Item(target))))
    }
}

fn numeric(l: &Literal) -> bool {
    ["decimal", "integer", "double", "float", "int", "long"].iter().any(|d| l.has_datatype(Ns::Xsd, d))
}

impl ValueCodec {
    /// The source term standing for `v`, if `v` is in this codec's range.
    pub fn encode(&self, v: &Value, spec: &MappingSpec) -> Option<Term> {
        match (self, v) {
            (ValueCodec::String, Value::String(s)) => Some(Literal::string(s).into()),
            (ValueCodec::Iri, Value::Iri(i)) => Some(i.clone().into()),
            (ValueCodec::Item, Value::Entity(e)) => spec.to_source(e).map(Term::Iri),
            (ValueCodec::DecimalQuantity { unit, datatype }, Value::Quantity(q))
                if q.unit() == unit.as_ref() && q.lower().is_none() && q.upper().is_none() =>
            {
                Some(Literal::typed(q.amount().as_str(), datatype.clone()).into())
            }
            (ValueCodec::Text { language }, Value::Text(t)) if t.language() == language => {
                Some(Literal::lang(t.content(), language).into())
            }
            _ => None,
        }
    }

    /// The value a source term stands for. `Ok(None)` means the term lies
    /// outside the codec's declared space (a text in another language) and
    /// is skipped quietly; `Err` means it should have been decodable.
    pub fn decode(&self, t: &Term, spec: &MappingSpec) -> Result<Option<Value>, String> {
        match (self, t) {
            (ValueCodec::String, Term::Literal(l)) if l.has_datatype(Ns::Xsd, "string") => {
                Ok(Some(Value::String(l.lexical().to_string())))
            }
            (ValueCodec::Iri, Term::Iri(i)) => Ok(Some(Value::Iri(i.clone()))),
            (ValueCodec::Item, Term::Iri(i)) => {
                spec.to_target(i).map(|e| Some(Value::Entity(e))).ok_or_else(|| format!("no entity rule for {t}"))
            }
            (ValueCodec::DecimalQuantity { unit, .. }, Term::Literal(l)) if numeric(l) => {
                let amount: Decimal = l.lexical().trim().parse().map_err(|e| format!("{t}: {e}"))?;
                let q = Quantity::new(amount, unit.clone(), None, None).map_err(|e| e.to_string())?;
                Ok(Some(Value::Quantity(q)))
            }
            (ValueCodec::Text { language }, Term::Literal(l)) => match l.language() {
                Some(lang) if lang == language => {
                    TextValue::new(l.lexical(), lang).map(|x| Some(Value::Text(x))).map_err(|e| e.to_string())
                }
                Some(_) => Ok(None),
                None => Err(format!("{t} has no language tag")),
            },
            _ => Err(format!("{t} does not fit codec {}", self.name())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ValueCodec::String => "string",
            ValueCodec::Iri => "iri",
            ValueCodec::Item => "item",
            ValueCodec::DecimalQuantity { .. } => "decimal-quantity",
            ValueCodec::Text { .. } => "text",
        }
    }
}
