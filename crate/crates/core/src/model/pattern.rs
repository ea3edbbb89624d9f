//! Fingerprints and filter patterns, the query language of stores.

use std::collections::BTreeSet;
use std::fmt;

use super::{Entity, Item, Property, Snak, Statement, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum SnakKind {
    Value,
    SomeValue,
    NoValue,
}

impl SnakKind {
    pub const ALL: [SnakKind; 3] = [SnakKind::Value, SnakKind::SomeValue, SnakKind::NoValue];

    fn bit(self) -> u8 {
        match self {
            SnakKind::Value => 1,
            SnakKind::SomeValue => 2,
            SnakKind::NoValue => 4,
        }
    }
}

/// Subset of snak kinds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SnakMask(u8);

impl SnakMask {
    pub const ALL: SnakMask = SnakMask(7);
    pub const VALUE: SnakMask = SnakMask(1);
    pub const SOME_VALUE: SnakMask = SnakMask(2);
    pub const NO_VALUE: SnakMask = SnakMask(4);
    pub const EMPTY: SnakMask = SnakMask(0);

    pub fn contains(self, kind: SnakKind) -> bool {
        self.0 & kind.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn kinds(self) -> impl Iterator<Item = SnakKind> {
        SnakKind::ALL.into_iter().filter(move |k| self.contains(*k))
    }

    pub fn only(kind: SnakKind) -> SnakMask {
        SnakMask(kind.bit())
    }
}

impl FromIterator<SnakKind> for SnakMask {
    fn from_iter<I: IntoIterator<Item = SnakKind>>(iter: I) -> Self {
        SnakMask(iter.into_iter().fold(0, |m, k| m | k.bit()))
    }
}

impl std::ops::BitOr for SnakMask {
    type Output = SnakMask;
    fn bitor(self, rhs: Self) -> Self {
        SnakMask(self.0 | rhs.0)
    }
}

impl std::ops::BitAnd for SnakMask {
    type Output = SnakMask;
    fn bitand(self, rhs: Self) -> Self {
        SnakMask(self.0 & rhs.0)
    }
}

impl Default for SnakMask {
    fn default() -> Self {
        SnakMask::ALL
    }
}

impl fmt::Debug for SnakMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.kinds()).finish()
    }
}

impl serde::Serialize for SnakMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.kinds())
    }
}

/// Something that identifies an entity (or, in value position, a value).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Fingerprint {
    /// The entity itself.
    Entity(Entity),
    /// A non-entity data value; only meaningful in value position.
    Value(Value),
    /// Any entity that has this snak.
    Snak(Snak),
    /// Any entity that has all of these snaks.
    SnakSet(BTreeSet<Snak>),
}

impl Fingerprint {
    /// Normalizes entity values to [`Fingerprint::Entity`].
    pub fn value(v: Value) -> Self {
        match v {
            Value::Entity(e) => Fingerprint::Entity(e),
            v => Fingerprint::Value(v),
        }
    }

    pub fn snaks(snaks: impl IntoIterator<Item = Snak>) -> Self {
        let set: BTreeSet<Snak> = snaks.into_iter().collect();
        if set.len() == 1 {
            Fingerprint::Snak(set.into_iter().next().unwrap())
        } else {
            Fingerprint::SnakSet(set)
        }
    }

    /// Snaks this fingerprint asks for, if it is snak-based.
    pub fn snak_list(&self) -> Option<Vec<&Snak>> {
        match self {
            Fingerprint::Snak(s) => Some(vec![s]),
            Fingerprint::SnakSet(set) => Some(set.iter().collect()),
            _ => None,
        }
    }
}

impl From<Entity> for Fingerprint {
    fn from(e: Entity) -> Self {
        Fingerprint::Entity(e)
    }
}

impl From<Item> for Fingerprint {
    fn from(i: Item) -> Self {
        Fingerprint::Entity(i.into())
    }
}

impl From<Property> for Fingerprint {
    fn from(p: Property) -> Self {
        Fingerprint::Entity(p.into())
    }
}

impl From<Snak> for Fingerprint {
    fn from(s: Snak) -> Self {
        Fingerprint::Snak(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("unsupported fingerprint: {0}")]
    UnsupportedFingerprint(String),
    #[error("invalid pattern: {0}")]
    Invalid(String),
}

/// Filter over statements. Absent components match anything.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct FilterPattern {
    pub subject: Option<Fingerprint>,
    pub property: Option<Fingerprint>,
    pub value: Option<Fingerprint>,
    pub snak_kinds: SnakMask,
}

impl FilterPattern {
    /// Matches every statement.
    pub fn any() -> Self {
        FilterPattern::default()
    }

    pub fn with_subject(mut self, fp: impl Into<Fingerprint>) -> Self {
        self.subject = Some(fp.into());
        self
    }

    pub fn with_property(mut self, p: Property) -> Self {
        self.property = Some(Fingerprint::Entity(Entity::Property(p)));
        self
    }

    /// Also restricts the snak kinds to value snaks.
    pub fn with_value(mut self, fp: impl Into<Fingerprint>) -> Self {
        self.value = Some(fp.into());
        self.snak_kinds = SnakMask::VALUE;
        self
    }

    pub fn with_snak_kinds(mut self, mask: SnakMask) -> Self {
        self.snak_kinds = mask;
        self
    }

    /// Pattern matching exactly `stmt` (and nothing else).
    pub fn exact(stmt: &Statement) -> Self {
        let p = FilterPattern::any()
            .with_subject(stmt.subject.clone())
            .with_property(stmt.snak.property().clone());
        match &stmt.snak {
            Snak::Value(_, v) => p.with_value(Fingerprint::value(v.clone())),
            other => p.with_snak_kinds(SnakMask::only(other.kind())),
        }
    }

    pub fn property_constant(&self) -> Option<&Property> {
        match &self.property {
            Some(Fingerprint::Entity(Entity::Property(p))) => Some(p),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        if self.snak_kinds.is_empty() {
            return Err(PatternError::Invalid("empty snak-kind mask".into()));
        }
        if self.value.is_some() && self.snak_kinds != SnakMask::VALUE {
            return Err(PatternError::Invalid(
                "a value fingerprint requires the snak-kind mask {value}".into(),
            ));
        }
        match &self.property {
            None | Some(Fingerprint::Entity(Entity::Property(_))) => {}
            Some(other) => {
                return Err(PatternError::UnsupportedFingerprint(format!(
                    "property position accepts only a property entity, got {other:?}"
                )))
            }
        }
        if let Some(Fingerprint::Value(v)) = &self.subject {
            return Err(PatternError::Invalid(format!("subject fingerprint cannot be a data value: {v:?}")));
        }
        for fp in [&self.subject, &self.value].into_iter().flatten() {
            if let Fingerprint::SnakSet(set) = fp {
                if set.is_empty() {
                    return Err(PatternError::Invalid("empty snak-set fingerprint".into()));
                }
            }
            if let Some(snaks) = fp.snak_list() {
                if let Some(s) = snaks.iter().find(|s| !matches!(s, Snak::Value(..))) {
                    return Err(PatternError::UnsupportedFingerprint(format!(
                        "fingerprint snaks must be value snaks, got {s:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks everything except snak fingerprints, which need store
    /// knowledge to resolve.
    pub fn matches_locally(&self, stmt: &Statement) -> bool {
        if let Some(Fingerprint::Entity(e)) = &self.subject {
            if &stmt.subject != e {
                return false;
            }
        }
        if let Some(p) = self.property_constant() {
            if stmt.snak.property() != p {
                return false;
            }
        }
        if !self.snak_kinds.contains(stmt.snak.kind()) {
            return false;
        }
        match (&self.value, stmt.snak.value()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(Fingerprint::Entity(e)), Some(v)) => matches!(v, Value::Entity(x) if x == e),
            (Some(Fingerprint::Value(d)), Some(v)) => d == v,
            (Some(_), Some(v)) => matches!(v, Value::Entity(_)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{wd, Decimal, Quantity};

    #[test]
    fn value_fingerprint_forces_value_mask() {
        let p = FilterPattern::any().with_value(Fingerprint::value(wd::item("Q1").into()));
        assert_eq!(p.snak_kinds, SnakMask::VALUE);
        assert!(p.validate().is_ok());
        let bad = FilterPattern { snak_kinds: SnakMask::ALL, ..p };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn property_must_be_entity() {
        let p = FilterPattern {
            property: Some(Fingerprint::Snak(Snak::NoValue(wd::property("P1")))),
            ..Default::default()
        };
        assert!(matches!(p.validate(), Err(PatternError::UnsupportedFingerprint(_))));
    }

    #[test]
    fn fingerprint_snaks_must_be_value_snaks() {
        let p = FilterPattern::any().with_subject(Snak::SomeValue(wd::property("P1")));
        assert!(matches!(p.validate(), Err(PatternError::UnsupportedFingerprint(_))));
    }

    #[test]
    fn empty_mask_invalid() {
        assert!(FilterPattern::any().with_snak_kinds(SnakMask::EMPTY).validate().is_err());
    }

    #[test]
    fn exact_pattern_matches_only_itself() {
        let q = Quantity::unitless("1".parse::<Decimal>().unwrap());
        let s = Statement::new(wd::item("Q1"), Snak::Value(wd::property("P1"), q.into()));
        let p = FilterPattern::exact(&s);
        assert!(p.matches_locally(&s));
        let other = Statement::new(wd::item("Q1"), Snak::SomeValue(wd::property("P1")));
        assert!(!p.matches_locally(&other));
        let nv = Statement::new(wd::item("Q1"), Snak::NoValue(wd::property("P1")));
        assert!(FilterPattern::exact(&nv).matches_locally(&nv));
        assert!(!FilterPattern::exact(&nv).matches_locally(&other));
    }
}
