//! S-expression syntax for model objects.
//!
//! ```text
//! (Statement (Item wd:Q7286) (ValueSnak (Property wd:P166) (Item wd:Q38104)))
//! ```
//!
//! Printing is canonical: sets print sorted, optional trailing fields are
//! omitted, and `parse(print(x)) == x` in both modes. Compact mode writes
//! IRIs with a known namespace as prefixed names.

mod lexer;
pub mod read;
mod write;

use std::cmp::Ordering;
use std::collections::BTreeSet;

pub use lexer::{read_all, read_one, tokenize, Sexp, SexprToken, TokenKind};
pub use write::Printer;

use crate::model::{
    AnnotationRecord, Descriptor, Entity, FilterPattern, Fingerprint, ReferenceRecord, Rank, Snak, SnakMask,
    Statement, Value,
};
use crate::Position;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SexprError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Position, msg: String },
    #[error("arity error at {pos}: {msg}")]
    Arity { pos: Position, msg: String },
    #[error("unknown head symbol {head:?} at {pos}")]
    UnknownHead { pos: Position, head: String },
    #[error("invalid expression at {pos}: {msg}")]
    Invalid { pos: Position, msg: String },
}

impl SexprError {
    pub fn position(&self) -> Position {
        match self {
            SexprError::Syntax { pos, .. }
            | SexprError::Arity { pos, .. }
            | SexprError::UnknownHead { pos, .. }
            | SexprError::Invalid { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Full,
    Compact,
}

/// Anything that prints as an S-expression.
pub trait ToSexp {
    fn write_sexp(&self, p: &mut Printer);
}

impl<T: ToSexp + ?Sized> ToSexp for &T {
    fn write_sexp(&self, p: &mut Printer) {
        (**self).write_sexp(p)
    }
}

pub fn print<T: ToSexp + ?Sized>(x: &T, mode: Mode) -> String {
    let mut p = Printer::new(mode);
    x.write_sexp(&mut p);
    p.finish()
}

/// Every top-level form. The derived order (sort rank of the variant, then
/// content) is the canonical order across sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    Value(Value),
    Snak(Snak),
    Statement(Statement),
    ReferenceRecord(ReferenceRecord),
    SnakSet(BTreeSet<Snak>),
    ReferenceRecordSet(BTreeSet<ReferenceRecord>),
    Rank(Rank),
    AnnotationRecord(AnnotationRecord),
    AnnotationRecordSet(BTreeSet<AnnotationRecord>),
    Descriptor(Descriptor),
    FilterPattern(FilterPattern),
    SnakMask(SnakMask),
    AnnotatedStatement(Statement, BTreeSet<AnnotationRecord>),
    EntityDescriptor(Entity, Descriptor),
}

pub fn canonical_compare(a: &Object, b: &Object) -> Ordering {
    a.cmp(b)
}

/// Types that can be read from a single S-expression.
pub trait FromSexp: Sized {
    fn from_sexp(s: &Sexp) -> Result<Self, SexprError>;
}

macro_rules! from_sexp {
    ($($t:ty => $f:path),* $(,)?) => {
        $(impl FromSexp for $t {
            fn from_sexp(s: &Sexp) -> Result<Self, SexprError> {
                $f(s)
            }
        })*
    };
}

from_sexp! {
    Object => read::object,
    Value => read::value,
    Entity => read::entity,
    crate::model::Item => read::item,
    crate::model::Property => read::property,
    Snak => read::snak,
    Statement => read::statement,
    ReferenceRecord => read::reference,
    Rank => read::rank,
    AnnotationRecord => read::annotation,
    Descriptor => read::descriptor,
    FilterPattern => read::filter_pattern,
    SnakMask => read::snak_mask,
}

pub fn parse(text: &str) -> Result<Object, SexprError> {
    parse_as(text)
}

pub fn parse_as<T: FromSexp>(text: &str) -> Result<T, SexprError> {
    T::from_sexp(&read_one(text)?)
}

pub fn parse_many(text: &str) -> Result<Vec<Object>, SexprError> {
    read_all(text)?.iter().map(read::object).collect()
}

/// Fingerprint in subject or property position.
pub fn parse_entity_fingerprint(text: &str) -> Result<Fingerprint, SexprError> {
    read::entity_fingerprint(&read_one(text)?)
}

/// Fingerprint in value position.
pub fn parse_value_fingerprint(text: &str) -> Result<Fingerprint, SexprError> {
    read::value_fingerprint(&read_one(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::namespace::Ns;
    use crate::model::{wd, Decimal, Item, Quantity, TextValue, TimeValue, Timestamp};

    fn dec(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn nobel_statement_full_form() {
        let text = r#"(Statement (Item (IRI "http://www.wikidata.org/entity/Q7286")) (ValueSnak (Property (IRI "http://www.wikidata.org/entity/P166")) (Item (IRI "http://www.wikidata.org/entity/Q38104"))))"#;
        let expected = Statement::new(wd::item("Q7286"), Snak::Value(wd::property("P166"), wd::item("Q38104").into()));
        assert_eq!(parse(text).unwrap(), Object::Statement(expected.clone()));
        assert_eq!(print(&expected, Mode::Full), text);
        assert_eq!(
            print(&expected, Mode::Compact),
            "(Statement (Item wd:Q7286) (ValueSnak (Property wd:P166) (Item wd:Q38104)))"
        );
    }

    #[test]
    fn quantity_with_prefixed_unit() {
        let v: Value = parse_as("(Quantity 0.07 wd:Q21127659 0.06 0.08)").unwrap();
        let q = Quantity::new(dec("0.07"), Some(wd::item("Q21127659")), Some(dec("0.06")), Some(dec("0.08"))).unwrap();
        assert_eq!(v, Value::Quantity(q.clone()));
        assert_eq!(print(&q, Mode::Compact), "(Quantity 0.07 (Item wd:Q21127659) 0.06 0.08)");
        let only_upper = Quantity::new(dec("1"), None, None, Some(dec("2"))).unwrap();
        assert_eq!(print(&only_upper, Mode::Compact), "(Quantity 1 None None 2)");
        assert_eq!(print(&Quantity::unitless(dec("5")), Mode::Compact), "(Quantity 5)");
    }

    #[test]
    fn smallest_snak() {
        let s: Snak = parse_as(r#"(NoValueSnak (Property (IRI "http://www.wikidata.org/entity/P166")))"#).unwrap();
        assert_eq!(s, Snak::NoValue(wd::property("P166")));
    }

    #[test]
    fn ranks_and_annotation_listing() {
        assert_eq!(print(&Rank::Normal, Mode::Full), "NormalRank");
        let rec = AnnotationRecord::new(
            [Snak::Value(wd::property("P2178"), wd::item("Q283").into())],
            [ReferenceRecord::new([Snak::Value(wd::property("P1931"), Value::String("0049".into()))]).unwrap()],
            Rank::Normal,
        );
        assert_eq!(
            print(&rec, Mode::Compact),
            "(AnnotationRecord (SnakSet (ValueSnak (Property wd:P2178) (Item wd:Q283))) \
             (ReferenceRecordSet (ReferenceRecord (ValueSnak (Property wd:P1931) (String \"0049\")))) NormalRank)"
        );
        assert_eq!(parse_as::<AnnotationRecord>("(AnnotationRecord)").unwrap(), AnnotationRecord::default());
    }

    #[test]
    fn time_display_by_precision() {
        let t = TimeValue::new(Timestamp::date(1903, 1, 1).unwrap(), 9, 0, Some(wd::item("Q1985727"))).unwrap();
        assert_eq!(print(&t, Mode::Compact), "(Time 1903-01-01 9 0 (Item wd:Q1985727))");
        let t = TimeValue::new(Timestamp::new(2020, 5, 1, 10, 30, 0).unwrap(), 13, -60, None).unwrap();
        assert_eq!(print(&t, Mode::Compact), "(Time 2020-05-01T10:30:00Z 13 -60)");
        let back: Value = parse_as("(Time 2020-05-01T10:30:00Z 13 -60)").unwrap();
        assert_eq!(back, Value::Time(t));
        let default: Value = parse_as("(Time 2015-08-03)").unwrap();
        assert_eq!(
            default,
            Value::Time(TimeValue::new(Timestamp::date(2015, 8, 3).unwrap(), 11, 0, None).unwrap())
        );
    }

    #[test]
    fn text_default_language() {
        let v: Value = parse_as(r#"(Text "Marie Curie")"#).unwrap();
        assert_eq!(v, Value::Text(TextValue::new("Marie Curie", "en").unwrap()));
    }

    #[test]
    fn bare_names_by_position() {
        let e: Entity = parse_as("wd:P166").unwrap();
        assert!(matches!(e, Entity::Property(_)));
        let v: Value = parse_as("wd:Q1").unwrap();
        assert_eq!(v, Value::from(wd::item("Q1")));
        let v: Value = parse_as("schema:Person").unwrap();
        assert_eq!(v, Value::Iri(Ns::Schema.iri("Person")));
        let v: Value = parse_as(r#"(IRI "http://www.wikidata.org/entity/Q1")"#).unwrap();
        assert_eq!(v, Value::Iri(Ns::Wd.iri("Q1")), "no promotion of IRI values");
        let i: Item = parse_as("wd:P5").unwrap();
        assert_eq!(i, Item(Ns::Wd.iri("P5")));
        let fp = parse_value_fingerprint("(ValueSnak wd:P234 \"InChI\")").unwrap();
        assert!(matches!(fp, Fingerprint::Snak(_)));
        let fp = parse_value_fingerprint("\"0049\"").unwrap();
        assert_eq!(fp, Fingerprint::Value(Value::String("0049".into())));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("(Quantity)"), Err(SexprError::Arity { .. })));
        assert!(matches!(parse("(Frobnicate 1)"), Err(SexprError::UnknownHead { .. })));
        assert!(matches!(parse("(Statement wd:Q1 (Item wd:Q2))"), Err(SexprError::Invalid { .. })));
        assert!(matches!(parse("(Item foo:Q1)"), Err(SexprError::Invalid { .. })));
        assert!(matches!(parse("(ReferenceRecord)"), Err(SexprError::Arity { .. })));
        assert!(matches!(parse("(Quantity 0.07 None 0.08)"), Err(SexprError::Invalid { .. })));
        let err = parse("(Statement wd:Q1\n  (ValueSnak wd:P1 (Quantity 0.0!)))").unwrap_err();
        assert_eq!(err.position(), Position { line: 2, col: 30 });
    }

    #[test]
    fn filter_pattern_forms() {
        let f: FilterPattern = parse_as("(FilterPattern wd:Q2270 wd:P2177 None)").unwrap();
        assert_eq!(f, FilterPattern::any().with_subject(Entity::from(wd::item("Q2270"))).with_property(wd::property("P2177")));
        let f: FilterPattern = parse_as("(FilterPattern None None (Item wd:Q38104))").unwrap();
        assert_eq!(f.snak_kinds, SnakMask::VALUE);
        assert_eq!(parse_as::<FilterPattern>(&print(&f, Mode::Full)).unwrap(), f);
    }

    #[test]
    fn canonical_order_ranks_sorts() {
        let v = Object::Value(Value::from(wd::item("Q1")));
        let s = Object::Snak(Snak::NoValue(wd::property("P1")));
        assert_eq!(canonical_compare(&v, &s), Ordering::Less);
        let a = Object::Value(Value::from(wd::item("Q1")));
        let b = Object::Value(Value::from(wd::item("Q2")));
        assert_eq!(canonical_compare(&a, &b), Ordering::Less);
        assert_eq!(canonical_compare(&a, &a), Ordering::Equal);
    }
}
