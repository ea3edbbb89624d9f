//! Interpretation of S-expressions as model objects.
//!
//! Bare prefixed names are read according to where they occur. In entity
//! position `wd:P…` is a property and any other `wd:` name an item; in
//! property or item position the name is taken as given; in value position
//! `wd:` names are entities and everything else is an IRI value.

use std::collections::BTreeSet;

use super::lexer::{Sexp, TokenKind};
use super::{Object, SexprError};
use crate::codec::namespace::{entity_of, Ns};
use crate::model::{
    AnnotationRecord, Decimal, Descriptor, Entity, FilterPattern, Fingerprint, Iri, Item, Property, Quantity, Rank,
    ReferenceRecord, Snak, SnakKind, SnakMask, Statement, TextValue, TimeValue, Timestamp, Value,
};

pub(crate) const KNOWN_HEADS: &[&str] = &[
    "IRI",
    "Item",
    "Property",
    "Text",
    "String",
    "Quantity",
    "Time",
    "ValueSnak",
    "SomeValueSnak",
    "NoValueSnak",
    "Statement",
    "ReferenceRecord",
    "SnakSet",
    "ReferenceRecordSet",
    "AnnotationRecord",
    "AnnotationRecordSet",
    "Descriptor",
    "FilterPattern",
    "SnakMask",
    "AnnotatedStatement",
    "EntityDescriptor",
];

type R<T> = Result<T, SexprError>;

fn invalid(s: &Sexp, msg: impl Into<String>) -> SexprError {
    SexprError::Invalid { pos: s.position(), msg: msg.into() }
}

/// Error for a list whose head is unknown or wrong for this position.
fn unexpected(s: &Sexp, expected: &str) -> SexprError {
    if let Some((head, _)) = s.form() {
        if !KNOWN_HEADS.contains(&head) {
            return SexprError::UnknownHead { pos: s.position(), head: head.to_string() };
        }
        return invalid(s, format!("expected {expected}, found ({head} ...)"));
    }
    if let Sexp::List(items, _) = s {
        if let Some(first) = items.first() {
            return invalid(first, format!("expected a head symbol, found {first}"));
        }
        return invalid(s, format!("expected {expected}, found ()"));
    }
    invalid(s, format!("expected {expected}, found {s}"))
}

fn arity(s: &Sexp, args: &[Sexp], min: usize, max: usize) -> R<()> {
    if args.len() < min || args.len() > max {
        let (head, _) = s.form().unwrap_or(("?", &[]));
        let want = match (min, max) {
            (a, b) if a == b => format!("{a}"),
            (a, usize::MAX) => format!("at least {a}"),
            (a, b) => format!("{a} to {b}"),
        };
        return Err(SexprError::Arity {
            pos: s.position(),
            msg: format!("{head} takes {want} argument(s), got {}", args.len()),
        });
    }
    Ok(())
}

fn is_none(s: &Sexp) -> bool {
    s.symbol() == Some("None")
}

fn expand_pname(s: &Sexp, token: &str) -> R<Iri> {
    let Some((prefix, local)) = token.split_once(':') else {
        return Err(invalid(s, format!("expected a prefixed name, found {token}")));
    };
    let ns = Ns::from_prefix(prefix).ok_or_else(|| invalid(s, format!("unknown prefix '{prefix}:'")))?;
    Iri::new(format!("{}{}", ns.base(), local)).map_err(|e| invalid(s, e.to_string()))
}

/// `(IRI "…")`, `(IRI pfx:local)`, a bare prefixed name or a string.
pub fn iri(s: &Sexp) -> R<Iri> {
    if let Some(("IRI", args)) = s.form() {
        arity(s, args, 1, 1)?;
        return iri_atom(&args[0]);
    }
    iri_atom(s)
}

fn iri_atom(s: &Sexp) -> R<Iri> {
    match s.atom() {
        Some(t) if t.kind == TokenKind::String => Iri::new(&t.lexeme).map_err(|e| invalid(s, e.to_string())),
        Some(t) if t.kind == TokenKind::Symbol => expand_pname(s, &t.lexeme),
        _ => Err(unexpected(s, "an IRI")),
    }
}

pub fn item(s: &Sexp) -> R<Item> {
    match s.form() {
        Some(("Item", args)) => {
            arity(s, args, 1, 1)?;
            Ok(Item(iri(&args[0])?))
        }
        Some(_) => Err(unexpected(s, "an item")),
        None if s.symbol().is_some() => Ok(Item(iri_atom(s)?)),
        None => Err(unexpected(s, "an item")),
    }
}

pub fn property(s: &Sexp) -> R<Property> {
    match s.form() {
        Some(("Property", args)) => {
            arity(s, args, 1, 1)?;
            Ok(Property(iri(&args[0])?))
        }
        Some(_) => Err(unexpected(s, "a property")),
        None if s.symbol().is_some() => Ok(Property(iri_atom(s)?)),
        None => Err(unexpected(s, "a property")),
    }
}

pub fn entity(s: &Sexp) -> R<Entity> {
    match s.form() {
        Some(("Item", _)) => Ok(Entity::Item(item(s)?)),
        Some(("Property", _)) => Ok(Entity::Property(property(s)?)),
        Some(("IRI", _)) => {
            let i = iri(s)?;
            entity_of(&i).ok_or_else(|| invalid(s, format!("{} is not a Wikidata entity IRI", i)))
        }
        Some(_) => Err(unexpected(s, "an entity")),
        None if s.symbol().is_some() => {
            let i = iri_atom(s)?;
            entity_of(&i).ok_or_else(|| invalid(s, format!("{} is not a Wikidata entity IRI", i)))
        }
        None => Err(unexpected(s, "an entity")),
    }
}

fn string_atom(s: &Sexp) -> R<String> {
    match s.atom() {
        Some(t) if t.kind == TokenKind::String => Ok(t.lexeme.clone()),
        _ => Err(unexpected(s, "a string")),
    }
}

fn decimal(s: &Sexp) -> R<Decimal> {
    match s.atom() {
        Some(t) if t.kind == TokenKind::Number => t.lexeme.parse().map_err(|e: crate::model::ModelError| invalid(s, e.to_string())),
        _ => Err(unexpected(s, "a number")),
    }
}

fn integer<T: std::str::FromStr>(s: &Sexp, what: &str) -> R<T> {
    match s.atom() {
        Some(t) if t.kind == TokenKind::Number => {
            t.lexeme.parse().map_err(|_| invalid(s, format!("expected {what}, found {}", t.lexeme)))
        }
        _ => Err(unexpected(s, what)),
    }
}

fn optional<T>(s: Option<&Sexp>, f: impl Fn(&Sexp) -> R<T>) -> R<Option<T>> {
    match s {
        None => Ok(None),
        Some(x) if is_none(x) => Ok(None),
        Some(x) => f(x).map(Some),
    }
}

pub fn text(s: &Sexp) -> R<TextValue> {
    match s.form() {
        Some(("Text", args)) => {
            arity(s, args, 1, 2)?;
            let content = string_atom(&args[0])?;
            let lang = match args.get(1) {
                None => TextValue::DEFAULT_LANGUAGE.to_string(),
                Some(l) => match l.atom() {
                    Some(t) if matches!(t.kind, TokenKind::String | TokenKind::Symbol) => t.lexeme.clone(),
                    _ => return Err(unexpected(l, "a language tag")),
                },
            };
            TextValue::new(content, &lang).map_err(|e| invalid(s, e.to_string()))
        }
        _ => Err(unexpected(s, "a text")),
    }
}

fn timestamp(s: &Sexp) -> R<Timestamp> {
    match s.atom() {
        Some(t) if t.kind != TokenKind::LParen => {
            t.lexeme.parse().map_err(|e: crate::model::ModelError| invalid(s, e.to_string()))
        }
        _ => Err(unexpected(s, "a timestamp")),
    }
}

pub fn value(s: &Sexp) -> R<Value> {
    if let Some((head, args)) = s.form() {
        return match head {
            "Item" | "Property" => Ok(Value::Entity(entity(s)?)),
            "IRI" => Ok(Value::Iri(iri(s)?)),
            "Text" => Ok(Value::Text(text(s)?)),
            "String" => {
                arity(s, args, 1, 1)?;
                Ok(Value::String(string_atom(&args[0])?))
            }
            "Quantity" => {
                arity(s, args, 1, 4)?;
                let amount = decimal(&args[0])?;
                let unit = optional(args.get(1), item)?;
                let lower = optional(args.get(2), decimal)?;
                let upper = optional(args.get(3), decimal)?;
                Quantity::new(amount, unit, lower, upper).map(Value::Quantity).map_err(|e| invalid(s, e.to_string()))
            }
            "Time" => {
                arity(s, args, 1, 4)?;
                let ts = timestamp(&args[0])?;
                let precision = optional(args.get(1), |x| integer::<u8>(x, "a precision"))?.unwrap_or(TimeValue::DAY);
                let tz = optional(args.get(2), |x| integer::<i32>(x, "a timezone offset"))?.unwrap_or(0);
                let cal = optional(args.get(3), item)?;
                TimeValue::new(ts, precision, tz, cal).map(Value::Time).map_err(|e| invalid(s, e.to_string()))
            }
            _ => Err(unexpected(s, "a value")),
        };
    }
    match s.atom() {
        Some(t) if t.kind == TokenKind::String => Ok(Value::String(t.lexeme.clone())),
        Some(t) if t.kind == TokenKind::Number => Ok(Value::Quantity(Quantity::unitless(decimal(s)?))),
        Some(t) if t.kind == TokenKind::Symbol => {
            let i = iri_atom(s)?;
            Ok(match entity_of(&i) {
                Some(e) => Value::Entity(e),
                None => Value::Iri(i),
            })
        }
        _ => Err(unexpected(s, "a value")),
    }
}

pub fn snak(s: &Sexp) -> R<Snak> {
    match s.form() {
        Some(("ValueSnak", args)) => {
            arity(s, args, 2, 2)?;
            Ok(Snak::Value(property(&args[0])?, value(&args[1])?))
        }
        Some(("SomeValueSnak", args)) => {
            arity(s, args, 1, 1)?;
            Ok(Snak::SomeValue(property(&args[0])?))
        }
        Some(("NoValueSnak", args)) => {
            arity(s, args, 1, 1)?;
            Ok(Snak::NoValue(property(&args[0])?))
        }
        _ => Err(unexpected(s, "a snak")),
    }
}

fn is_snak_form(s: &Sexp) -> bool {
    matches!(s.form(), Some(("ValueSnak" | "SomeValueSnak" | "NoValueSnak", _)))
}

pub fn statement(s: &Sexp) -> R<Statement> {
    match s.form() {
        Some(("Statement", args)) => {
            arity(s, args, 2, 2)?;
            Ok(Statement::new(entity(&args[0])?, snak(&args[1])?))
        }
        _ => Err(unexpected(s, "a statement")),
    }
}

fn set_of<T: Ord>(s: &Sexp, head: &str, f: impl Fn(&Sexp) -> R<T>) -> R<BTreeSet<T>> {
    match s.form() {
        Some((h, args)) if h == head => args.iter().map(f).collect(),
        _ => Err(unexpected(s, &format!("a {head}"))),
    }
}

pub fn snak_set(s: &Sexp) -> R<BTreeSet<Snak>> {
    set_of(s, "SnakSet", snak)
}

pub fn reference(s: &Sexp) -> R<ReferenceRecord> {
    match s.form() {
        Some(("ReferenceRecord", args)) => {
            arity(s, args, 1, usize::MAX)?;
            ReferenceRecord::new(args.iter().map(snak).collect::<R<Vec<_>>>()?).map_err(|e| invalid(s, e.to_string()))
        }
        _ => Err(unexpected(s, "a reference record")),
    }
}

pub fn reference_set(s: &Sexp) -> R<BTreeSet<ReferenceRecord>> {
    set_of(s, "ReferenceRecordSet", reference)
}

pub fn rank(s: &Sexp) -> R<Rank> {
    match s.symbol() {
        Some("PreferredRank" | "Preferred") => Ok(Rank::Preferred),
        Some("NormalRank" | "Normal") => Ok(Rank::Normal),
        Some("DeprecatedRank" | "Deprecated") => Ok(Rank::Deprecated),
        _ => Err(unexpected(s, "a rank")),
    }
}

fn is_rank(s: &Sexp) -> bool {
    rank(s).is_ok()
}

/// `(AnnotationRecord (SnakSet …)? (ReferenceRecordSet …)? rank?)`; absent
/// parts are empty, the rank defaults to normal.
pub fn annotation(s: &Sexp) -> R<AnnotationRecord> {
    let Some(("AnnotationRecord", args)) = s.form() else {
        return Err(unexpected(s, "an annotation record"));
    };
    arity(s, args, 0, 3)?;
    let mut rec = AnnotationRecord::default();
    let mut stage = 0;
    for a in args {
        match a.form() {
            Some(("SnakSet", _)) if stage == 0 => {
                rec.qualifiers = snak_set(a)?;
                stage = 1;
            }
            Some(("ReferenceRecordSet", _)) if stage <= 1 => {
                rec.references = reference_set(a)?;
                stage = 2;
            }
            _ if is_rank(a) && stage <= 2 => {
                rec.rank = rank(a)?;
                stage = 3;
            }
            _ => return Err(unexpected(a, "SnakSet, ReferenceRecordSet or rank, in that order")),
        }
    }
    Ok(rec)
}

pub fn annotation_set(s: &Sexp) -> R<BTreeSet<AnnotationRecord>> {
    set_of(s, "AnnotationRecordSet", annotation)
}

pub fn descriptor(s: &Sexp) -> R<Descriptor> {
    match s.form() {
        Some(("Descriptor", args)) => {
            let label = optional(args.first(), text)?;
            let desc = optional(args.get(1), text)?;
            let aliases = args.iter().skip(2).map(text).collect::<R<Vec<_>>>()?;
            Ok(Descriptor::new(label, desc, aliases))
        }
        _ => Err(unexpected(s, "a descriptor")),
    }
}

/// Subject and property positions: entities first.
pub fn entity_fingerprint(s: &Sexp) -> R<Fingerprint> {
    match s.form() {
        Some(("SnakSet", _)) => Ok(Fingerprint::SnakSet(snak_set(s)?)),
        _ if is_snak_form(s) => Ok(Fingerprint::Snak(snak(s)?)),
        _ => Ok(Fingerprint::Entity(entity(s)?)),
    }
}

/// Value position: any value, or a snak-based fingerprint.
pub fn value_fingerprint(s: &Sexp) -> R<Fingerprint> {
    match s.form() {
        Some(("SnakSet", _)) => Ok(Fingerprint::SnakSet(snak_set(s)?)),
        _ if is_snak_form(s) => Ok(Fingerprint::Snak(snak(s)?)),
        _ => Ok(Fingerprint::value(value(s)?)),
    }
}

pub fn snak_mask(s: &Sexp) -> R<SnakMask> {
    let Some(("SnakMask", args)) = s.form() else {
        return Err(unexpected(s, "a SnakMask"));
    };
    args.iter()
        .map(|a| match a.symbol() {
            Some("ValueSnak") => Ok(SnakKind::Value),
            Some("SomeValueSnak") => Ok(SnakKind::SomeValue),
            Some("NoValueSnak") => Ok(SnakKind::NoValue),
            _ => Err(unexpected(a, "a snak kind")),
        })
        .collect()
}

pub fn filter_pattern(s: &Sexp) -> R<FilterPattern> {
    let Some(("FilterPattern", args)) = s.form() else {
        return Err(unexpected(s, "a filter pattern"));
    };
    arity(s, args, 0, 4)?;
    let subject = optional(args.first(), entity_fingerprint)?;
    let property = optional(args.get(1), entity_fingerprint)?;
    let value = optional(args.get(2), value_fingerprint)?;
    let snak_kinds = match args.get(3) {
        Some(m) => snak_mask(m)?,
        None if value.is_some() => SnakMask::VALUE,
        None => SnakMask::ALL,
    };
    Ok(FilterPattern { subject, property, value, snak_kinds })
}

pub fn object(s: &Sexp) -> R<Object> {
    let Some((head, args)) = s.form() else {
        if is_rank(s) {
            return Ok(Object::Rank(rank(s)?));
        }
        return Ok(Object::Value(value(s)?));
    };
    Ok(match head {
        "IRI" | "Item" | "Property" | "Text" | "String" | "Quantity" | "Time" => Object::Value(value(s)?),
        "ValueSnak" | "SomeValueSnak" | "NoValueSnak" => Object::Snak(snak(s)?),
        "Statement" => Object::Statement(statement(s)?),
        "ReferenceRecord" => Object::ReferenceRecord(reference(s)?),
        "SnakSet" => Object::SnakSet(snak_set(s)?),
        "ReferenceRecordSet" => Object::ReferenceRecordSet(reference_set(s)?),
        "AnnotationRecord" => Object::AnnotationRecord(annotation(s)?),
        "AnnotationRecordSet" => Object::AnnotationRecordSet(annotation_set(s)?),
        "Descriptor" => Object::Descriptor(descriptor(s)?),
        "FilterPattern" => Object::FilterPattern(filter_pattern(s)?),
        "SnakMask" => Object::SnakMask(snak_mask(s)?),
        "AnnotatedStatement" => {
            arity(s, args, 1, usize::MAX)?;
            let stmt = statement(&args[0])?;
            let recs = args[1..].iter().map(annotation).collect::<R<BTreeSet<_>>>()?;
            Object::AnnotatedStatement(stmt, recs)
        }
        "EntityDescriptor" => {
            arity(s, args, 2, 2)?;
            Object::EntityDescriptor(entity(&args[0])?, descriptor(&args[1])?)
        }
        _ => return Err(unexpected(s, "a model object")),
    })
}
