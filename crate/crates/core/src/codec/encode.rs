use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use super::namespace::{entity_of, is_skolem, wikibase, Ns};
use super::CodecError;
use crate::graph::{Graph, Literal, Term, Triple};
use crate::model::{
    content_digest, AnnotationRecord, Descriptor, Entity, Iri, Property, Quantity, Rank, ReferenceRecord, Snak,
    Statement, TimeValue, Value,
};

/// A statement with one of its annotation records, as it sits in a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EncodedStatement {
    pub statement: Statement,
    pub annotation: AnnotationRecord,
    pub best: bool,
}

impl EncodedStatement {
    /// Best unless deprecated, as for a statement encoded on its own.
    pub fn new(statement: Statement, annotation: AnnotationRecord) -> Self {
        let best = annotation.rank != Rank::Deprecated;
        EncodedStatement { statement, annotation, best }
    }
}

fn hash_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

pub fn statement_node(stmt: &Statement, annotation: &AnnotationRecord) -> Iri {
    Ns::Wds.iri(&content_digest(&(stmt, annotation)))
}

pub fn value_node(v: &Value) -> Iri {
    Ns::Wdv.iri(&content_digest(v))
}

pub fn reference_node(r: &ReferenceRecord) -> Iri {
    Ns::Wdref.iri(&content_digest(r))
}

/// Skolem IRI standing for the unknown value of a main snak.
pub fn some_value_node(stmt: &Statement) -> Iri {
    Ns::Wdgenid.iri(&content_digest(stmt))
}

/// Skolem IRI for a some-value snak inside a qualifier set or reference.
fn nested_some_value_node(container: &Iri, p: &Property) -> Iri {
    Ns::Wdgenid.iri(&hash_hex(&[container.as_str(), p.iri().as_str()]))
}

fn property_local(p: &Property) -> Result<&str, CodecError> {
    match entity_of(p.iri()) {
        Some(Entity::Property(_)) => Ok(Ns::Wd.local(p.iri()).expect("wd local name")),
        _ => Err(CodecError::Unencodable(format!("property {} is not a Wikidata property IRI", p.iri()))),
    }
}

fn check_entity(e: &Entity) -> Result<(), CodecError> {
    if entity_of(e.iri()).as_ref() == Some(e) {
        Ok(())
    } else {
        Err(CodecError::Unencodable(format!("{e:?} is not a Wikidata entity of that kind")))
    }
}

fn check_value(v: &Value) -> Result<(), CodecError> {
    match v {
        Value::Entity(e) => check_entity(e),
        Value::Iri(i) if entity_of(i).is_some() || is_skolem(i) => Err(CodecError::Unencodable(format!(
            "IRI value {i} would read back as an entity or an unknown value"
        ))),
        _ => Ok(()),
    }
}

fn decimal_literal(d: &crate::model::Decimal) -> Term {
    Term::Literal(Literal::typed(d.as_str(), Ns::Xsd.iri("decimal")))
}

fn integer_literal(n: i64) -> Term {
    Term::Literal(Literal::typed(n.to_string(), Ns::Xsd.iri("integer")))
}

/// Triples of a deep-value node.
pub fn deep_value_triples(v: &Value, out: &mut BTreeSet<Triple>) {
    let node = value_node(v);
    let wb = |l: &str| Ns::Wikibase.iri(l);
    match v {
        Value::Quantity(q) => quantity_triples(&node, q, out),
        Value::Time(t) => {
            out.insert(Triple::new(node.clone(), wb("timeValue"), v.simple_value()));
            out.insert(Triple::new(node.clone(), wb("timePrecision"), integer_literal(t.precision().into())));
            out.insert(Triple::new(node.clone(), wb("timeTimezone"), integer_literal(t.timezone().into())));
            time_calendar(&node, t, out);
        }
        _ => {}
    }
}

fn quantity_triples(node: &Iri, q: &Quantity, out: &mut BTreeSet<Triple>) {
    let wb = |l: &str| Ns::Wikibase.iri(l);
    out.insert(Triple::new(node.clone(), wb("quantityAmount"), decimal_literal(q.amount())));
    if let Some(u) = q.unit() {
        out.insert(Triple::new(node.clone(), wb("quantityUnit"), u.iri().clone()));
    }
    if let Some(lo) = q.lower() {
        out.insert(Triple::new(node.clone(), wb("quantityLowerBound"), decimal_literal(lo)));
    }
    if let Some(hi) = q.upper() {
        out.insert(Triple::new(node.clone(), wb("quantityUpperBound"), decimal_literal(hi)));
    }
}

fn time_calendar(node: &Iri, t: &TimeValue, out: &mut BTreeSet<Triple>) {
    if let Some(c) = t.calendar() {
        out.insert(Triple::new(node.clone(), Ns::Wikibase.iri("timeCalendarModel"), c.iri().clone()));
    }
}

/// Snak attached to `node` through the `simple`/`deep` namespaces; no-value
/// snaks become `node rdf:type wdno:P`.
fn snak_triples(
    node: &Iri,
    snak: &Snak,
    simple: Ns,
    deep: Ns,
    some_value: impl Fn(&Property) -> Iri,
    out: &mut BTreeSet<Triple>,
) -> Result<(), CodecError> {
    let local = property_local(snak.property())?;
    match snak {
        Snak::Value(_, v) => {
            check_value(v)?;
            out.insert(Triple::new(node.clone(), simple.iri(local), v.simple_value()));
            if v.is_deep() {
                out.insert(Triple::new(node.clone(), deep.iri(local), value_node(v)));
                deep_value_triples(v, out);
            }
        }
        Snak::SomeValue(p) => {
            out.insert(Triple::new(node.clone(), simple.iri(local), some_value(p)));
        }
        Snak::NoValue(_) => {
            out.insert(Triple::new(node.clone(), Ns::Rdf.iri("type"), Ns::Wdno.iri(local)));
        }
    }
    Ok(())
}

/// The `wdt:` triple of a statement, ignoring rank. No-value snaks have none.
pub fn truthy_triple(stmt: &Statement) -> Option<Triple> {
    let local = Ns::Wd.local(stmt.snak.property().iri())?;
    let object = match &stmt.snak {
        Snak::Value(_, v) => v.simple_value(),
        Snak::SomeValue(_) => Term::Iri(some_value_node(stmt)),
        Snak::NoValue(_) => return None,
    };
    Some(Triple::new(stmt.subject.iri().clone(), Ns::Wdt.iri(local), object))
}

pub fn encode(es: &EncodedStatement) -> Result<BTreeSet<Triple>, CodecError> {
    let mut out = BTreeSet::new();
    encode_into(es, &mut out)?;
    Ok(out)
}

fn encode_into(es: &EncodedStatement, out: &mut BTreeSet<Triple>) -> Result<(), CodecError> {
    let stmt = &es.statement;
    let ann = &es.annotation;
    check_entity(&stmt.subject)?;
    let local = property_local(stmt.snak.property())?;
    let node = statement_node(stmt, ann);
    let subject = stmt.subject.iri().clone();

    if ann.rank != Rank::Deprecated {
        out.extend(truthy_triple(stmt));
    }
    out.insert(Triple::new(subject, Ns::P.iri(local), node.clone()));
    snak_triples(&node, &stmt.snak, Ns::Ps, Ns::Psv, |_| some_value_node(stmt), out)?;

    for q in &ann.qualifiers {
        snak_triples(&node, q, Ns::Pq, Ns::Pqv, |p| nested_some_value_node(&node, p), out)?;
    }
    for r in &ann.references {
        let rnode = reference_node(r);
        out.insert(Triple::new(node.clone(), Ns::Prov.iri("wasDerivedFrom"), rnode.clone()));
        for s in r.snaks() {
            snak_triples(&rnode, s, Ns::Pr, Ns::Prv, |p| nested_some_value_node(&rnode, p), out)?;
        }
    }
    out.insert(Triple::new(node.clone(), Ns::Wikibase.iri("rank"), wikibase::rank_iri(ann.rank)));
    if es.best {
        out.insert(Triple::new(node, Ns::Rdf.iri("type"), Ns::Wikibase.iri("BestRank")));
    }
    Ok(())
}

pub fn encode_descriptor(entity: &Entity, d: &Descriptor) -> Result<BTreeSet<Triple>, CodecError> {
    check_entity(entity)?;
    let s = entity.iri().clone();
    let lit = |t: &crate::model::TextValue| Term::Literal(Literal::lang(t.content(), t.language()));
    let mut out = BTreeSet::new();
    if let Some(l) = &d.label {
        out.insert(Triple::new(s.clone(), Ns::Rdfs.iri("label"), lit(l)));
    }
    if let Some(x) = &d.description {
        out.insert(Triple::new(s.clone(), Ns::Schema.iri("description"), lit(x)));
    }
    for a in d.aliases() {
        out.insert(Triple::new(s.clone(), Ns::Skos.iri("altLabel"), lit(a)));
    }
    Ok(out)
}

/// Encodes a whole dataset, marking as best every non-deprecated record
/// with no strictly higher-ranked record for the same subject and property.
pub fn encode_all<'a>(
    records: impl IntoIterator<Item = (&'a Statement, &'a AnnotationRecord)>,
    descriptors: impl IntoIterator<Item = (&'a Entity, &'a Descriptor)>,
) -> Result<Graph, CodecError> {
    let records: Vec<_> = records.into_iter().collect();
    let mut top: BTreeMap<(&Entity, &Property), Rank> = BTreeMap::new();
    for (s, a) in &records {
        let r = top.entry((&s.subject, s.snak.property())).or_insert(a.rank);
        *r = (*r).max(a.rank);
    }
    let mut out = BTreeSet::new();
    for (s, a) in &records {
        let best = a.rank != Rank::Deprecated && top[&(&s.subject, s.snak.property())] == a.rank;
        encode_into(&EncodedStatement { statement: (*s).clone(), annotation: (*a).clone(), best }, &mut out)?;
    }
    for (e, d) in descriptors {
        out.extend(encode_descriptor(e, d)?);
    }
    Ok(out.into_iter().collect())
}
