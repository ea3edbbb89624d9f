use std::collections::{BTreeMap, BTreeSet};

use super::encode::{truthy_triple, EncodedStatement};
use super::namespace::{entity_of, is_skolem, wikibase, Ns};
use crate::graph::{Graph, Literal, Term, Triple};
use crate::model::{
    AnnotationRecord, Decimal, Descriptor, Entity, Iri, Item, Property, Quantity, Rank, ReferenceRecord, Snak,
    Statement, TextValue, TimeValue, Timestamp, Value,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedStatement {
    /// The statement node, absent for statements known only from a truthy
    /// triple.
    pub node: Option<Iri>,
    pub encoded: EncodedStatement,
}

#[derive(Clone, Debug, Default)]
pub struct Decoded {
    pub statements: Vec<DecodedStatement>,
    /// Entity, then language tag.
    pub descriptors: BTreeMap<Entity, BTreeMap<String, Descriptor>>,
    pub diagnostics: Vec<String>,
}

impl Decoded {
    pub fn encoded(&self) -> impl Iterator<Item = &EncodedStatement> {
        self.statements.iter().map(|d| &d.encoded)
    }
}

fn literal_decimal(l: &Literal) -> Option<Decimal> {
    let numeric = l.has_datatype(Ns::Xsd, "decimal") || l.has_datatype(Ns::Xsd, "integer");
    numeric.then(|| l.lexical().parse().ok()).flatten()
}

fn literal_integer<T: std::str::FromStr>(t: &Term) -> Option<T> {
    t.as_literal().and_then(|l| l.lexical().parse().ok())
}

/// A simple value with no deep counterpart: decimals become unit-less
/// quantities, date-times become times (day precision at midnight, second
/// precision otherwise, UTC, no calendar).
pub fn lift(t: &Term) -> Result<Option<Value>, String> {
    match t {
        Term::Iri(i) if is_skolem(i) => Ok(None),
        Term::Iri(i) => Ok(Some(match entity_of(i) {
            Some(e) => Value::Entity(e),
            None => Value::Iri(i.clone()),
        })),
        Term::Literal(l) => {
            if let Some(lang) = l.language() {
                return TextValue::new(l.lexical(), lang).map(|t| Some(Value::Text(t))).map_err(|e| e.to_string());
            }
            if l.has_datatype(Ns::Xsd, "string") {
                return Ok(Some(Value::String(l.lexical().to_string())));
            }
            if let Some(d) = literal_decimal(l) {
                return Ok(Some(Value::Quantity(Quantity::unitless(d))));
            }
            if l.has_datatype(Ns::Xsd, "dateTime") {
                let ts: Timestamp = l.lexical().parse().map_err(|e: crate::model::ModelError| e.to_string())?;
                let precision = if ts.is_midnight() { TimeValue::DAY } else { TimeValue::SECOND };
                return TimeValue::new(ts, precision, 0, None).map(|t| Some(Value::Time(t))).map_err(|e| e.to_string());
            }
            Err(format!("cannot lift literal {t}"))
        }
    }
}

/// Reads a `wdv:` node back into a quantity or time value.
fn deep_value(g: &Graph, node: &Iri) -> Result<Value, String> {
    let mut props: BTreeMap<&str, &Term> = BTreeMap::new();
    for t in g.pattern(Some(node), None, None) {
        if let Some(local) = Ns::Wikibase.local(&t.predicate) {
            props.insert(local, &t.object);
        }
    }
    let dec = |k: &str| -> Result<Option<Decimal>, String> {
        match props.get(k) {
            None => Ok(None),
            Some(t) => t
                .as_literal()
                .and_then(literal_decimal)
                .map(Some)
                .ok_or_else(|| format!("{node:?}: bad {k} {t}")),
        }
    };
    let item = |k: &str| -> Result<Option<Item>, String> {
        match props.get(k) {
            None => Ok(None),
            Some(Term::Iri(i)) => Ok(Some(Item(i.clone()))),
            Some(t) => Err(format!("{node:?}: bad {k} {t}")),
        }
    };
    if let Some(amount) = dec("quantityAmount")? {
        let q = Quantity::new(amount, item("quantityUnit")?, dec("quantityLowerBound")?, dec("quantityUpperBound")?)
            .map_err(|e| e.to_string())?;
        return Ok(Value::Quantity(q));
    }
    if let Some(tv) = props.get("timeValue") {
        let ts: Timestamp = tv
            .as_literal()
            .ok_or_else(|| format!("{node:?}: bad timeValue"))?
            .lexical()
            .parse()
            .map_err(|e: crate::model::ModelError| e.to_string())?;
        let precision = props.get("timePrecision").and_then(|t| literal_integer(t)).unwrap_or(TimeValue::DAY);
        let tz = props.get("timeTimezone").and_then(|t| literal_integer(t)).unwrap_or(0);
        let t = TimeValue::new(ts, precision, tz, item("timeCalendarModel")?).map_err(|e| e.to_string())?;
        return Ok(Value::Time(t));
    }
    Err(format!("{node:?}: neither a quantity nor a time node"))
}

/// Snaks hanging off `node` in the given simple/deep namespaces, grouped by
/// property, plus no-value snaks from `rdf:type wdno:P` (minus `skip_novalue`).
fn node_snaks(
    g: &Graph,
    node: &Iri,
    simple: Ns,
    deep: Ns,
    skip_novalue: Option<&str>,
    diags: &mut Vec<String>,
) -> BTreeSet<Snak> {
    let mut simple_vals: BTreeMap<String, Vec<Term>> = BTreeMap::new();
    let mut deep_vals: BTreeMap<String, Vec<Iri>> = BTreeMap::new();
    let mut out = BTreeSet::new();
    let rdf_type = Ns::Rdf.iri("type");
    for t in g.pattern(Some(node), None, None) {
        match Ns::split(t.predicate.as_str()) {
            Some((ns, local)) if ns == simple => simple_vals.entry(local.to_string()).or_default().push(t.object.clone()),
            Some((ns, local)) if ns == deep => match &t.object {
                Term::Iri(i) => deep_vals.entry(local.to_string()).or_default().push(i.clone()),
                other => diags.push(format!("{node:?}: deep value link to a literal {other}")),
            },
            _ if t.predicate == rdf_type => {
                if let Some(local) = t.object.as_iri().and_then(|i| Ns::Wdno.local(i)) {
                    if Some(local) != skip_novalue {
                        out.insert(Snak::NoValue(Property(Ns::Wd.iri(local))));
                    }
                }
            }
            _ => {}
        }
    }
    let keys: BTreeSet<&String> = simple_vals.keys().chain(deep_vals.keys()).collect();
    for local in keys {
        let prop = Property(Ns::Wd.iri(local));
        let mut explained = BTreeSet::new();
        for d in deep_vals.get(local).into_iter().flatten() {
            match deep_value(g, d) {
                Ok(v) => {
                    explained.insert(v.simple_value());
                    out.insert(Snak::Value(prop.clone(), v));
                }
                Err(e) => diags.push(e),
            }
        }
        for s in simple_vals.get(local).into_iter().flatten() {
            if explained.contains(s) {
                continue;
            }
            match lift(s) {
                Ok(Some(v)) => {
                    out.insert(Snak::Value(prop.clone(), v));
                }
                Ok(None) => {
                    out.insert(Snak::SomeValue(prop.clone()));
                }
                Err(e) => diags.push(format!("{node:?}: {e}")),
            }
        }
    }
    out
}

fn decode_node(g: &Graph, subject: Entity, local: &str, node: &Iri, diags: &mut Vec<String>) -> Option<EncodedStatement> {
    let prop = Property(Ns::Wd.iri(local));
    let main: BTreeSet<Snak> = node_snaks(g, node, Ns::Ps, Ns::Psv, None, diags)
        .into_iter()
        .filter(|s| s.property() == &prop && !matches!(s, Snak::NoValue(_)))
        .collect();
    let rdf_type = Ns::Rdf.iri("type");
    let snak = match main.len() {
        1 => main.into_iter().next().unwrap(),
        0 if g.contains(&Triple::new(node.clone(), rdf_type.clone(), Ns::Wdno.iri(local))) => Snak::NoValue(prop.clone()),
        0 => {
            diags.push(format!("{node:?}: p:{local} link without ps:{local} or wdno:{local}; skipped"));
            return None;
        }
        n => {
            diags.push(format!("{node:?}: {n} main values for {local}; skipped"));
            return None;
        }
    };
    let skip = matches!(snak, Snak::NoValue(_)).then_some(local);
    let qualifiers = node_snaks(g, node, Ns::Pq, Ns::Pqv, skip, diags);
    let mut references = BTreeSet::new();
    for t in g.pattern(Some(node), Some(&Ns::Prov.iri("wasDerivedFrom")), None) {
        let Some(rnode) = t.object.as_iri() else { continue };
        let snaks = node_snaks(g, rnode, Ns::Pr, Ns::Prv, None, diags);
        match ReferenceRecord::new(snaks) {
            Ok(r) => {
                references.insert(r);
            }
            Err(_) => diags.push(format!("{rnode:?}: empty reference; skipped")),
        }
    }
    let rank = g
        .pattern(Some(node), Some(&Ns::Wikibase.iri("rank")), None)
        .find_map(|t| t.object.as_iri().and_then(wikibase::rank_of))
        .unwrap_or_default();
    let best = g.contains(&Triple::new(node.clone(), rdf_type, Ns::Wikibase.iri("BestRank")));
    Some(EncodedStatement {
        statement: Statement::new(subject, snak),
        annotation: AnnotationRecord { qualifiers, references, rank },
        best,
    })
}

pub fn decode(g: &Graph) -> Decoded {
    let mut out = Decoded::default();
    let mut explained: BTreeSet<Triple> = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for t in g.iter() {
        let Some((ns, local)) = Ns::split(t.predicate.as_str()) else { continue };
        match ns {
            Ns::P => {
                let Term::Iri(node) = &t.object else { continue };
                let Some(subject) = entity_of(&t.subject) else {
                    out.diagnostics.push(format!("statement link from non-entity {:?}", t.subject));
                    continue;
                };
                if !seen.insert((t.subject.clone(), local, node.clone())) {
                    continue;
                }
                if let Some(es) = decode_node(g, subject, local, node, &mut out.diagnostics) {
                    if es.annotation.rank != Rank::Deprecated {
                        explained.extend(truthy_triple(&es.statement));
                    }
                    out.statements.push(DecodedStatement { node: Some(node.clone()), encoded: es });
                }
            }
            Ns::Rdfs | Ns::Schema | Ns::Skos => {
                let field = match (ns, local) {
                    (Ns::Rdfs, "label") => 0,
                    (Ns::Schema, "description") => 1,
                    (Ns::Skos, "altLabel") => 2,
                    _ => continue,
                };
                let (Some(e), Some(l)) = (entity_of(&t.subject), t.object.as_literal()) else { continue };
                let Some(lang) = l.language() else { continue };
                let Ok(text) = TextValue::new(l.lexical(), lang) else { continue };
                let d = out.descriptors.entry(e).or_default().entry(lang.to_string()).or_default();
                let slot = match field {
                    0 => &mut d.label,
                    1 => &mut d.description,
                    _ => {
                        d.merge(Descriptor::new(None, None, [text]));
                        continue;
                    }
                };
                match slot {
                    Some(old) if *old <= text => {}
                    _ => *slot = Some(text),
                }
            }
            _ => {}
        }
    }
    let wdt: Vec<&Triple> = g.iter().filter(|t| Ns::Wdt.local(&t.predicate).is_some()).collect();
    let mut truthy_only = BTreeSet::new();
    for t in wdt {
        if explained.contains(t) {
            continue;
        }
        let local = Ns::Wdt.local(&t.predicate).unwrap();
        let Some(subject) = entity_of(&t.subject) else {
            out.diagnostics.push(format!("truthy triple from non-entity {:?}", t.subject));
            continue;
        };
        let prop = Property(Ns::Wd.iri(local));
        let snak = match lift(&t.object) {
            Ok(Some(v)) => Snak::Value(prop, v),
            Ok(None) => Snak::SomeValue(prop),
            Err(e) => {
                out.diagnostics.push(e);
                continue;
            }
        };
        let mut es = EncodedStatement::new(Statement::new(subject, snak), AnnotationRecord::default());
        es.best = true;
        truthy_only.insert(es);
    }
    out.statements.extend(truthy_only.into_iter().map(|encoded| DecodedStatement { node: None, encoded }));
    out.statements.sort_by(|a, b| a.encoded.cmp(&b.encoded).then_with(|| a.node.cmp(&b.node)));
    out
}
