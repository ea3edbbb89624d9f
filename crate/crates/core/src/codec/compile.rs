//! Query generation for the store operations.
//!
//! Variable names are fixed: `?s` subject, `?p` link or direct predicate,
//! `?st` statement node, `?ps` statement-value predicate, `?v` value and
//! `?rank` rank. Auxiliary fingerprint patterns need no variables of their
//! own since they only pair the shared variable with constants.

use super::namespace::Ns;
use super::CodecError;
use crate::graph::{PatternTerm, SelectQuery, Term, TriplePattern, ValuesBlock};
use crate::model::{Entity, FilterPattern, Fingerprint, Iri, Snak, Statement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// `wdt:` triples only: one row per truthy statement.
    Truthy,
    /// `p:`/`ps:` reification: one row per statement node.
    Full,
}

fn var(name: &str) -> PatternTerm {
    PatternTerm::var(name)
}

fn local(p: &crate::model::Property) -> Result<&str, CodecError> {
    Ns::Wd
        .local(p.iri())
        .ok_or_else(|| CodecError::Unencodable(format!("property {} is not a Wikidata property IRI", p.iri())))
}

/// `?x wdt:Q simple` for each snak of a fingerprint.
fn aux_patterns(x: &PatternTerm, snaks: &[&Snak], out: &mut Vec<TriplePattern>) -> Result<(), CodecError> {
    for s in snaks {
        let Snak::Value(p, v) = s else {
            return Err(CodecError::Pattern(crate::model::PatternError::UnsupportedFingerprint(format!(
                "fingerprint snaks must be value snaks, got {s:?}"
            ))));
        };
        out.push(TriplePattern::new(x.clone(), Ns::Wdt.iri(local(p)?), v.simple_value()));
    }
    Ok(())
}

/// Slot term for a subject or value fingerprint: a constant for entities and
/// data values, the variable otherwise (with auxiliary patterns pushed).
fn slot(fp: Option<&Fingerprint>, name: &str, aux: &mut Vec<TriplePattern>) -> Result<PatternTerm, CodecError> {
    Ok(match fp {
        None => var(name),
        Some(Fingerprint::Entity(e)) => PatternTerm::Term(Term::Iri(e.iri().clone())),
        Some(Fingerprint::Value(v)) => PatternTerm::Term(v.simple_value()),
        Some(fp) => {
            let v = var(name);
            aux_patterns(&v, &fp.snak_list().unwrap_or_default(), aux)?;
            v
        }
    })
}

fn finish(patterns: Vec<TriplePattern>, distinct: bool, limit: Option<usize>, offset: Option<usize>) -> SelectQuery {
    let mut q = SelectQuery::new(&[], patterns);
    q.projection = q.variables();
    q.distinct = distinct;
    q.limit = limit;
    q.offset = offset.filter(|o| *o > 0);
    q
}

/// Compiles a filter pattern.
///
/// At the truthy level a wildcard property becomes a predicate variable and
/// callers must drop rows whose `?p` is not a `wdt:` IRI. At the full level
/// the rows carry `?s`/`?p`/`?st` (and `?v` when the value is a snak
/// fingerprint); each statement node still has to be fetched, decoded and
/// checked with [`FilterPattern::matches_locally`], and for snak
/// fingerprints in value position its main simple value must equal `?v`.
pub fn compile_filter(
    p: &FilterPattern,
    level: Level,
    limit: Option<usize>,
    offset: Option<usize>,
) -> Result<SelectQuery, CodecError> {
    p.validate()?;
    let mut aux = Vec::new();
    let s = slot(p.subject.as_ref(), "s", &mut aux)?;
    let v = slot(p.value.as_ref(), "v", &mut aux)?;
    let prop = p.property_constant().map(local).transpose()?;
    let mut patterns = Vec::new();
    match level {
        Level::Truthy => {
            let pred = prop.map_or_else(|| var("p"), |l| Ns::Wdt.iri(l).into());
            patterns.push(TriplePattern::new(s.clone(), pred, v));
            patterns.extend(aux);
            if patterns.iter().all(|t| t.vars().next().is_none()) {
                // Nothing to project: bind ?s to the constant subject.
                let mut q = finish(patterns, true, limit, offset);
                let subject = s.as_term().cloned().expect("constant subject");
                q.values = Some(ValuesBlock { vars: vec!["s".into()], rows: vec![vec![Some(subject)]] });
                q.projection = vec!["s".into()];
                return Ok(q);
            }
        }
        Level::Full => {
            let link = prop.map_or_else(|| var("p"), |l| Ns::P.iri(l).into());
            patterns.push(TriplePattern::new(s.clone(), link, var("st")));
            if prop.is_none() {
                patterns.push(TriplePattern::new(var("st"), Ns::Wikibase.iri("rank"), var("rank")));
            }
            if p.value.is_some() {
                let ps = prop.map_or_else(|| var("ps"), |l| Ns::Ps.iri(l).into());
                patterns.push(TriplePattern::new(var("st"), ps, v));
            }
            patterns.extend(aux);
        }
    }
    let mut q = finish(patterns, true, limit, offset);
    if level == Level::Full {
        // Only the columns the caller needs; fewer columns mean fewer
        // duplicate rows.
        q.projection.retain(|x| matches!(x.as_str(), "s" | "p" | "st" | "v"));
    }
    Ok(q)
}

/// One query per statement, selecting the statement nodes that may encode
/// it. The caller fetches and decodes the nodes and keeps those decoding to
/// the statement itself.
pub fn compile_annotations(stmts: &[Statement]) -> Result<Vec<SelectQuery>, CodecError> {
    stmts
        .iter()
        .map(|stmt| {
            let p = local(stmt.snak.property())?;
            let subject: Term = stmt.subject.iri().clone().into();
            let mut patterns = vec![TriplePattern::new(subject, Ns::P.iri(p), var("st"))];
            patterns.push(match &stmt.snak {
                Snak::Value(_, v) => TriplePattern::new(var("st"), Ns::Ps.iri(p), v.simple_value()),
                Snak::SomeValue(_) => TriplePattern::new(var("st"), Ns::Ps.iri(p), var("x")),
                Snak::NoValue(_) => TriplePattern::new(var("st"), Ns::Rdf.iri("type"), Ns::Wdno.iri(p)),
            });
            let mut q = finish(patterns, true, None, None);
            q.projection = vec!["st".into()];
            Ok(q)
        })
        .collect()
}

/// All triples whose subject is one of `nodes`, as `?n ?pp ?o` rows.
pub fn describe_query(nodes: &[Iri]) -> SelectQuery {
    let mut q = finish(vec![TriplePattern::new(var("n"), var("pp"), var("o"))], false, None, None);
    q.values = Some(ValuesBlock {
        vars: vec!["n".into()],
        rows: nodes.iter().map(|n| vec![Some(Term::Iri(n.clone()))]).collect(),
    });
    q
}

/// Label, description and alias triples of `entities`, as `?e ?pp ?o` rows
/// in every language; the caller keeps the requested one.
pub fn descriptor_query(entities: &[Entity]) -> SelectQuery {
    let preds = [Ns::Rdfs.iri("label"), Ns::Schema.iri("description"), Ns::Skos.iri("altLabel")];
    let mut q = finish(vec![TriplePattern::new(var("e"), var("pp"), var("o"))], false, None, None);
    q.values = Some(ValuesBlock {
        vars: vec!["e".into(), "pp".into()],
        rows: entities
            .iter()
            .flat_map(|e| preds.iter().map(move |p| vec![Some(Term::Iri(e.iri().clone())), Some(Term::Iri(p.clone()))]))
            .collect(),
    });
    q
}
