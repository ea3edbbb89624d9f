use crate::graph::{PatternTerm, SelectQuery, Solutions, Term, TriplePattern, ValuesBlock};
use crate::model::{Fingerprint, FilterPattern, Snak, SnakKind, Statement, Value};

use super::{MappingSpec, PropertyRule, ValueCodec};

/// A filter pattern in source vocabulary, or the reason it cannot match
/// anything there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Translation {
    Query(SelectQuery),
    Unsupported(String),
}

fn var(name: &str) -> PatternTerm {
    PatternTerm::var(name)
}

/// Source triple patterns requiring `node` to have every snak in `fp`.
fn fingerprint_patterns(
    spec: &MappingSpec,
    fp: &Fingerprint,
    node: &str,
    out: &mut Vec<TriplePattern>,
) -> Result<(), String> {
    let snaks = fp.snak_list().ok_or("expected a snak fingerprint")?;
    for snak in snaks {
        let Snak::Value(p, v) = snak else { return Err("only value snaks can fingerprint".into()) };
        let rule = spec.rule(p).ok_or_else(|| format!("property {} is not mapped", p.iri()))?;
        let term = rule
            .codec
            .encode(v, spec)
            .ok_or_else(|| format!("{v:?} has no counterpart under codec {}", rule.codec.name()))?;
        out.push(TriplePattern::new(var(node), rule.predicate.clone(), term));
    }
    Ok(())
}

fn as_value(fp: &Fingerprint) -> Option<Value> {
    match fp {
        Fingerprint::Entity(e) => Some(Value::Entity(e.clone())),
        Fingerprint::Value(v) => Some(v.clone()),
        _ => None,
    }
}

/// Rewrites a valid pattern into a query over `?s ?p ?o` in the source.
///
/// Constant parts go into one `VALUES (?s ?p ?o)` block, one row per
/// candidate source predicate. Snak fingerprints become extra triple
/// patterns on `?s` or `?o`.
pub fn translate_pattern(
    spec: &MappingSpec,
    pattern: &FilterPattern,
    limit: Option<usize>,
    offset: Option<usize>,
) -> Translation {
    match build(spec, pattern) {
        Ok(mut q) => {
            q.limit = limit;
            q.offset = offset.filter(|o| *o > 0);
            Translation::Query(q)
        }
        Err(reason) => Translation::Unsupported(reason),
    }
}

fn build(spec: &MappingSpec, pattern: &FilterPattern) -> Result<SelectQuery, String> {
    if !pattern.snak_kinds.contains(SnakKind::Value) {
        return Err("mapped sources hold only value snaks".into());
    }
    let mut rules: Vec<&PropertyRule> = match pattern.property_constant() {
        Some(p) => vec![spec.rule(p).ok_or_else(|| format!("property {} is not mapped", p.iri()))?],
        None => spec.property_rules.iter().collect(),
    };
    let mut aux = Vec::new();
    let subject = match &pattern.subject {
        None => None,
        Some(Fingerprint::Entity(e)) => {
            Some(Term::Iri(spec.to_source(e).ok_or_else(|| format!("no entity rule for {}", e.iri()))?))
        }
        Some(fp @ (Fingerprint::Snak(_) | Fingerprint::SnakSet(_))) => {
            fingerprint_patterns(spec, fp, "s", &mut aux)?;
            None
        }
        Some(Fingerprint::Value(_)) => return Err("a value cannot be a subject".into()),
    };
    let mut objects: Vec<(&PropertyRule, Option<Term>)> = Vec::new();
    match &pattern.value {
        None => objects.extend(rules.iter().map(|r| (*r, None))),
        Some(fp @ (Fingerprint::Snak(_) | Fingerprint::SnakSet(_))) => {
            fingerprint_patterns(spec, fp, "o", &mut aux)?;
            rules.retain(|r| r.codec == ValueCodec::Item);
            objects.extend(rules.iter().map(|r| (*r, None)));
        }
        Some(fp) => {
            let v = as_value(fp).expect("constant fingerprint");
            objects.extend(rules.iter().filter_map(|r| r.codec.encode(&v, spec).map(|t| (*r, Some(t)))));
        }
    }
    if objects.is_empty() {
        return Err("no mapped property can hold the requested value".into());
    }
    let mut vars = vec!["p".to_string()];
    if subject.is_some() {
        vars.insert(0, "s".into());
    }
    let has_object = objects.iter().any(|(_, o)| o.is_some());
    if has_object {
        vars.push("o".into());
    }
    let rows = objects
        .into_iter()
        .map(|(r, o)| {
            let mut row = Vec::with_capacity(3);
            if let Some(s) = &subject {
                row.push(Some(s.clone()));
            }
            row.push(Some(Term::Iri(r.predicate.clone())));
            if has_object {
                row.push(o);
            }
            row
        })
        .collect();
    let mut patterns = vec![TriplePattern::new(var("s"), var("p"), var("o"))];
    patterns.extend(aux);
    let mut q = SelectQuery::new(&["s", "p", "o"], patterns);
    q.distinct = true;
    q.values = Some(ValuesBlock { vars, rows });
    Ok(q)
}

/// Statements for the bindings of a translated query, with one diagnostic
/// per skipped row.
pub fn translate_results(spec: &MappingSpec, sols: &Solutions) -> (Vec<Statement>, Vec<String>) {
    let (cs, cp, co) = (sols.column("s"), sols.column("p"), sols.column("o"));
    let mut out = Vec::new();
    let mut diagnostics = Vec::new();
    for row in &sols.rows {
        let cell = |c: Option<usize>| c.and_then(|i| row[i].as_ref());
        let (Some(s), Some(p), Some(o)) = (cell(cs), cell(cp), cell(co)) else {
            diagnostics.push("row without ?s ?p ?o bindings; skipped".to_string());
            continue;
        };
        let Some(subject) = s.as_iri().and_then(|i| spec.to_target(i)) else {
            diagnostics.push(format!("no entity rule for subject {s}; skipped"));
            continue;
        };
        let Some(rule) = p.as_iri().and_then(|i| spec.rule_for_predicate(i)) else {
            diagnostics.push(format!("unmapped predicate {p}; skipped"));
            continue;
        };
        match rule.codec.decode(o, spec) {
            Ok(Some(v)) => out.push(Statement::new(subject, Snak::Value(rule.property.clone(), v))),
            Ok(None) => {}
            Err(e) => diagnostics.push(format!("{} {}: {e}; skipped", s, rule.property.iri())),
        }
    }
    (out, diagnostics)
}
