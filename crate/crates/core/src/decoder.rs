//! SPARQL over the truthy vocabulary, answered through `filter`.
//!
//! A decodable query has one main triple pattern, whose predicate is a
//! `wdt:` property or a variable, plus any number of auxiliary patterns
//! `?x wdt:P c` that fingerprint the main pattern's subject or object
//! variable. [`answer`] gives the same solutions as evaluating the query over
//! the `wdt:` triples of the store's statements, up to row order.

use std::collections::{BTreeMap, HashSet};

use crate::codec::{lift, truthy_triple, Ns};
use crate::graph::{sparql, PatternTerm, SelectQuery, Solutions, SparqlError, Term, Triple, TriplePattern};
use crate::model::{Entity, FilterPattern, Fingerprint, Property, Rank, Snak, Statement, Value};
use crate::store::{Store, StoreError};
use crate::Position;

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error(transparent)]
    Syntax(#[from] SparqlError),
    #[error("{message} at {position}")]
    Unsupported { message: String, position: Position },
}

#[derive(Debug, thiserror::Error)]
pub enum AnswerError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Which part of a truthy triple a variable stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    Subject,
    Property,
    Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedQuery {
    /// `None` when some constant can never occur in a truthy triple.
    pub pattern: Option<FilterPattern>,
    /// The main triple pattern; its constants are rechecked against each
    /// truthy triple.
    pub main: TriplePattern,
    /// Output columns in order, with what each carries. Variables that the
    /// main pattern does not mention stay unbound.
    pub projection: Vec<(String, Option<Column>)>,
    pub distinct: bool,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

fn unsupported(message: impl Into<String>, position: Position) -> DecodeError {
    DecodeError::Unsupported { message: message.into(), position }
}

/// Position of the first `word` token in `text`, ignoring case.
fn keyword_position(text: &str, word: &str) -> Position {
    for (i, line) in text.lines().enumerate() {
        let upper = line.to_uppercase();
        let mut from = 0;
        while let Some(at) = upper[from..].find(word).map(|a| a + from) {
            let before = upper[..at].chars().next_back();
            let after = upper[at + word.len()..].chars().next();
            let boundary = |c: Option<char>| c.is_none_or(|c| !c.is_alphanumeric() && c != '_');
            if boundary(before) && boundary(after) {
                return Position { line: i + 1, col: upper[..at].chars().count() + 1 };
            }
            from = at + word.len();
        }
    }
    Position { line: 1, col: 1 }
}

fn wdt_property(t: &PatternTerm) -> Option<Property> {
    let iri = t.as_term()?.as_iri()?;
    let local = Ns::Wdt.local(iri)?;
    match crate::codec::namespace::entity_of(&Ns::Wd.iri(local))? {
        Entity::Property(p) => Some(p),
        Entity::Item(_) => None,
    }
}

/// The value whose simple value is exactly `t`, if there is one.
fn exact_value(t: &Term) -> Option<Value> {
    lift(t).ok().flatten().filter(|v| &v.simple_value() == t)
}

/// `?x wdt:P c` with `x` one of `vars`.
fn aux_target<'a>(p: &'a TriplePattern, vars: &[&str]) -> Option<&'a str> {
    let v = p.subject.as_var()?;
    (vars.contains(&v) && wdt_property(&p.predicate).is_some() && p.object.as_term().is_some()).then_some(v)
}

/// Picks the main pattern: the first one, preferring those with a variable
/// object, under which every other pattern is auxiliary.
fn choose_main(q: &SelectQuery) -> Option<usize> {
    let fits = |i: usize| {
        let m = &q.patterns[i];
        let predicate_ok = m.predicate.as_var().is_some() || wdt_property(&m.predicate).is_some();
        let vars: Vec<&str> = [&m.subject, &m.object].into_iter().filter_map(|t| t.as_var()).collect();
        predicate_ok
            && q.patterns.iter().enumerate().all(|(j, p)| j == i || aux_target(p, &vars).is_some())
    };
    let order = (0..q.patterns.len()).filter(|i| q.patterns[*i].object.as_var().is_some()).chain(0..q.patterns.len());
    order.into_iter().find(|i| fits(*i))
}

pub fn decode(text: &str) -> Result<DecodedQuery, DecodeError> {
    let (q, positions) = sparql::parse_located(text)?;
    if q.values.is_some() {
        return Err(unsupported("VALUES unsupported", keyword_position(text, "VALUES")));
    }
    if q.patterns.is_empty() {
        return Err(unsupported("a query needs one triple pattern", keyword_position(text, "WHERE")));
    }
    let Some(main_at) = choose_main(&q) else {
        return Err(explain_rejection(&q, &positions));
    };
    let main = q.patterns[main_at].clone();
    let mut pattern = Some(FilterPattern::any());
    let mut restrict = |f: &mut dyn FnMut(FilterPattern) -> Option<FilterPattern>| {
        pattern = pattern.take().and_then(&mut *f);
    };

    if let Some(t) = main.subject.as_term() {
        let entity = t.as_iri().and_then(crate::codec::namespace::entity_of);
        restrict(&mut |p| entity.clone().map(|e| p.with_subject(e)));
    }
    if let Some(prop) = wdt_property(&main.predicate) {
        restrict(&mut |p| Some(p.with_property(prop.clone())));
    }
    if let Some(t) = main.object.as_term() {
        // Entities, IRIs and strings identify their value; other literals are
        // left to the recheck against the truthy triple.
        match exact_value(t) {
            Some(v @ (Value::Entity(_) | Value::Iri(_) | Value::String(_) | Value::Text(_))) => {
                restrict(&mut |p| Some(p.with_value(Fingerprint::value(v.clone()))))
            }
            _ => {}
        }
    }

    let mut fingerprints: BTreeMap<&str, Vec<Snak>> = BTreeMap::new();
    for (j, p) in q.patterns.iter().enumerate() {
        if j == main_at {
            continue;
        }
        let var = p.subject.as_var().expect("auxiliary subject");
        let prop = wdt_property(&p.predicate).expect("auxiliary predicate");
        let object = p.object.as_term().expect("auxiliary object");
        match exact_value(object) {
            Some(v) => fingerprints.entry(var).or_default().push(Snak::Value(prop, v)),
            None if matches!(object, Term::Iri(i) if crate::codec::namespace::is_skolem(i)) => {
                return Err(unsupported("some-value constants unsupported in auxiliary patterns", positions[j]))
            }
            None => restrict(&mut |_| None),
        }
    }
    for (var, snaks) in fingerprints {
        let fp = Fingerprint::snaks(snaks);
        if main.subject.as_var() == Some(var) {
            restrict(&mut |p| Some(p.with_subject(fp.clone())));
        }
        if main.object.as_var() == Some(var) {
            restrict(&mut |p| Some(p.with_value(fp.clone())));
        }
    }

    let column = |v: &str| {
        if main.subject.as_var() == Some(v) {
            Some(Column::Subject)
        } else if main.predicate.as_var() == Some(v) {
            Some(Column::Property)
        } else if main.object.as_var() == Some(v) {
            Some(Column::Value)
        } else {
            None
        }
    };
    let projection = q.projection.iter().map(|v| (v.clone(), column(v))).collect();
    if let Some(p) = &pattern {
        p.validate().map_err(|e| unsupported(e.to_string(), positions[main_at]))?;
    }
    Ok(DecodedQuery { pattern, main, projection, distinct: q.distinct, limit: q.limit, offset: q.offset })
}

/// Names what keeps a query outside the subset.
fn explain_rejection(q: &SelectQuery, positions: &[Position]) -> DecodeError {
    for (i, p) in q.patterns.iter().enumerate() {
        if p.predicate.as_var().is_none() && wdt_property(&p.predicate).is_none() {
            return unsupported(format!("predicate {} is not a wdt: property", p.predicate), positions[i]);
        }
    }
    let vars = |p: &TriplePattern| -> HashSet<String> { p.vars().map(str::to_string).collect() };
    for (i, p) in q.patterns.iter().enumerate().skip(1) {
        if vars(p).is_disjoint(&q.patterns.iter().take(i).flat_map(vars).collect()) {
            return unsupported("independent triple patterns unsupported", positions[i]);
        }
    }
    unsupported(
        "only one main pattern with auxiliary `?x wdt:P constant` patterns on its subject or object is supported",
        positions.get(1).copied().unwrap_or(Position { line: 1, col: 1 }),
    )
}

impl DecodedQuery {
    /// Bindings of one truthy triple, if it agrees with the main pattern.
    fn bind(&self, t: &Triple) -> Option<BTreeMap<&str, Term>> {
        let mut b: BTreeMap<&str, Term> = BTreeMap::new();
        let parts = [
            (&self.main.subject, Term::Iri(t.subject.clone())),
            (&self.main.predicate, Term::Iri(t.predicate.clone())),
            (&self.main.object, t.object.clone()),
        ];
        for (pt, term) in parts {
            match pt {
                PatternTerm::Term(c) if *c != term => return None,
                PatternTerm::Term(_) => {}
                PatternTerm::Var(v) => match b.get(v.as_str()) {
                    Some(old) if *old != term => return None,
                    Some(_) => {}
                    None => {
                        b.insert(v.as_str(), term);
                    }
                },
            }
        }
        Some(b)
    }

    fn row(&self, t: &Triple) -> Option<Vec<Option<Term>>> {
        let b = self.bind(t)?;
        Some(self.projection.iter().map(|(v, _)| b.get(v.as_str()).cloned()).collect())
    }
}

/// Runs the decoded query on `store`. Statements without a truthy triple
/// (no-value snaks, or only deprecated records) contribute nothing.
pub fn answer(store: &dyn Store, text: &str) -> Result<Solutions, AnswerError> {
    let d = decode(text)?;
    Ok(answer_decoded(store, &d)?)
}

pub fn answer_decoded(store: &dyn Store, d: &DecodedQuery) -> Result<Solutions, StoreError> {
    let variables = d.projection.iter().map(|(v, _)| v.clone()).collect();
    let mut sols = Solutions { variables, rows: Vec::new() };
    let Some(pattern) = &d.pattern else { return Ok(sols) };
    let wanted = d.limit.map(|l| l + d.offset.unwrap_or(0));
    let mut triples: HashSet<Triple> = HashSet::new();
    let mut rows_seen: HashSet<Vec<Option<Term>>> = HashSet::new();
    let mut batch: Vec<Statement> = Vec::new();
    let mut stream = store.filter(pattern, None)?;
    let mut done = false;
    while !done {
        batch.clear();
        for s in stream.by_ref().take(64) {
            batch.push(s?);
        }
        done = batch.len() < 64;
        let live: Vec<bool> = store
            .get_annotations(&batch)?
            .into_iter()
            .map(|(_, recs)| recs.iter().any(|r| r.rank != Rank::Deprecated))
            .collect();
        for (s, live) in batch.iter().zip(live) {
            if !live {
                continue;
            }
            let Some(t) = truthy_triple(s) else { continue };
            if !triples.insert(t.clone()) {
                continue;
            }
            let Some(row) = d.row(&t) else { continue };
            if d.distinct && !rows_seen.insert(row.clone()) {
                continue;
            }
            sols.rows.push(row);
            if wanted.is_some_and(|w| sols.rows.len() >= w) {
                done = true;
                break;
            }
        }
    }
    Ok(sols.finish(false, d.offset, d.limit))
}
