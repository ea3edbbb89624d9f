//! Basic graph pattern evaluation.

use std::collections::{HashMap, HashSet};

use super::sparql::{PatternTerm, SelectQuery, TriplePattern};
use super::{Graph, Term};

/// A result table. Cells are `None` where a variable is unbound (possible
/// only through `UNDEF` in a VALUES block).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solutions {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl Solutions {
    pub fn column(&self, var: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Applies DISTINCT, the canonical row order, then OFFSET and LIMIT.
    pub fn finish(mut self, distinct: bool, offset: Option<usize>, limit: Option<usize>) -> Self {
        if distinct {
            let mut seen = HashSet::new();
            self.rows.retain(|r| seen.insert(r.clone()));
        }
        self.rows.sort();
        let offset = offset.unwrap_or(0);
        self.rows = self.rows.into_iter().skip(offset).take(limit.unwrap_or(usize::MAX)).collect();
        self
    }
}

type Binding = Vec<Option<Term>>;

fn slot(pt: &PatternTerm, index: &HashMap<&str, usize>, b: &Binding) -> Result<Option<Term>, usize> {
    match pt {
        PatternTerm::Term(t) => Ok(Some(t.clone())),
        PatternTerm::Var(v) => {
            let i = index[v.as_str()];
            match &b[i] {
                Some(t) => Ok(Some(t.clone())),
                None => Err(i),
            }
        }
    }
}

/// Extends `b` with every triple of `g` matching `p`.
fn extend(g: &Graph, p: &TriplePattern, index: &HashMap<&str, usize>, b: &Binding, out: &mut Vec<Binding>) {
    let s = slot(&p.subject, index, b);
    let pr = slot(&p.predicate, index, b);
    let o = slot(&p.object, index, b);
    // Subjects and predicates are always IRIs.
    let s_iri = match &s {
        Ok(Some(Term::Iri(i))) => Some(i),
        Ok(_) => return,
        Err(_) => None,
    };
    let p_iri = match &pr {
        Ok(Some(Term::Iri(i))) => Some(i),
        Ok(_) => return,
        Err(_) => None,
    };
    let o_term = o.as_ref().ok().and_then(|t| t.as_ref());
    for t in g.pattern(s_iri, p_iri, o_term) {
        let mut nb = b.clone();
        let mut ok = true;
        for (res, val) in [(&s, Term::Iri(t.subject.clone())), (&pr, Term::Iri(t.predicate.clone())), (&o, t.object.clone())] {
            if let Err(i) = res {
                match &nb[*i] {
                    None => nb[*i] = Some(val),
                    Some(existing) => ok &= *existing == val,
                }
            }
        }
        if ok {
            out.push(nb);
        }
    }
}

pub fn evaluate(g: &Graph, q: &SelectQuery) -> Solutions {
    let vars = q.variables();
    let index: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut bindings: Vec<Binding> = match &q.values {
        None => vec![vec![None; vars.len()]],
        Some(vb) => vb
            .rows
            .iter()
            .map(|row| {
                let mut b = vec![None; vars.len()];
                for (v, cell) in vb.vars.iter().zip(row) {
                    b[index[v.as_str()]] = cell.clone();
                }
                b
            })
            .collect(),
    };
    let mut bound: HashSet<&str> = match &q.values {
        // A VALUES variable counts as bound only if no row leaves it UNDEF.
        Some(vb) => vb
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| vb.rows.iter().all(|r| r[*i].is_some()))
            .map(|(_, v)| v.as_str())
            .collect(),
        None => HashSet::new(),
    };
    let mut remaining: Vec<&TriplePattern> = q.patterns.iter().collect();
    while !remaining.is_empty() && !bindings.is_empty() {
        // Most selective pattern first: constants and already-bound variables.
        let score = |p: &TriplePattern| {
            p.terms()
                .iter()
                .filter(|t| match t {
                    PatternTerm::Term(_) => true,
                    PatternTerm::Var(v) => bound.contains(v.as_str()),
                })
                .count()
        };
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .max_by_key(|(i, p)| (score(p), std::cmp::Reverse(*i)))
            .unwrap();
        let p = remaining.remove(pos);
        let mut next = Vec::new();
        for b in &bindings {
            extend(g, p, &index, b, &mut next);
        }
        bindings = next;
        bound.extend(p.vars());
    }
    if !remaining.is_empty() {
        bindings.clear();
    }
    let cols: Vec<usize> = q.projection.iter().map(|v| index[v.as_str()]).collect();
    let rows = bindings.into_iter().map(|b| cols.iter().map(|&i| b[i].clone()).collect()).collect();
    Solutions { variables: q.projection.clone(), rows }.finish(q.distinct, q.offset, q.limit)
}
