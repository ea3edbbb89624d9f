//! Minimal RDF: terms, triples and an indexed in-memory graph, plus the
//! N-Triples syntax, a SELECT/BGP subset of SPARQL, the results JSON format
//! and an HTTP endpoint serving a graph.

pub mod eval;
pub mod ntriples;
pub mod results;
pub mod server;
pub mod sparql;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::codec::namespace::Ns;
use crate::model::Iri;

pub use eval::{evaluate, Solutions};
pub use server::Endpoint;
pub use sparql::{PatternTerm, SelectQuery, SparqlError, TriplePattern, ValuesBlock};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Iri,
    language: Option<Arc<str>>,
}

impl Literal {
    /// Plain `xsd:string` literal.
    pub fn string(lexical: impl AsRef<str>) -> Self {
        Literal::typed(lexical, Ns::Xsd.iri("string"))
    }

    /// Language-tagged string; the tag is lowercased.
    pub fn lang(lexical: impl AsRef<str>, language: &str) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype: Ns::Rdf.iri("langString"),
            language: Some(Arc::from(language.to_lowercase())),
        }
    }

    pub fn typed(lexical: impl AsRef<str>, datatype: Iri) -> Self {
        Literal { lexical: Arc::from(lexical.as_ref()), datatype, language: None }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn has_datatype(&self, ns: Ns, local: &str) -> bool {
        ns.local(&self.datatype) == Some(local)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&ntriples::literal_to_string(self))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl fmt::Display for Term {
    /// N-Triples form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "<{i}>"),
            Term::Literal(l) => f.write_str(&ntriples::literal_to_string(l)),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject, predicate, object: object.into() }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> <{}> {} .", self.subject, self.predicate, self.object)
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Set of triples with positional indexes. Read access is lock-free; build
/// the graph completely before sharing it.
#[derive(Clone, Default)]
pub struct Graph {
    triples: Vec<Triple>,
    members: HashSet<Triple>,
    by_s: HashMap<Iri, Vec<usize>>,
    by_p: HashMap<Iri, Vec<usize>>,
    by_o: HashMap<Term, Vec<usize>>,
    by_sp: HashMap<(Iri, Iri), Vec<usize>>,
    by_po: HashMap<(Iri, Term), Vec<usize>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Returns false if the triple was already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        if self.members.contains(&t) {
            return false;
        }
        let i = self.triples.len();
        self.by_s.entry(t.subject.clone()).or_default().push(i);
        self.by_p.entry(t.predicate.clone()).or_default().push(i);
        self.by_o.entry(t.object.clone()).or_default().push(i);
        self.by_sp.entry((t.subject.clone(), t.predicate.clone())).or_default().push(i);
        self.by_po.entry((t.predicate.clone(), t.object.clone())).or_default().push(i);
        self.members.insert(t.clone());
        self.triples.push(t);
        true
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.members.contains(t)
    }

    /// Triples in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn to_set(&self) -> std::collections::BTreeSet<Triple> {
        self.triples.iter().cloned().collect()
    }

    /// Triples matching the bound positions.
    pub fn pattern<'a>(
        &'a self,
        s: Option<&Iri>,
        p: Option<&Iri>,
        o: Option<&Term>,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        let ids: Option<&Vec<usize>> = match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                let t = Triple::new(s.clone(), p.clone(), o.clone());
                return match self.members.get(&t) {
                    Some(t) => Box::new(std::iter::once(t)),
                    None => Box::new(std::iter::empty()),
                };
            }
            (None, None, None) => return Box::new(self.triples.iter()),
            (Some(s), Some(p), None) => self.by_sp.get(&(s.clone(), p.clone())),
            (None, Some(p), Some(o)) => self.by_po.get(&(p.clone(), o.clone())),
            (Some(s), None, Some(o)) => {
                let (Some(a), Some(b)) = (self.by_s.get(s), self.by_o.get(o)) else {
                    return Box::new(std::iter::empty());
                };
                let short = if a.len() <= b.len() { a } else { b };
                let (s, o) = (s.clone(), o.clone());
                return Box::new(
                    short
                        .iter()
                        .map(|&i| &self.triples[i])
                        .filter(move |t| t.subject == s && t.object == o),
                );
            }
            (Some(s), None, None) => self.by_s.get(s),
            (None, Some(p), None) => self.by_p.get(p),
            (None, None, Some(o)) => self.by_o.get(o),
        };
        match ids {
            Some(ids) => Box::new(ids.iter().map(|&i| &self.triples[i])),
            None => Box::new(std::iter::empty()),
        }
    }

    /// Distinct predicates, sorted.
    pub fn predicates(&self) -> Vec<Iri> {
        let mut v: Vec<Iri> = self.by_p.keys().cloned().collect();
        v.sort();
        v
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.to_set()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://x/{s}")).unwrap()
    }

    #[test]
    fn set_semantics_and_indexes() {
        let mut g = Graph::new();
        assert!(g.insert(Triple::new(iri("a"), iri("p"), iri("b"))));
        assert!(!g.insert(Triple::new(iri("a"), iri("p"), iri("b"))));
        g.insert(Triple::new(iri("a"), iri("q"), Literal::string("x")));
        g.insert(Triple::new(iri("c"), iri("p"), iri("b")));
        assert_eq!(g.len(), 3);
        assert_eq!(g.pattern(Some(&iri("a")), None, None).count(), 2);
        assert_eq!(g.pattern(None, Some(&iri("p")), None).count(), 2);
        assert_eq!(g.pattern(None, None, Some(&Term::Iri(iri("b")))).count(), 2);
        assert_eq!(g.pattern(Some(&iri("a")), Some(&iri("p")), None).count(), 1);
        assert_eq!(g.pattern(None, Some(&iri("p")), Some(&Term::Iri(iri("b")))).count(), 2);
        assert_eq!(g.pattern(Some(&iri("c")), None, Some(&Term::Iri(iri("b")))).count(), 1);
        assert_eq!(
            g.pattern(Some(&iri("a")), Some(&iri("q")), Some(&Literal::string("x").into())).count(),
            1
        );
        assert_eq!(g.pattern(Some(&iri("zz")), None, None).count(), 0);
        assert_eq!(g.pattern(None, None, None).count(), 3);
    }

    #[test]
    fn language_literal_datatype() {
        let l = Literal::lang("Marie Curie", "EN");
        assert_eq!(l.language(), Some("en"));
        assert!(l.has_datatype(Ns::Rdf, "langString"));
        assert_ne!(Term::from(Literal::string("a")), Term::from(Literal::lang("a", "en")));
    }

    #[test]
    fn iris_sort_before_literals() {
        assert!(Term::Iri(iri("z")) < Term::Literal(Literal::string("a")));
    }
}
