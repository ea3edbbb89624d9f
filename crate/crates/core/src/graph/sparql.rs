//! The SPARQL subset: `SELECT [DISTINCT] ?v+ WHERE { triples [VALUES] }`
//! with `LIMIT`/`OFFSET`.
//!
//! Prefixed names resolve against the built-in namespace table and any
//! `PREFIX` declarations. Everything outside the subset is rejected with the
//! name of the construct and its position, never skipped.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{Literal, Term};
use crate::codec::namespace::Ns;
use crate::model::Iri;
pub use crate::Position;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at {position}")]
pub struct SparqlError {
    pub message: String,
    pub position: Position,
}

impl SparqlError {
    pub fn new(message: impl Into<String>, position: Position) -> Self {
        SparqlError { message: message.into(), position }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternTerm {
    Var(String),
    Term(Term),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            PatternTerm::Term(t) => Some(t),
            PatternTerm::Var(_) => None,
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

impl From<Iri> for PatternTerm {
    fn from(i: Iri) -> Self {
        PatternTerm::Term(Term::Iri(i))
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Term(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(s: impl Into<PatternTerm>, p: impl Into<PatternTerm>, o: impl Into<PatternTerm>) -> Self {
        TriplePattern { subject: s.into(), predicate: p.into(), object: o.into() }
    }

    pub fn terms(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(|t| t.as_var())
    }
}

/// Inline data; `None` cells are `UNDEF`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValuesBlock {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelectQuery {
    pub projection: Vec<String>,
    pub distinct: bool,
    pub patterns: Vec<TriplePattern>,
    pub values: Option<ValuesBlock>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

impl SelectQuery {
    pub fn new(projection: &[&str], patterns: Vec<TriplePattern>) -> Self {
        SelectQuery {
            projection: projection.iter().map(|s| s.to_string()).collect(),
            distinct: false,
            patterns,
            values: None,
            limit: None,
            offset: None,
        }
    }

    /// Variables of the patterns and VALUES block, in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let values = self.values.iter().flat_map(|v| v.vars.iter().map(|s| s.as_str()));
        for v in values.chain(self.patterns.iter().flat_map(|p| p.vars())) {
            if seen.insert(v.to_string()) {
                out.push(v.to_string());
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), String> {
        if self.projection.is_empty() {
            return Err("empty projection".into());
        }
        let vars = self.variables();
        for v in &self.projection {
            if !vars.contains(v) {
                return Err(format!("projected variable ?{v} does not occur in the pattern"));
            }
        }
        if let Some(vb) = &self.values {
            if vb.rows.iter().any(|r| r.len() != vb.vars.len()) {
                return Err("VALUES row width differs from its variable list".into());
            }
        }
        Ok(())
    }
}

impl fmt::Display for SelectQuery {
    /// Prints with full IRIs only, so the text parses without prefixes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        for v in &self.projection {
            write!(f, "?{v} ")?;
        }
        f.write_str("WHERE {")?;
        if let Some(vb) = &self.values {
            f.write_str(" VALUES (")?;
            for (i, v) in vb.vars.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "?{v}")?;
            }
            f.write_str(") {")?;
            for row in &vb.rows {
                f.write_str(" (")?;
                for (i, cell) in row.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match cell {
                        Some(t) => write!(f, "{t}")?,
                        None => f.write_str("UNDEF")?,
                    }
                }
                f.write_str(")")?;
            }
            f.write_str(" }")?;
        }
        for p in &self.patterns {
            write!(f, " {} {} {} .", p.subject, p.predicate, p.object)?;
        }
        f.write_str(" }")?;
        if let Some(n) = self.limit {
            write!(f, " LIMIT {n}")?;
        }
        if let Some(n) = self.offset {
            write!(f, " OFFSET {n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    IriRef(String),
    PName(String, String),
    Str(String),
    LangTag(String),
    Caret2,
    Number(String),
    Word(String),
    BNode(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Position,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.char_indices().peekable(), src, line: 1, col: 1 }
    }

    fn pos(&self) -> Position {
        Position { line: self.line, col: self.col }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<Token>, SparqlError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let pos = self.pos();
            let Some(c) = self.peek() else { break };
            let tok = match c {
                '?' | '$' if self.peek2().is_some_and(is_name_char) => {
                    self.bump();
                    Tok::Var(self.take_while(is_name_char))
                }
                '<' => self.iri_or_punct(),
                '"' | '\'' => Tok::Str(self.string(c, pos)?),
                '@' => {
                    self.bump();
                    let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                    if tag.is_empty() {
                        return Err(SparqlError::new("empty language tag", pos));
                    }
                    Tok::LangTag(tag)
                }
                '^' if self.peek2() == Some('^') => {
                    self.bump();
                    self.bump();
                    Tok::Caret2
                }
                '_' if self.peek2() == Some(':') => {
                    self.bump();
                    self.bump();
                    Tok::BNode(self.take_while(is_name_char))
                }
                c if c.is_ascii_digit()
                    || (matches!(c, '+' | '-' | '.') && self.peek2().is_some_and(|d| d.is_ascii_digit())) =>
                {
                    self.number()
                }
                c if c.is_alphabetic() || c == ':' => self.word(),
                _ => {
                    self.bump();
                    Tok::Punct(c)
                }
            };
            out.push(Token { tok, pos });
        }
        Ok(out)
    }

    fn iri_or_punct(&mut self) -> Tok {
        let start = self.offset();
        let rest = &self.src[start + 1..];
        let end = rest.find(|c: char| c == '>' || c.is_whitespace() || "<\"{}|^`".contains(c));
        match end {
            Some(i) if rest[i..].starts_with('>') => {
                let iri = rest[..i].to_string();
                for _ in 0..iri.chars().count() + 2 {
                    self.bump();
                }
                Tok::IriRef(iri)
            }
            _ => {
                self.bump();
                Tok::Punct('<')
            }
        }
    }

    fn string(&mut self, quote: char, pos: Position) -> Result<String, SparqlError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(SparqlError::new("unterminated string", pos)),
                Some(c) if c == quote => return Ok(s),
                Some('\\') => {
                    let esc = self.bump().ok_or_else(|| SparqlError::new("unterminated string", pos))?;
                    s.push(match esc {
                        't' => '\t',
                        'n' => '\n',
                        'r' => '\r',
                        'b' => '\u{8}',
                        'f' => '\u{c}',
                        '"' => '"',
                        '\'' => '\'',
                        '\\' => '\\',
                        'u' | 'U' => {
                            let n = if esc == 'u' { 4 } else { 8 };
                            let hex: String = (0..n).filter_map(|_| self.bump()).collect();
                            u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| SparqlError::new("bad unicode escape", pos))?
                        }
                        other => return Err(SparqlError::new(format!("bad escape \\{other}"), pos)),
                    });
                }
                Some(c) => s.push(c),
            }
        }
    }

    fn number(&mut self) -> Tok {
        let mut s = String::new();
        if matches!(self.peek(), Some('+' | '-')) {
            s.push(self.bump().unwrap());
        }
        s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        if self.peek() == Some('.') && self.peek2().is_some_and(|d| d.is_ascii_digit()) {
            self.bump();
            s.push('.');
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            s.push(self.bump().unwrap());
            if matches!(self.peek(), Some('+' | '-')) {
                s.push(self.bump().unwrap());
            }
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        Tok::Number(s)
    }

    fn word(&mut self) -> Tok {
        let prefix = self.take_while(|c| is_name_char(c) || c == '.');
        if self.peek() != Some(':') {
            return Tok::Word(prefix);
        }
        self.bump();
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) || c == ':' {
                local.push(c);
                self.bump();
            } else if c == '.' && self.peek2().is_some_and(|d| is_name_char(d) || d == ':') {
                local.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Tok::PName(prefix, local)
    }
}

/// Constructs recognized by name so they can be rejected precisely.
const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "OPTIONAL", "FILTER", "UNION", "MINUS", "BIND", "SERVICE", "GRAPH", "ORDER", "GROUP", "HAVING",
    "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD", "CLEAR", "DROP", "CREATE", "FROM",
    "BASE", "REDUCED", "EXISTS", "NOT", "AS",
];

struct Parser {
    toks: Vec<Token>,
    i: usize,
    end: Position,
    prefixes: HashMap<String, String>,
    positions: Vec<Position>,
}

fn upper(t: &Tok) -> Option<String> {
    match t {
        Tok::Word(w) => Some(w.to_ascii_uppercase()),
        _ => None,
    }
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn pos(&self) -> Position {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }

    fn is_word(&self, kw: &str) -> bool {
        self.peek().and_then(|t| upper(&t.tok)).is_some_and(|w| w == kw)
    }

    fn is_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Punct(p), .. }) if *p == c)
    }

    fn unsupported(&self, what: &str, pos: Position) -> SparqlError {
        SparqlError::new(format!("{what} unsupported"), pos)
    }

    /// Error for an unexpected token, naming the construct when it is a
    /// known SPARQL feature outside the subset.
    fn unexpected(&self, expected: &str) -> SparqlError {
        let pos = self.pos();
        match self.peek().map(|t| &t.tok) {
            None => SparqlError::new(format!("expected {expected}, found end of query"), pos),
            Some(t) => {
                if let Some(w) = upper(t) {
                    if UNSUPPORTED_KEYWORDS.contains(&w.as_str()) {
                        return self.unsupported(&w, pos);
                    }
                }
                match t {
                    Tok::Punct('{') => self.unsupported("nested group", pos),
                    Tok::Punct('[') | Tok::BNode(_) => self.unsupported("blank node", pos),
                    Tok::Punct('(') => self.unsupported("expression", pos),
                    Tok::Punct('/' | '|' | '^' | '*' | '+' | '!') | Tok::Caret2 => {
                        self.unsupported("property path", pos)
                    }
                    other => SparqlError::new(format!("expected {expected}, found {other:?}"), pos),
                }
            }
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), SparqlError> {
        if self.is_punct(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    fn resolve(&self, prefix: &str, local: &str, pos: Position) -> Result<Iri, SparqlError> {
        let base = match self.prefixes.get(prefix) {
            Some(b) => b.clone(),
            None => match Ns::from_prefix(prefix) {
                Some(ns) => ns.base().to_string(),
                None => return Err(SparqlError::new(format!("unknown prefix '{prefix}:'"), pos)),
            },
        };
        Iri::new(format!("{base}{local}")).map_err(|e| SparqlError::new(e.to_string(), pos))
    }

    fn query(&mut self) -> Result<SelectQuery, SparqlError> {
        while self.is_word("PREFIX") {
            self.next();
            let pos = self.pos();
            let prefix = match self.next().map(|t| t.tok) {
                Some(Tok::PName(p, l)) if l.is_empty() => p,
                _ => return Err(SparqlError::new("expected prefix declaration", pos)),
            };
            let pos = self.pos();
            match self.next().map(|t| t.tok) {
                Some(Tok::IriRef(iri)) => {
                    self.prefixes.insert(prefix, iri);
                }
                _ => return Err(SparqlError::new("expected IRI in prefix declaration", pos)),
            }
        }
        if !self.is_word("SELECT") {
            return Err(self.unexpected("SELECT"));
        }
        self.next();
        let distinct = self.is_word("DISTINCT");
        if distinct {
            self.next();
        }
        let mut projection = Vec::new();
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Var(v)) => {
                    self.next();
                    projection.push(v);
                }
                Some(Tok::Punct('*')) => return Err(self.unsupported("SELECT *", self.pos())),
                Some(Tok::Punct('(')) => return Err(self.unsupported("projection expression", self.pos())),
                _ => break,
            }
        }
        if projection.is_empty() {
            return Err(self.unexpected("projected variable"));
        }
        if self.is_word("WHERE") {
            self.next();
        }
        self.expect_punct('{')?;
        let mut patterns = Vec::new();
        let mut positions = Vec::new();
        let mut values = None;
        loop {
            if self.is_punct('}') {
                self.next();
                break;
            }
            if self.is_punct('.') {
                self.next();
                continue;
            }
            if self.is_word("VALUES") {
                let pos = self.pos();
                self.next();
                if values.is_some() {
                    return Err(SparqlError::new("only one VALUES block is supported", pos));
                }
                values = Some(self.values()?);
                continue;
            }
            self.triples(&mut patterns, &mut positions)?;
        }
        let mut limit = None;
        let mut offset = None;
        loop {
            if self.is_word("LIMIT") || self.is_word("OFFSET") {
                let is_limit = self.is_word("LIMIT");
                let pos = self.pos();
                self.next();
                let n = match self.next().map(|t| t.tok) {
                    Some(Tok::Number(n)) => n.parse::<usize>().map_err(|_| SparqlError::new("bad count", pos))?,
                    _ => return Err(SparqlError::new("expected a non-negative integer", pos)),
                };
                let slot = if is_limit { &mut limit } else { &mut offset };
                if slot.replace(n).is_some() {
                    return Err(SparqlError::new("duplicate LIMIT/OFFSET", pos));
                }
            } else if self.peek().is_none() {
                break;
            } else {
                return Err(self.unexpected("end of query"));
            }
        }
        let q = SelectQuery { projection, distinct, patterns, values, limit, offset };
        q.check().map_err(|m| SparqlError::new(m, Position { line: 1, col: 1 }))?;
        self.positions = positions;
        Ok(q)
    }

    fn values(&mut self) -> Result<ValuesBlock, SparqlError> {
        let mut vars = Vec::new();
        let single = match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Var(v)) => {
                self.next();
                vars.push(v);
                true
            }
            _ => {
                self.expect_punct('(')?;
                while let Some(Tok::Var(v)) = self.peek().map(|t| t.tok.clone()) {
                    self.next();
                    vars.push(v);
                }
                self.expect_punct(')')?;
                false
            }
        };
        self.expect_punct('{')?;
        let mut rows = Vec::new();
        while !self.is_punct('}') {
            let mut row = Vec::new();
            if single {
                row.push(self.data_value()?);
            } else {
                self.expect_punct('(')?;
                while !self.is_punct(')') {
                    row.push(self.data_value()?);
                }
                self.next();
            }
            if row.len() != vars.len() {
                return Err(SparqlError::new("VALUES row width differs from its variable list", self.pos()));
            }
            rows.push(row);
        }
        self.next();
        Ok(ValuesBlock { vars, rows })
    }

    fn data_value(&mut self) -> Result<Option<Term>, SparqlError> {
        if self.is_word("UNDEF") {
            self.next();
            return Ok(None);
        }
        match self.term()? {
            PatternTerm::Term(t) => Ok(Some(t)),
            PatternTerm::Var(_) => Err(SparqlError::new("variable inside VALUES data", self.pos())),
        }
    }

    fn triples(&mut self, out: &mut Vec<TriplePattern>, positions: &mut Vec<Position>) -> Result<(), SparqlError> {
        let pos = self.pos();
        let subject = self.term()?;
        if matches!(subject, PatternTerm::Term(Term::Literal(_))) {
            return Err(SparqlError::new("literal in subject position", pos));
        }
        loop {
            let ppos = self.pos();
            let predicate = if matches!(self.peek().map(|t| &t.tok), Some(Tok::Word(w)) if w == "a") {
                self.next();
                PatternTerm::Term(Term::Iri(Ns::Rdf.iri("type")))
            } else {
                self.term()?
            };
            if matches!(predicate, PatternTerm::Term(Term::Literal(_))) {
                return Err(SparqlError::new("literal in predicate position", ppos));
            }
            if self.is_punct('/') || self.is_punct('|') || self.is_punct('*') || self.is_punct('+') || self.is_punct('?') {
                return Err(self.unsupported("property path", self.pos()));
            }
            loop {
                let object = self.term()?;
                out.push(TriplePattern { subject: subject.clone(), predicate: predicate.clone(), object });
                positions.push(pos);
                if self.is_punct(',') {
                    self.next();
                } else {
                    break;
                }
            }
            if self.is_punct(';') {
                self.next();
                if self.is_punct('.') || self.is_punct('}') {
                    break;
                }
            } else {
                break;
            }
        }
        if self.is_punct('.') {
            self.next();
        } else if !self.is_punct('}') && !self.is_word("VALUES") {
            return Err(self.unexpected("'.' or '}'"));
        }
        Ok(())
    }

    fn term(&mut self) -> Result<PatternTerm, SparqlError> {
        let pos = self.pos();
        let Some(tok) = self.peek().map(|t| t.tok.clone()) else {
            return Err(self.unexpected("term"));
        };
        let term = match tok {
            Tok::Var(v) => {
                self.next();
                return Ok(PatternTerm::Var(v));
            }
            Tok::IriRef(s) => {
                self.next();
                Term::Iri(Iri::new(&s).map_err(|e| SparqlError::new(e.to_string(), pos))?)
            }
            Tok::PName(p, l) => {
                self.next();
                Term::Iri(self.resolve(&p, &l, pos)?)
            }
            Tok::Str(s) => {
                self.next();
                match self.peek().map(|t| t.tok.clone()) {
                    Some(Tok::LangTag(tag)) => {
                        self.next();
                        Term::Literal(Literal::lang(s, &tag))
                    }
                    Some(Tok::Caret2) => {
                        self.next();
                        let dpos = self.pos();
                        let dt = match self.next().map(|t| t.tok) {
                            Some(Tok::IriRef(i)) => Iri::new(&i).map_err(|e| SparqlError::new(e.to_string(), dpos))?,
                            Some(Tok::PName(p, l)) => self.resolve(&p, &l, dpos)?,
                            _ => return Err(SparqlError::new("expected datatype IRI", dpos)),
                        };
                        Term::Literal(Literal::typed(s, dt))
                    }
                    _ => Term::Literal(Literal::string(s)),
                }
            }
            Tok::Number(n) => {
                self.next();
                let dt = if n.contains(['e', 'E']) {
                    "double"
                } else if n.contains('.') {
                    "decimal"
                } else {
                    "integer"
                };
                Term::Literal(Literal::typed(n, Ns::Xsd.iri(dt)))
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.next();
                Term::Literal(Literal::typed(w, Ns::Xsd.iri("boolean")))
            }
            _ => return Err(self.unexpected("term")),
        };
        Ok(PatternTerm::Term(term))
    }
}

pub fn parse(text: &str) -> Result<SelectQuery, SparqlError> {
    parse_located(text).map(|(q, _)| q)
}

/// Also returns the position of each triple pattern's subject.
pub fn parse_located(text: &str) -> Result<(SelectQuery, Vec<Position>), SparqlError> {
    let toks = Lexer::new(text).tokens()?;
    let end = {
        let line = text.lines().count().max(1);
        let col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        Position { line, col }
    };
    let mut p = Parser { toks, i: 0, end, prefixes: HashMap::new(), positions: Vec::new() };
    let q = p.query()?;
    Ok((q, p.positions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wd(local: &str) -> PatternTerm {
        PatternTerm::Term(Term::Iri(Ns::Wd.iri(local)))
    }

    fn wdt(local: &str) -> PatternTerm {
        PatternTerm::Term(Term::Iri(Ns::Wdt.iri(local)))
    }

    #[test]
    fn parses_basic_select() {
        let q = parse("SELECT ?v WHERE { wd:Q2270 wdt:P2177 ?v } LIMIT 10").unwrap();
        assert_eq!(q.projection, ["v"]);
        assert_eq!(q.patterns, [TriplePattern::new(wd("Q2270"), wdt("P2177"), PatternTerm::var("v"))]);
        assert_eq!(q.limit, Some(10));
        assert!(!q.distinct);
    }

    #[test]
    fn shorthand_and_literals() {
        let q = parse(
            r#"PREFIX ex: <http://example.org/>
               SELECT DISTINCT ?s WHERE {
                 ?s a ex:C ; ex:p "x"@EN , "7"^^xsd:decimal, 3, 2.5 .
                 ?s ex:q 'single' .
               } OFFSET 2 LIMIT 1"#,
        )
        .unwrap();
        assert!(q.distinct);
        assert_eq!(q.patterns.len(), 6);
        assert_eq!(q.patterns[0].predicate, PatternTerm::Term(Term::Iri(Ns::Rdf.iri("type"))));
        assert_eq!(q.patterns[1].object, PatternTerm::Term(Term::Literal(Literal::lang("x", "en"))));
        assert_eq!(
            q.patterns[3].object,
            PatternTerm::Term(Term::Literal(Literal::typed("3", Ns::Xsd.iri("integer"))))
        );
        assert_eq!(
            q.patterns[4].object,
            PatternTerm::Term(Term::Literal(Literal::typed("2.5", Ns::Xsd.iri("decimal"))))
        );
        assert_eq!((q.limit, q.offset), (Some(1), Some(2)));
    }

    #[test]
    fn values_blocks() {
        let q = parse("SELECT ?s ?o WHERE { VALUES (?s ?p) { (wd:Q1 wdt:P1) (wd:Q2 UNDEF) } ?s ?p ?o }").unwrap();
        let vb = q.values.unwrap();
        assert_eq!(vb.vars, ["s", "p"]);
        assert_eq!(vb.rows[1][1], None);
        let q = parse("SELECT ?s WHERE { VALUES ?s { wd:Q1 wd:Q2 } }").unwrap();
        assert_eq!(q.values.unwrap().rows.len(), 2);
        assert!(parse("SELECT ?s WHERE { VALUES ?s { wd:Q1 } VALUES ?s { wd:Q1 } }").is_err());
    }

    #[test]
    fn rejects_out_of_subset() {
        let cases = [
            ("SELECT * WHERE { ?s ?p ?o }", "SELECT * unsupported"),
            ("SELECT ?s WHERE { ?s ?p ?o OPTIONAL { ?s ?p ?o } }", "OPTIONAL unsupported"),
            ("SELECT ?s WHERE { ?s ?p ?o FILTER(?o > 1) }", "FILTER unsupported"),
            ("SELECT ?s WHERE { { ?s ?p ?o } UNION { ?s ?p ?o } }", "nested group unsupported"),
            ("SELECT ?s WHERE { ?s wdt:P1/wdt:P2 ?o }", "property path unsupported"),
            ("SELECT ?s WHERE { ?s ?p ?o } ORDER BY ?s", "ORDER unsupported"),
            ("ASK { ?s ?p ?o }", "ASK unsupported"),
            ("SELECT ?s WHERE { ?s ?p [] }", "blank node unsupported"),
            ("SELECT ?s WHERE { ?s ?p _:b }", "blank node unsupported"),
            ("SELECT (COUNT(?s) AS ?n) WHERE { ?s ?p ?o }", "projection expression unsupported"),
            ("SELECT ?s FROM <http://x> WHERE { ?s ?p ?o }", "FROM unsupported"),
        ];
        for (q, msg) in cases {
            let err = parse(q).unwrap_err();
            assert!(err.message.starts_with(msg), "{q}: {err}");
        }
    }

    #[test]
    fn error_positions() {
        let err = parse("SELECT ?s WHERE {\n  ?s ?p ?o .\n  OPTIONAL { ?s ?p ?o } }").unwrap_err();
        assert_eq!(err.position, Position { line: 3, col: 3 });
        assert_eq!(err.to_string(), "OPTIONAL unsupported at 3:3");
    }

    #[test]
    fn projection_must_occur() {
        assert!(parse("SELECT ?x WHERE { ?s ?p ?o }").is_err());
        assert!(parse("SELECT ?s WHERE { ?s ?p ?o }").is_ok());
    }

    #[test]
    fn display_reparses() {
        let text = r#"SELECT DISTINCT ?s ?v WHERE { VALUES (?s) { (wd:Q1) (UNDEF) } ?s wdt:P1 "a\"b"@en . ?s ?p ?v } LIMIT 3 OFFSET 1"#;
        let q = parse(text).unwrap();
        assert_eq!(parse(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn located_patterns() {
        let (_, pos) = parse_located("SELECT ?s WHERE {\n ?s ?p ?o .\n ?s ?q ?o }").unwrap();
        assert_eq!(pos, [Position { line: 2, col: 2 }, Position { line: 3, col: 2 }]);
    }
}
