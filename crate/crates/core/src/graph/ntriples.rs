//! N-Triples reader and writer.
//!
//! Blank nodes are skolemized on input: `_:b` in a document becomes
//! `urn:skolem:{sha256(document)}:b`, so the same document always yields the
//! same graph.

use sha2::{Digest, Sha256};

use super::{Graph, Literal, Term, Triple};
use crate::codec::namespace::Ns;
use crate::model::Iri;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NtError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: invalid IRI <{iri}>")]
    InvalidIri { line: usize, iri: String },
}

pub fn parse(text: &str) -> Result<Graph, NtError> {
    let mut g = Graph::new();
    for t in parse_triples(text)? {
        g.insert(t);
    }
    Ok(g)
}

pub fn parse_triples(text: &str) -> Result<Vec<Triple>, NtError> {
    let doc = hex::encode(Sha256::digest(text.as_bytes()));
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut p = LineParser { s: line, pos: 0, line: i + 1, doc: &doc };
        p.skip_ws();
        if p.at_end() || p.peek() == Some('#') {
            continue;
        }
        out.push(p.triple()?);
    }
    Ok(out)
}

struct LineParser<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
    doc: &'a str,
}

impl LineParser<'_> {
    fn err(&self, message: impl Into<String>) -> NtError {
        NtError::Syntax { line: self.line, message: format!("{} (column {})", message.into(), self.pos + 1) }
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.s.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), NtError> {
        if self.bump() == Some(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn triple(&mut self) -> Result<Triple, NtError> {
        let subject = match self.peek() {
            Some('<') => self.iri()?,
            Some('_') => self.bnode()?,
            _ => return Err(self.err("expected subject IRI or blank node")),
        };
        self.skip_ws();
        if self.peek() != Some('<') {
            return Err(self.err("expected predicate IRI"));
        }
        let predicate = self.iri()?;
        self.skip_ws();
        let object = match self.peek() {
            Some('<') => Term::Iri(self.iri()?),
            Some('_') => Term::Iri(self.bnode()?),
            Some('"') => Term::Literal(self.literal()?),
            _ => return Err(self.err("expected object")),
        };
        self.skip_ws();
        self.expect('.')?;
        self.skip_ws();
        if !self.at_end() && self.peek() != Some('#') {
            return Err(self.err("trailing characters after '.'"));
        }
        Ok(Triple { subject, predicate, object })
    }

    fn iri(&mut self) -> Result<Iri, NtError> {
        self.expect('<')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated IRI")),
                Some('>') => break,
                Some('\\') => out.push(self.uchar()?),
                Some(c) => out.push(c),
            }
        }
        Iri::new(&out).map_err(|_| NtError::InvalidIri { line: self.line, iri: out })
    }

    fn uchar(&mut self) -> Result<char, NtError> {
        let n = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.err("bad escape")),
        };
        let start = self.pos;
        let hex = self.s.get(start..start + n).ok_or_else(|| self.err("short \\u escape"))?;
        self.pos += n;
        u32::from_str_radix(hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.err("bad \\u escape"))
    }

    fn bnode(&mut self) -> Result<Iri, NtError> {
        self.expect('_')?;
        self.expect(':')?;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        // A trailing '.' terminates the statement, not the label.
        while self.pos > start && self.s.as_bytes()[self.pos - 1] == b'.' {
            self.pos -= 1;
        }
        let label = &self.s[start..self.pos];
        if label.is_empty() {
            return Err(self.err("empty blank node label"));
        }
        Iri::new(format!("urn:skolem:{}:{}", self.doc, label)).map_err(|_| self.err("bad blank node label"))
    }

    fn literal(&mut self) -> Result<Literal, NtError> {
        self.expect('"')?;
        let mut lex = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated string")),
                Some('"') => break,
                Some('\\') => match self.peek() {
                    Some('u' | 'U') => lex.push(self.uchar()?),
                    Some(c) => {
                        self.pos += 1;
                        lex.push(match c {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            _ => return Err(self.err(format!("bad escape \\{c}"))),
                        });
                    }
                    None => return Err(self.err("unterminated string")),
                },
                Some(c) => lex.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(self.err("empty language tag"));
                }
                Ok(Literal::lang(lex, &self.s[start..self.pos]))
            }
            Some('^') => {
                self.expect('^')?;
                self.expect('^')?;
                Ok(Literal::typed(lex, self.iri()?))
            }
            _ => Ok(Literal::string(lex)),
        }
    }
}

pub(crate) fn escape_string(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

pub fn literal_to_string(l: &Literal) -> String {
    let mut out = String::from("\"");
    escape_string(l.lexical(), &mut out);
    out.push('"');
    if let Some(lang) = l.language() {
        out.push('@');
        out.push_str(lang);
    } else if !l.has_datatype(Ns::Xsd, "string") {
        out.push_str("^^<");
        out.push_str(l.datatype().as_str());
        out.push('>');
    }
    out
}

/// One triple per line, in canonical order.
pub fn serialize(g: &Graph) -> String {
    let mut out = String::new();
    for t in g.to_set() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_triple_and_empty() {
        assert_eq!(parse("<http://s> <http://p> <http://o> .").unwrap().len(), 1);
        assert!(parse("").unwrap().is_empty());
        assert!(parse("# comment only\n\n").unwrap().is_empty());
    }

    #[test]
    fn literals_and_escapes() {
        let g = parse(concat!(
            "<http://s> <http://p> \"a\\\"b\\n\\u00e9\" .\n",
            "<http://s> <http://p> \"Marie Curie\"@en .\n",
            "<http://s> <http://p> \"35339\"^^<http://www.w3.org/2001/XMLSchema#decimal> .\n",
        ))
        .unwrap();
        let objs: Vec<_> = g.iter().map(|t| t.object.clone()).collect();
        assert_eq!(objs[0], Term::Literal(Literal::string("a\"b\né")));
        assert_eq!(objs[1], Term::Literal(Literal::lang("Marie Curie", "en")));
        assert_eq!(objs[2], Term::Literal(Literal::typed("35339", Ns::Xsd.iri("decimal"))));
    }

    #[test]
    fn blank_nodes_skolemized_deterministically() {
        let doc = "_:b1 <http://p> _:b2 .\n_:b2 <http://p> \"x\" .\n";
        let a = parse(doc).unwrap();
        let b = parse(doc).unwrap();
        assert_eq!(a, b);
        let t = a.iter().next().unwrap();
        assert!(t.subject.as_str().starts_with("urn:skolem:"));
        assert!(t.subject.as_str().ends_with(":b1"));
        let other = parse("_:b1 <http://p> _:b2 .\n").unwrap();
        assert_ne!(other.iter().next().unwrap().subject, t.subject);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("<http://s> <http://p> <http://o> .\n<http://s> <http://p> .\n").unwrap_err();
        assert!(matches!(err, NtError::Syntax { line: 2, .. }), "{err}");
        let err = parse("<http://s> <p> <http://o> .\n").unwrap_err();
        assert!(matches!(err, NtError::InvalidIri { line: 1, .. }), "{err}");
        assert!(parse("<http://s> <http://p> \"x\" . junk").is_err());
        assert!(parse("\"x\" <http://p> <http://o> .").is_err());
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            "[a-z]{1,4}".prop_map(|s| Term::Iri(Iri::new(format!("http://x/{s}")).unwrap())),
            "[ -~\\n\\té\"\\\\]{0,8}".prop_map(|s| Term::Literal(Literal::string(s))),
            ("[a-z ]{0,5}", "[a-z]{2}").prop_map(|(s, l)| Term::Literal(Literal::lang(s, &l))),
            "[0-9]{1,4}".prop_map(|s| Term::Literal(Literal::typed(s, Ns::Xsd.iri("decimal")))),
        ]
    }

    proptest! {
        #[test]
        fn serialize_parse_identity(ts in prop::collection::vec(("[a-c]", "[p-r]", arb_term()), 0..30)) {
            let g: Graph = ts
                .into_iter()
                .map(|(s, p, o)| Triple::new(
                    Iri::new(format!("http://x/{s}")).unwrap(),
                    Iri::new(format!("http://x/{p}")).unwrap(),
                    o,
                ))
                .collect();
            prop_assert_eq!(parse(&serialize(&g)).unwrap(), g);
        }
    }
}
