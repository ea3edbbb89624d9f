use std::fmt;

use super::SexprError;
use crate::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    LParen,
    RParen,
    Symbol,
    String,
    Number,
}

/// A lexeme with its kind. For strings the lexeme is the unescaped content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexprToken {
    pub kind: TokenKind,
    pub lexeme: String,
    pub position: Position,
}

/// `[+-]? digits ('.' digits)?`
pub(crate) fn is_number(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    digits(int) && frac.map_or(true, digits)
}

pub fn tokenize(text: &str) -> Result<Vec<SexprToken>, SexprError> {
    let mut out = Vec::new();
    let mut it = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    let advance = |c: char, line: &mut usize, col: &mut usize| {
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while let Some(&c) = it.peek() {
        let position = Position { line, col };
        if c.is_whitespace() {
            it.next();
            advance(c, &mut line, &mut col);
            continue;
        }
        match c {
            '(' | ')' => {
                it.next();
                advance(c, &mut line, &mut col);
                let kind = if c == '(' { TokenKind::LParen } else { TokenKind::RParen };
                out.push(SexprToken { kind, lexeme: c.to_string(), position });
            }
            '"' => {
                it.next();
                advance(c, &mut line, &mut col);
                let mut s = String::new();
                loop {
                    let Some(c) = it.next() else {
                        return Err(SexprError::Syntax { pos: position, msg: "unterminated string".into() });
                    };
                    let here = Position { line, col };
                    advance(c, &mut line, &mut col);
                    match c {
                        '"' => break,
                        '\\' => {
                            let Some(e) = it.next() else {
                                return Err(SexprError::Syntax { pos: position, msg: "unterminated string".into() });
                            };
                            advance(e, &mut line, &mut col);
                            match e {
                                '"' => s.push('"'),
                                '\\' => s.push('\\'),
                                'n' => s.push('\n'),
                                't' => s.push('\t'),
                                'r' => s.push('\r'),
                                'u' => {
                                    let hex: String = (0..4).filter_map(|_| it.next()).collect();
                                    col += hex.chars().count();
                                    let ch = u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32);
                                    match ch {
                                        Some(ch) if hex.len() == 4 => s.push(ch),
                                        _ => {
                                            return Err(SexprError::Syntax {
                                                pos: here,
                                                msg: format!("bad escape \\u{hex}"),
                                            })
                                        }
                                    }
                                }
                                other => {
                                    return Err(SexprError::Syntax { pos: here, msg: format!("bad escape \\{other}") })
                                }
                            }
                        }
                        c => s.push(c),
                    }
                }
                out.push(SexprToken { kind: TokenKind::String, lexeme: s, position });
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = it.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' {
                        break;
                    }
                    s.push(c);
                    it.next();
                    advance(c, &mut line, &mut col);
                }
                let kind = if is_number(&s) { TokenKind::Number } else { TokenKind::Symbol };
                out.push(SexprToken { kind, lexeme: s, position });
            }
        }
    }
    Ok(out)
}

/// Parsed but uninterpreted S-expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(SexprToken),
    List(Vec<Sexp>, Position),
}

impl Sexp {
    pub fn position(&self) -> Position {
        match self {
            Sexp::Atom(t) => t.position,
            Sexp::List(_, p) => *p,
        }
    }

    /// The head symbol and arguments of a non-empty list.
    pub fn form(&self) -> Option<(&str, &[Sexp])> {
        match self {
            Sexp::List(items, _) => match items.split_first() {
                Some((Sexp::Atom(t), args)) if t.kind == TokenKind::Symbol => Some((&t.lexeme, args)),
                _ => None,
            },
            Sexp::Atom(_) => None,
        }
    }

    pub fn atom(&self) -> Option<&SexprToken> {
        match self {
            Sexp::Atom(t) => Some(t),
            Sexp::List(..) => None,
        }
    }

    pub fn symbol(&self) -> Option<&str> {
        self.atom().filter(|t| t.kind == TokenKind::Symbol).map(|t| t.lexeme.as_str())
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(t) if t.kind == TokenKind::String => write!(f, "{:?}", t.lexeme),
            Sexp::Atom(t) => f.write_str(&t.lexeme),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Reads every top-level expression.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, SexprError> {
    let toks = tokenize(text)?;
    let mut stack: Vec<(Vec<Sexp>, Position)> = Vec::new();
    let mut top = Vec::new();
    for t in toks {
        match t.kind {
            TokenKind::LParen => stack.push((Vec::new(), t.position)),
            TokenKind::RParen => {
                let Some((items, pos)) = stack.pop() else {
                    return Err(SexprError::Syntax { pos: t.position, msg: "unbalanced ')'".into() });
                };
                let list = Sexp::List(items, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            _ => match stack.last_mut() {
                Some((parent, _)) => parent.push(Sexp::Atom(t)),
                None => top.push(Sexp::Atom(t)),
            },
        }
    }
    if let Some((_, pos)) = stack.pop() {
        return Err(SexprError::Syntax { pos, msg: "unclosed '('".into() });
    }
    Ok(top)
}

/// Reads exactly one expression.
pub fn read_one(text: &str) -> Result<Sexp, SexprError> {
    let mut all = read_all(text)?.into_iter();
    let first = all.next().ok_or_else(|| SexprError::Syntax {
        pos: Position { line: 1, col: 1 },
        msg: "empty input".into(),
    })?;
    if let Some(extra) = all.next() {
        return Err(SexprError::Syntax { pos: extra.position(), msg: "trailing input after expression".into() });
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        for s in ["0", "0.07", "-12", "+3.50", "78.0469970703125"] {
            assert!(is_number(s), "{s}");
        }
        for s in ["", "-", ".5", "5.", "1e5", "1903-01-01", "wd:Q1", "1.2.3"] {
            assert!(!is_number(s), "{s}");
        }
    }

    #[test]
    fn token_positions() {
        let toks = tokenize("(Item\n  wd:Q1 \"a\\\"b\")").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            [TokenKind::LParen, TokenKind::Symbol, TokenKind::Symbol, TokenKind::String, TokenKind::RParen]
        );
        assert_eq!(toks[2].position, Position { line: 2, col: 3 });
        assert_eq!(toks[3].lexeme, "a\"b");
        assert_eq!(toks[4].position, Position { line: 2, col: 15 });
    }

    #[test]
    fn unicode_escape() {
        let toks = tokenize(r#""café""#).unwrap();
        assert_eq!(toks[0].lexeme, "café");
        assert!(tokenize(r#""\u00""#).is_err());
    }

    #[test]
    fn balance_errors() {
        assert!(matches!(read_one("(a (b)"), Err(SexprError::Syntax { pos: Position { line: 1, col: 1 }, .. })));
        assert!(matches!(read_one("(a))"), Err(SexprError::Syntax { pos: Position { line: 1, col: 4 }, .. })));
        assert!(matches!(read_one("(a) b"), Err(SexprError::Syntax { .. })));
        assert!(matches!(read_one("\"abc"), Err(SexprError::Syntax { .. })));
    }
}
