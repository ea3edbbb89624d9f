//! Exact decimal numbers.
//!
//! Quantities never go through binary floating point. A [`Decimal`] keeps a
//! canonical lexical form (no `+`, no leading integer zeros, no trailing
//! fraction zeros), so two decimals are equal iff they denote the same number
//! and `78.0469970703125` prints back exactly as it was read.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::ModelError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Decimal(Arc<str>);

impl Decimal {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_negative(&self) -> bool {
        self.0.starts_with('-')
    }

    fn parts(&self) -> (bool, &str, &str) {
        let s = self.0.strip_prefix('-');
        let neg = s.is_some();
        let s = s.unwrap_or(&self.0);
        match s.split_once('.') {
            Some((int, frac)) => (neg, int, frac),
            None => (neg, s, ""),
        }
    }

    pub fn zero() -> Self {
        Decimal(Arc::from("0"))
    }
}

impl From<i64> for Decimal {
    fn from(n: i64) -> Self {
        Decimal(Arc::from(n.to_string()))
    }
}

impl FromStr for Decimal {
    type Err = ModelError;

    /// Accepts `[+-]? digits ( '.' digits? )?` and `[+-]? '.' digits`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidDecimal(s.to_string());
        let (neg, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (int, frac) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int = int.trim_start_matches('0');
        let frac = frac.trim_end_matches('0');
        let int = if int.is_empty() { "0" } else { int };
        let zero = int == "0" && frac.is_empty();
        let mut out = String::with_capacity(s.len());
        if neg && !zero {
            out.push('-');
        }
        out.push_str(int);
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        Ok(Decimal(Arc::from(out)))
    }
}

fn cmp_magnitude(a: (&str, &str), b: (&str, &str)) -> Ordering {
    // Integer parts carry no leading zeros, so longer means larger.
    a.0.len()
        .cmp(&b.0.len())
        .then_with(|| a.0.cmp(b.0))
        .then_with(|| {
            let n = a.1.len().max(b.1.len());
            let pa = a.1.bytes().chain(std::iter::repeat(b'0')).take(n);
            let pb = b.1.bytes().chain(std::iter::repeat(b'0')).take(n);
            pa.cmp(pb)
        })
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (na, ia, fa) = self.parts();
        let (nb, ib, fb) = other.parts();
        match (na, nb) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => cmp_magnitude((ia, fa), (ib, fb)),
            (true, true) => cmp_magnitude((ib, fb), (ia, fa)),
        }
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Decimal({})", self.0)
    }
}

impl serde::Serialize for Decimal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}
