//! Time spent in the API versus time spent waiting on endpoints.
//!
//! Every query runs `runs` times. A run's endpoint time is the growth of the
//! store's request timer, which only runs inside network calls; its API time
//! is the rest of the wall time. Rows report the median of each over the
//! runs, and `overhead_fraction = api_ms / total_ms`.

use std::io::Write;
use std::time::{Duration, Instant};

use kif_core::model::FilterPattern;
use kif_core::sexpr;
use kif_core::store::{collect, Store};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchQuery {
    pub id: String,
    pub pattern: FilterPattern,
}

/// One query per line: an optional id, then a FilterPattern S-expression.
/// Blank lines and lines starting with `#` are skipped; queries without an
/// id are named `q<line>`.
pub fn parse_queries(text: &str) -> Result<Vec<BenchQuery>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, body) = match line.split_once(char::is_whitespace) {
            Some((id, rest)) if !id.starts_with('(') => (id.to_string(), rest),
            _ => (format!("q{}", i + 1), line),
        };
        let pattern = sexpr::parse_as::<FilterPattern>(body)
            .map_err(|e| CliError::sexpr(format!("query on line {}", i + 1), e))?;
        pattern.validate()?;
        out.push(BenchQuery { id, pattern });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BenchRow {
    pub query_id: String,
    pub total_ms: f64,
    pub api_ms: f64,
    pub overhead_fraction: f64,
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Runs the queries one after another, each `runs` times.
pub fn run(store: &dyn Store, queries: &[BenchQuery], runs: usize) -> Result<Vec<BenchRow>, CliError> {
    if runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(queries.len());
    for q in queries {
        let (mut totals, mut apis) = (Vec::with_capacity(runs), Vec::with_capacity(runs));
        for _ in 0..runs {
            let before = store.request_stats().elapsed;
            let start = Instant::now();
            collect(store.filter(&q.pattern, None)?)?;
            let total = start.elapsed();
            let endpoint = store.request_stats().elapsed.saturating_sub(before);
            totals.push(total);
            apis.push(total.saturating_sub(endpoint));
        }
        let (total, api) = (median(totals), median(apis));
        let overhead_fraction = if total.is_zero() { 1.0 } else { api.as_secs_f64() / total.as_secs_f64() };
        rows.push(BenchRow { query_id: q.id.clone(), total_ms: ms(total), api_ms: ms(api), overhead_fraction });
    }
    Ok(rows)
}

pub fn write_csv(out: impl Write, rows: &[BenchRow]) -> Result<(), CliError> {
    let fail = |e: csv::Error| CliError::Io { path: "<csv>".into(), source: e.into() };
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::Io { path: "<csv>".into(), source: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        let d = Duration::from_millis;
        assert_eq!(median(vec![d(3), d(1), d(2)]), d(2));
        assert_eq!(median(vec![d(4), d(1), d(2), d(3)]), Duration::from_micros(2500));
    }

    #[test]
    fn query_lines() {
        let qs = parse_queries("# comment\n\nt1 (FilterPattern wd:Q2270)\n(FilterPattern None wd:P31)\n").unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].id, "t1");
        assert_eq!(qs[1].id, "q4");
        assert!(parse_queries("(FilterPattern (Bogus))").is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let rows = [BenchRow { query_id: "a".into(), total_ms: 2.0, api_ms: 1.0, overhead_fraction: 0.5 }];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "query_id,total_ms,api_ms,overhead_fraction\na,2.0,1.0,0.5\n");
    }
}
