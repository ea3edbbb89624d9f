use std::fmt;
use std::str::FromStr;

use super::{Item, ModelError};

/// Proleptic Gregorian date-time in UTC with a signed year.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Timestamp {
    pub year: i64,
    pub month: u8,
    pub day: u8,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
}

fn is_leap(year: i64) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i64, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        _ => 28,
    }
}

impl Timestamp {
    pub fn date(year: i64, month: u8, day: u8) -> Result<Self, ModelError> {
        Self::new(year, month, day, 0, 0, 0)
    }

    pub fn new(year: i64, month: u8, day: u8, hour: u8, minute: u8, second: u8) -> Result<Self, ModelError> {
        let ts = Timestamp { year, month, day, hour, minute, second };
        if !(1..=12).contains(&month)
            || day < 1
            || day > days_in_month(year, month)
            || hour > 23
            || minute > 59
            || second > 59
        {
            return Err(ModelError::InvalidTimestamp(ts.to_datetime_string()));
        }
        Ok(ts)
    }

    pub fn is_midnight(&self) -> bool {
        self.hour == 0 && self.minute == 0 && self.second == 0
    }

    fn year_string(&self) -> String {
        if self.year < 0 {
            format!("-{:04}", -self.year)
        } else {
            format!("{:04}", self.year)
        }
    }

    /// `YYYY-MM-DD`
    pub fn to_date_string(&self) -> String {
        format!("{}-{:02}-{:02}", self.year_string(), self.month, self.day)
    }

    /// `YYYY-MM-DDTHH:MM:SSZ`, the lexical form of the `xsd:dateTime` simple value.
    pub fn to_datetime_string(&self) -> String {
        format!(
            "{}T{:02}:{:02}:{:02}Z",
            self.to_date_string(),
            self.hour,
            self.minute,
            self.second
        )
    }

    /// Zero-fills every component finer than `precision`.
    fn truncated(mut self, precision: u8) -> Self {
        if precision <= TimeValue::YEAR {
            self.month = 1;
        }
        if precision <= TimeValue::MONTH {
            self.day = 1;
        }
        if precision <= TimeValue::DAY {
            self.hour = 0;
        }
        if precision <= 12 {
            self.minute = 0;
        }
        if precision <= 13 {
            self.second = 0;
        }
        self
    }
}

impl FromStr for Timestamp {
    type Err = ModelError;

    /// Accepts `[+-]YYYY-MM-DD` optionally followed by `THH:MM:SS` and `Z`.
    /// Month and day may be `00` (as in Wikibase JSON) and are read as 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidTimestamp(s.to_string());
        let (neg, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (date, time) = match body.split_once('T') {
            Some((d, t)) => (d, Some(t.strip_suffix('Z').unwrap_or(t))),
            None => (body, None),
        };
        let mut it = date.split('-');
        let (y, m, d) = match (it.next(), it.next(), it.next(), it.next()) {
            (Some(y), Some(m), Some(d), None) => (y, m, d),
            _ => return Err(bad()),
        };
        let digits = |x: &str, n: usize| x.len() == n && x.bytes().all(|b| b.is_ascii_digit());
        if y.len() < 4 || !y.bytes().all(|b| b.is_ascii_digit()) || !digits(m, 2) || !digits(d, 2) {
            return Err(bad());
        }
        let year: i64 = y.parse().map_err(|_| bad())?;
        let year = if neg { -year } else { year };
        let month = m.parse::<u8>().map_err(|_| bad())?.max(1);
        let day = d.parse::<u8>().map_err(|_| bad())?.max(1);
        let (hour, minute, second) = match time {
            None => (0, 0, 0),
            Some(t) => {
                let parts: Vec<&str> = t.split(':').collect();
                if parts.len() != 3 || !parts.iter().all(|p| digits(p, 2)) {
                    return Err(bad());
                }
                let n = |i: usize| parts[i].parse::<u8>().map_err(|_| bad());
                (n(0)?, n(1)?, n(2)?)
            }
        };
        Timestamp::new(year, month, day, hour, minute, second).map_err(|_| bad())
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_datetime_string())
    }
}

impl serde::Serialize for Timestamp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_datetime_string())
    }
}

/// Date or time with Wikibase precision codes (0 = billion years ... 9 = year,
/// 10 = month, 11 = day, 12 = hour, 13 = minute, 14 = second).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct TimeValue {
    timestamp: Timestamp,
    precision: u8,
    timezone: i32,
    calendar: Option<Item>,
}

impl TimeValue {
    pub const YEAR: u8 = 9;
    pub const MONTH: u8 = 10;
    pub const DAY: u8 = 11;
    pub const SECOND: u8 = 14;

    pub fn new(
        timestamp: Timestamp,
        precision: u8,
        timezone: i32,
        calendar: Option<Item>,
    ) -> Result<Self, ModelError> {
        if precision > Self::SECOND {
            return Err(ModelError::InvalidPrecision(precision));
        }
        Ok(TimeValue { timestamp: timestamp.truncated(precision), precision, timezone, calendar })
    }

    pub fn timestamp(&self) -> &Timestamp {
        &self.timestamp
    }

    pub fn precision(&self) -> u8 {
        self.precision
    }

    /// Offset in minutes.
    pub fn timezone(&self) -> i32 {
        self.timezone
    }

    pub fn calendar(&self) -> Option<&Item> {
        self.calendar.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_date_and_datetime() {
        let ts: Timestamp = "1903-01-01".parse().unwrap();
        assert_eq!(ts, Timestamp::date(1903, 1, 1).unwrap());
        let ts: Timestamp = "+2015-08-03T12:30:05Z".parse().unwrap();
        assert_eq!(ts, Timestamp::new(2015, 8, 3, 12, 30, 5).unwrap());
        let ts: Timestamp = "-0500-00-00T00:00:00Z".parse().unwrap();
        assert_eq!(ts.year, -500);
        assert_eq!(ts.to_date_string(), "-0500-01-01");
    }

    #[test]
    fn rejects_invalid_dates() {
        for s in ["1903-13-01", "1903-02-30", "1900-02-29", "03-01-01", "1903-01-01T25:00:00Z", "x"] {
            assert!(s.parse::<Timestamp>().is_err(), "{s}");
        }
        assert!("2000-02-29".parse::<Timestamp>().is_ok());
    }

    #[test]
    fn zero_fills_below_precision() {
        let ts = Timestamp::new(1903, 5, 17, 8, 30, 0).unwrap();
        let year = TimeValue::new(ts, 9, 0, None).unwrap();
        assert_eq!(year.timestamp().to_datetime_string(), "1903-01-01T00:00:00Z");
        let day = TimeValue::new(ts, 11, 0, None).unwrap();
        assert_eq!(day.timestamp().to_datetime_string(), "1903-05-17T00:00:00Z");
        let sec = TimeValue::new(ts, 14, 0, None).unwrap();
        assert_eq!(sec.timestamp(), &ts);
    }

    #[test]
    fn precision_out_of_range() {
        let ts = Timestamp::date(2000, 1, 1).unwrap();
        assert!(TimeValue::new(ts, 15, 0, None).is_err());
    }
}
