//! Monthly time series: periods, the series container, and CSV ingestion.
//!
//! The CSV dialect is deliberately strict: a `period,value` header, one
//! `YYYY-MM,value` row per month, consecutive months, no gaps, no missing
//! values. Count data with holes should be repaired upstream, not silently
//! interpolated here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A calendar month, e.g. 1993-01.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Period {
    year: i32,
    month: u32,
}

impl Period {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::BadSpec(format!("month {month} out of range 1..=12")));
        }
        Ok(Period { year, month })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    /// 1-based month within the year.
    pub fn month(&self) -> u32 {
        self.month
    }

    /// The month `n` steps later (or earlier for negative `n`).
    /// Fails only when the year leaves the `i32` range.
    pub fn plus_months(&self, n: i64) -> Result<Self> {
        let abs = i64::from(self.year) * 12 + i64::from(self.month) - 1;
        let shifted = abs.checked_add(n).ok_or(Error::HorizonOverflow)?;
        let year = shifted.div_euclid(12);
        let month = shifted.rem_euclid(12) as u32 + 1;
        if year < i64::from(i32::MIN) || year > i64::from(i32::MAX) {
            return Err(Error::HorizonOverflow);
        }
        Ok(Period { year: year as i32, month })
    }

    pub fn next(&self) -> Result<Self> {
        self.plus_months(1)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadSpec(format!("period '{s}' is not of the form YYYY-MM"));
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        let year: i32 = y.parse().map_err(|_| bad())?;
        if m.len() != 2 {
            return Err(bad());
        }
        let month: u32 = m.parse().map_err(|_| bad())?;
        Period::new(year, month)
    }
}

impl From<Period> for String {
    fn from(p: Period) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Period {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// An evenly spaced monthly series. `frequency` is the number of observations
/// per seasonal cycle (12 for monthly data with an annual season).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct TimeSeries {
    start: Period,
    frequency: usize,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSeries {
    start: Period,
    frequency: usize,
    values: Vec<f64>,
}

impl TryFrom<RawSeries> for TimeSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        TimeSeries::new(raw.start, raw.values, raw.frequency)
    }
}

impl TimeSeries {
    pub fn new(start: Period, values: Vec<f64>, frequency: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SeriesTooShort { needed: 1, got: 0 });
        }
        if frequency == 0 {
            return Err(Error::BadSpec("frequency must be at least 1".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadSpec(format!("value at index {i} is not finite")));
        }
        Ok(TimeSeries { start, frequency, values })
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn frequency(&self) -> usize {
        self.frequency
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty series
    }

    pub fn period_at(&self, index: usize) -> Result<Period> {
        self.start.plus_months(index as i64)
    }

    pub fn last_period(&self) -> Period {
        // Construction guarantees at least one value and an in-range start,
        // so only absurd lengths could overflow; treat that as a bug.
        self.start
            .plus_months(self.values.len() as i64 - 1)
            .expect("period range exhausted")
    }
}

/// Parses the strict `period,value` CSV dialect.
///
/// Errors name the offending 1-based line, including the expected month when
/// a gap is found.
pub fn ingest_csv(text: &str) -> Result<TimeSeries> {
    let fail = |line: usize, reason: String| Error::Ingest { line, reason };
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| fail(1, "empty input, expected a 'period,value' header".into()))?;
    if header.trim() != "period,value" {
        return Err(fail(1, format!("expected header 'period,value', got '{}'", header.trim())));
    }

    let mut start: Option<Period> = None;
    let mut prev: Option<Period> = None;
    let mut values = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue; // tolerate a trailing newline
        }
        let (p, v) = line
            .split_once(',')
            .ok_or_else(|| fail(lineno, "expected two comma-separated fields".into()))?;
        let period: Period = p
            .trim()
            .parse()
            .map_err(|_| fail(lineno, format!("period '{}' is not of the form YYYY-MM", p.trim())))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| fail(lineno, format!("value '{}' is not numeric", v.trim())))?;
        if !value.is_finite() {
            return Err(fail(lineno, format!("value '{}' is not finite", v.trim())));
        }
        if let Some(prev) = prev {
            let expected = prev.next()?;
            if period == prev {
                return Err(fail(lineno, format!("duplicate period {period}")));
            }
            if period != expected {
                return Err(fail(lineno, format!("gap at {expected}")));
            }
        }
        if start.is_none() {
            start = Some(period);
        }
        prev = Some(period);
        values.push(value);
    }

    let start = start.ok_or_else(|| fail(2, "no data rows".into()))?;
    TimeSeries::new(start, values, 12)
}

/// Canonical CSV form; `ingest_csv(emit_csv(ts))` reproduces `ts` exactly.
/// Values print with just enough digits to round-trip.
pub fn emit_csv(ts: &TimeSeries) -> String {
    let mut out = String::from("period,value\n");
    let mut period = ts.start();
    for (i, v) in ts.values().iter().enumerate() {
        if i > 0 {
            period = period.next().expect("period range exhausted");
        }
        out.push_str(&format!("{period},{v}\n"));
    }
    out
}

/// A year-by-month view of a monthly series, for eyeballing seasonal shape.
#[derive(Clone, Debug, Serialize)]
pub struct SeasonalPivot {
    first_year: i32,
    rows: Vec<[Option<f64>; 12]>,
}

impl SeasonalPivot {
    /// The calendar years covered, one per row.
    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.rows.len()).map(move |i| self.first_year + i as i32)
    }

    pub fn rows(&self) -> &[[Option<f64>; 12]] {
        &self.rows
    }

    /// Per-month means over the years where the month is present;
    /// `None` for months never observed.
    pub fn column_means(&self) -> [Option<f64>; 12] {
        let mut means = [None; 12];
        for (m, mean) in means.iter_mut().enumerate() {
            let cells: Vec<f64> = self.rows.iter().filter_map(|row| row[m]).collect();
            if !cells.is_empty() {
                *mean = Some(cells.iter().sum::<f64>() / cells.len() as f64);
            }
        }
        means
    }

    /// 1-based month with the highest column mean; earliest month wins ties.
    pub fn peak_month(&self) -> u32 {
        self.extreme_month(|best, cand| cand > best)
    }

    /// 1-based month with the lowest column mean; earliest month wins ties.
    pub fn trough_month(&self) -> u32 {
        self.extreme_month(|best, cand| cand < best)
    }

    fn extreme_month(&self, better: impl Fn(f64, f64) -> bool) -> u32 {
        let means = self.column_means();
        let mut month = 0;
        let mut best = f64::NAN;
        for (m, mean) in means.iter().enumerate() {
            if let Some(v) = mean {
                if best.is_nan() || better(best, *v) {
                    best = *v;
                    month = m;
                }
            }
        }
        month as u32 + 1
    }
}

/// Arranges a monthly series into calendar-year rows. Cells outside the
/// observed range stay empty; every observed value lands in the cell of its
/// own period.
pub fn seasonal_pivot(ts: &TimeSeries) -> Result<SeasonalPivot> {
    if ts.frequency() != 12 {
        return Err(Error::UnsupportedFrequency { got: ts.frequency(), expected: 12 });
    }
    let first_year = ts.start().year();
    let last_year = ts.last_period().year();
    let mut rows = vec![[None; 12]; (last_year - first_year + 1) as usize];
    let mut period = ts.start();
    for (i, v) in ts.values().iter().enumerate() {
        if i > 0 {
            period = period.next()?;
        }
        rows[(period.year() - first_year) as usize][period.month() as usize - 1] = Some(*v);
    }
    Ok(SeasonalPivot { first_year, rows })
}
