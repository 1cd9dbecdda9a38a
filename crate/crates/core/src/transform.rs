//! Differencing transforms: (1-B)^d (1-B^s)^D and its exact inverse.
//!
//! A differenced series keeps the original observations it consumed (the
//! warmup) so integration can reconstruct the original scale exactly, and so
//! forecasts made on the differenced scale can be carried back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Orders of regular and seasonal differencing plus the seasonal period.
///
/// Serializes with the conventional field names: `d`, `D`, `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDifferenceSpec")]
pub struct DifferenceSpec {
    d: usize,
    #[serde(rename = "D")]
    seasonal_d: usize,
    #[serde(rename = "s")]
    period: usize,
}

#[derive(Deserialize)]
struct RawDifferenceSpec {
    #[serde(default)]
    d: usize,
    #[serde(rename = "D", default)]
    seasonal_d: usize,
    #[serde(rename = "s")]
    period: usize,
}

impl TryFrom<RawDifferenceSpec> for DifferenceSpec {
    type Error = Error;

    fn try_from(raw: RawDifferenceSpec) -> Result<Self> {
        DifferenceSpec::new(raw.d, raw.seasonal_d, raw.period)
    }
}

impl DifferenceSpec {
    /// Orders above 2 indicate a modelling mistake for count data, so they
    /// are rejected rather than supported.
    pub fn new(d: usize, seasonal_d: usize, period: usize) -> Result<Self> {
        if d > 2 || seasonal_d > 2 {
            return Err(Error::BadSpec(format!(
                "difference orders d={d}, D={seasonal_d} exceed the supported maximum of 2"
            )));
        }
        if period == 0 {
            return Err(Error::BadSpec("seasonal period must be at least 1".into()));
        }
        Ok(DifferenceSpec { d, seasonal_d, period })
    }

    pub fn none(period: usize) -> Result<Self> {
        DifferenceSpec::new(0, 0, period)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seasonal_d(&self) -> usize {
        self.seasonal_d
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Number of leading observations consumed by the transform.
    pub fn warmup_len(&self) -> usize {
        self.d + self.seasonal_d * self.period
    }

    pub fn is_identity(&self) -> bool {
        self.warmup_len() == 0
    }

    /// Single-difference steps in application order: seasonal first, then
    /// regular. The operators commute; a fixed order keeps results and
    /// warmup bookkeeping reproducible.
    fn steps(&self) -> Vec<usize> {
        let mut lags = vec![self.period; self.seasonal_d];
        lags.extend(std::iter::repeat(1).take(self.d));
        lags
    }
}

/// A series on the differenced scale together with the spec that produced it
/// and the original observations needed to undo it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDifferencedSeries")]
pub struct DifferencedSeries {
    values: Vec<f64>,
    spec: DifferenceSpec,
    warmup: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDifferencedSeries {
    values: Vec<f64>,
    spec: DifferenceSpec,
    warmup: Vec<f64>,
}

impl TryFrom<RawDifferencedSeries> for DifferencedSeries {
    type Error = Error;

    fn try_from(raw: RawDifferencedSeries) -> Result<Self> {
        DifferencedSeries::from_parts(raw.values, raw.spec, raw.warmup)
    }
}

fn diff_step(values: &[f64], lag: usize) -> Vec<f64> {
    (lag..values.len()).map(|i| values[i] - values[i - lag]).collect()
}

impl DifferencedSeries {
    /// Reassembles a differenced series, e.g. from a serialized model.
    /// The warmup must be exactly the d + D*s observations the spec consumes.
    pub fn from_parts(values: Vec<f64>, spec: DifferenceSpec, warmup: Vec<f64>) -> Result<Self> {
        if warmup.len() != spec.warmup_len() {
            return Err(Error::WarmupMismatch { expected: spec.warmup_len(), got: warmup.len() });
        }
        Ok(DifferencedSeries { values, spec, warmup })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spec(&self) -> DifferenceSpec {
        self.spec
    }

    pub fn warmup(&self) -> &[f64] {
        &self.warmup
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inverts the differencing for the stored values followed by
    /// `extension` (typically forecasts on the differenced scale).
    ///
    /// Returns the complete original-scale series: the warmup, the
    /// observations the stored values correspond to, then the continuation
    /// for the extension. With an empty extension this reproduces the
    /// original series exactly; warmup observations are returned verbatim,
    /// never recomputed.
    pub fn integrate(&self, extension: &[f64]) -> Result<Vec<f64>> {
        // Re-derive each intermediate level's known prefix from the warmup.
        // After j of the steps, m - (lags applied so far) originals remain
        // known, which is exactly the initial segment each undo step needs.
        let lags = self.spec.steps();
        let mut prefixes = Vec::with_capacity(lags.len());
        let mut prefix = self.warmup.clone();
        for &lag in &lags {
            prefixes.push(prefix.clone());
            prefix = diff_step(&prefix, lag);
        }

        let mut cur: Vec<f64> = self.values.iter().chain(extension).copied().collect();
        for (&lag, prefix) in lags.iter().zip(prefixes).rev() {
            let mut level = prefix;
            for (t, &v) in cur.iter().enumerate() {
                if t + lag >= level.len() {
                    let base = level[t];
                    level.push(base + v);
                }
            }
            cur = level;
        }
        Ok(cur)
    }
}

/// Applies (1-B^s)^D then (1-B)^d to raw values.
/// Needs strictly more observations than the warmup the spec consumes.
pub fn difference(values: &[f64], spec: DifferenceSpec) -> Result<DifferencedSeries> {
    let m = spec.warmup_len();
    if values.len() <= m {
        return Err(Error::SeriesTooShort { needed: m + 1, got: values.len() });
    }
    let warmup = values[..m].to_vec();
    let mut cur = values.to_vec();
    for lag in spec.steps() {
        cur = diff_step(&cur, lag);
    }
    DifferencedSeries::from_parts(cur, spec, warmup)
}

impl TimeSeries {
    pub fn difference(&self, spec: DifferenceSpec) -> Result<DifferencedSeries> {
        difference(self.values(), spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: usize, seasonal_d: usize, period: usize) -> DifferenceSpec {
        DifferenceSpec::new(d, seasonal_d, period).unwrap()
    }

    #[test]
    fn rejects_orders_above_two() {
        assert!(DifferenceSpec::new(3, 0, 12).is_err());
        assert!(DifferenceSpec::new(0, 3, 12).is_err());
        assert!(DifferenceSpec::new(0, 0, 0).is_err());
        assert!(DifferenceSpec::new(2, 2, 12).is_ok());
    }

    #[test]
    fn seasonal_difference_of_ramp_is_constant() {
        let values: Vec<f64> = (1..=24).map(f64::from).collect();
        let z = difference(&values, spec(0, 1, 12)).unwrap();
        assert_eq!(z.values(), &[12.0; 12]);
        assert_eq!(z.warmup(), &values[..12]);
    }

    #[test]
    fn regular_difference_matches_hand_computation() {
        let values = [5.0, 7.0, 4.0, 4.0, 9.0];
        let z = difference(&values, spec(1, 0, 12)).unwrap();
        assert_eq!(z.values(), &[2.0, -3.0, 0.0, 5.0]);
        assert_eq!(z.warmup(), &[5.0]);
    }

    #[test]
    fn length_shrinks_by_warmup() {
        let values: Vec<f64> = (0..40).map(|i| (i as f64).sin() * 7.0 + i as f64).collect();
        for (d, sd) in [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2)] {
            let sp = spec(d, sd, 12);
            let z = difference(&values, sp).unwrap();
            assert_eq!(z.len(), values.len() - sp.warmup_len());
        }
    }

    #[test]
    fn too_short_series_reports_required_minimum() {
        let values = [1.0; 13];
        match difference(&values, spec(1, 1, 12)) {
            Err(Error::SeriesTooShort { needed, got }) => {
                assert_eq!(needed, 14);
                assert_eq!(got, 13);
            }
            other => panic!("expected SeriesTooShort, got {other:?}"),
        }
    }

    #[test]
    fn integrate_round_trips_exactly() {
        let values: Vec<f64> = (0..60)
            .map(|i| 1000.0 + (i as f64 * 0.7).sin() * 300.0 + i as f64 * 2.5)
            .collect();
        for (d, sd) in [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2)] {
            let z = difference(&values, spec(d, sd, 12)).unwrap();
            let back = z.integrate(&[]).unwrap();
            assert_eq!(back, values, "d={d} D={sd}");
        }
    }

    #[test]
    fn integrate_extends_on_the_original_scale() {
        // With D=1 a zero extension repeats the last season.
        let values: Vec<f64> = (1..=24).map(f64::from).collect();
        let z = difference(&values, spec(0, 1, 12)).unwrap();
        let full = z.integrate(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(full.len(), 27);
        assert_eq!(&full[..24], values.as_slice());
        assert_eq!(&full[24..], &[13.0, 14.0, 15.0]);
    }

    #[test]
    fn operators_commute() {
        let values: Vec<f64> = (0..50).map(|i| (i as f64 * 1.3).cos() * 10.0 + i as f64).collect();
        let both = difference(&values, spec(1, 1, 12)).unwrap();
        // Apply in the opposite order by hand.
        let regular_first = diff_step(&values, 1);
        let then_seasonal = diff_step(&regular_first, 12);
        for (a, b) in both.values().iter().zip(&then_seasonal) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn differencing_is_linear() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.9).sin() * 4.0).collect();
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * 0.4).cos() * 9.0).collect();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 2.5 * a - 1.5 * b).collect();
        let sp = spec(1, 1, 12);
        let dx = difference(&x, sp).unwrap();
        let dy = difference(&y, sp).unwrap();
        let dc = difference(&combo, sp).unwrap();
        for i in 0..dc.len() {
            let expected = 2.5 * dx.values()[i] - 1.5 * dy.values()[i];
            assert!((dc.values()[i] - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn from_parts_validates_warmup_length() {
        let err = DifferencedSeries::from_parts(vec![1.0], spec(1, 1, 12), vec![0.0; 5]);
        assert!(matches!(err, Err(Error::WarmupMismatch { expected: 13, got: 5 })));
    }
}
