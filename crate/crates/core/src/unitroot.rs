//! Augmented Dickey-Fuller unit-root testing and the differencing decision.
//!
//! The test regression is the constant-only variant
//! dy_t = alpha + theta * y_{t-1} + sum_{i=1..k} beta_i * dy_{t-i} + e_t,
//! the form appropriate for count series that fluctuate around a nonzero
//! level without a deterministic trend. The null of a unit root is
//! theta = 0; rejection means the series is already stationary.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::correlogram::acf;
use crate::error::{Error, Result};
use crate::ols::ols;
use crate::series::TimeSeries;
use crate::transform::{difference, DifferenceSpec};

/// Deterministic terms included in the test regression. Only the
/// constant-only variant is implemented; the enum records that choice in
/// results explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Deterministic {
    Constant,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalValues {
    pub pct1: f64,
    pub pct5: f64,
    pub pct10: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdfResult {
    pub t_stat: f64,
    pub p_value: f64,
    pub critical: CriticalValues,
    /// Number of lagged-difference terms chosen by AIC (or fixed by the caller).
    pub lags_used: usize,
    /// Rows in the final test regression.
    pub nobs: usize,
    pub deterministic: Deterministic,
}

impl AdfResult {
    /// Unit-root rejection at the conventional 5% level.
    pub fn rejects_at_5pct(&self) -> bool {
        self.p_value <= 0.05
    }
}

// MacKinnon (2010) response-surface coefficients for the constant-only
// case: cv(n) = b0 + b1/n + b2/n^2 + b3/n^3 per significance level.
const CV_COEFFS: [(f64, [f64; 4]); 3] = [
    (0.01, [-3.43035, -6.5393, -16.786, -79.433]),
    (0.05, [-2.86154, -2.8903, -4.234, -40.040]),
    (0.10, [-2.56677, -1.5384, -2.809, 0.0]),
];

// MacKinnon (1996) approximate asymptotic p-value surface for the
// constant-only case: p = Phi(poly(t)), with a quadratic branch below
// TAU_STAR and a cubic branch above, clamped outside [TAU_MIN, TAU_MAX].
const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 3.8269e-2];
const LARGE_P: [f64; 4] = [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2];

/// Finite-sample critical values for a test regression with `nobs` rows.
pub fn mackinnon_critical_values(nobs: usize) -> CriticalValues {
    let n = nobs as f64;
    let eval = |b: &[f64; 4]| b[0] + b[1] / n + b[2] / (n * n) + b[3] / (n * n * n);
    CriticalValues {
        pct1: eval(&CV_COEFFS[0].1),
        pct5: eval(&CV_COEFFS[1].1),
        pct10: eval(&CV_COEFFS[2].1),
    }
}

fn polyval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Asymptotic p-value for an ADF t-statistic (constant-only case).
/// Monotone non-decreasing in `t`; clamps to 0 and 1 outside the fitted range.
pub fn mackinnon_p_value(t: f64) -> f64 {
    if t > TAU_MAX {
        return 1.0;
    }
    if t < TAU_MIN {
        return 0.0;
    }
    let poly = if t <= TAU_STAR {
        polyval(&SMALL_P, t)
    } else {
        polyval(&LARGE_P, t)
    };
    norm_cdf(poly)
}

/// Schwert's rule of thumb for the largest lag worth trying.
fn schwert_max_lag(t: usize) -> usize {
    (12.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Runs the ADF test. `max_lags` bounds the lagged-difference terms; when
/// `None`, Schwert's rule picks the bound (capped so the regression keeps
/// at least 20 observations). The lag actually used minimizes AIC over
/// 0..=max_lags on a common sample, then the test regression is re-run on
/// the full sample available for that lag.
pub fn adf_test(values: &[f64], max_lags: Option<usize>) -> Result<AdfResult> {
    let t = values.len();
    if let Some(m) = max_lags {
        if t < 20 + m {
            return Err(Error::SeriesTooShort { needed: 20 + m, got: t });
        }
    } else if t < 21 {
        return Err(Error::SeriesTooShort { needed: 21, got: t });
    }
    let max_lag = max_lags.unwrap_or_else(|| schwert_max_lag(t).min(t - 20));

    let mean = values.iter().sum::<f64>() / t as f64;
    if values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() <= 0.0 {
        return Err(Error::DegenerateSeries);
    }

    let dy: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();

    // Candidate lags compete on the same estimation sample, otherwise AIC
    // differences reflect sample size rather than fit.
    let mut best: Option<(usize, f64)> = None;
    for k in 0..=max_lag {
        let (cols, _names, y) = build_regression(values, &dy, k, max_lag);
        let n = y.len() as f64;
        let fit = ols(&cols, &vec![""; cols.len()], &y)?;
        let aic = n * (fit.rss / n).ln() + 2.0 * (k as f64 + 2.0);
        if best.map_or(true, |(_, best_aic)| aic < best_aic) {
            best = Some((k, aic));
        }
    }
    let lags_used = best.expect("at least lag 0 is evaluated").0;

    // Final regression on everything the chosen lag allows.
    let (cols, names, y) = build_regression(values, &dy, lags_used, lags_used);
    let nobs = y.len();
    let names_ref: Vec<&str> = names.iter().map(String::as_str).collect();
    let fit = ols(&cols, &names_ref, &y)?;
    let t_stat = fit.t_stats[1];

    Ok(AdfResult {
        t_stat,
        p_value: mackinnon_p_value(t_stat),
        critical: mackinnon_critical_values(nobs),
        lags_used,
        nobs,
        deterministic: Deterministic::Constant,
    })
}

/// Assembles the test regression for `k` lagged differences, starting the
/// sample where `start_lag` lags would fit so lag candidates share rows.
fn build_regression(
    values: &[f64],
    dy: &[f64],
    k: usize,
    start_lag: usize,
) -> (Vec<Vec<f64>>, Vec<String>, Vec<f64>) {
    let rows: Vec<usize> = (start_lag..dy.len()).collect();
    let mut cols = Vec::with_capacity(k + 2);
    let mut names = Vec::with_capacity(k + 2);
    cols.push(vec![1.0; rows.len()]);
    names.push("const".to_string());
    cols.push(rows.iter().map(|&i| values[i]).collect());
    names.push("level".to_string());
    for lag in 1..=k {
        cols.push(rows.iter().map(|&i| dy[i - lag]).collect());
        names.push(format!("dy_lag{lag}"));
    }
    let y = rows.iter().map(|&i| dy[i]).collect();
    (cols, names, y)
}

/// Which single differencing step, if any, the unit-root evidence calls for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Differencing {
    None,
    Regular,
    Seasonal,
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferencingCandidate {
    pub kind: Differencing,
    pub adf: AdfResult,
    /// Autocorrelations outside the +/-2/sqrt(T) band over lags 1..=36
    /// (fewer when the variant is short).
    pub significant_lags: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferencingDecision {
    pub recommendation: Differencing,
    pub candidates: Vec<DifferencingCandidate>,
}

/// Compares the original series, its first difference, and its seasonal
/// difference. Among the variants that reject the unit root at 5%, the one
/// with the fewest significant autocorrelation spikes wins; ties prefer the
/// seasonal difference (the strongest simplification of a seasonal series),
/// then the untransformed series. If no variant rejects, the smallest
/// p-value wins under the same tie order.
pub fn decide_differencing(ts: &TimeSeries) -> Result<DifferencingDecision> {
    let s = ts.frequency();
    if s < 2 {
        return Err(Error::UnsupportedFrequency { got: s, expected: 12 });
    }
    let variants = [
        (Differencing::None, DifferenceSpec::none(s)?),
        (Differencing::Regular, DifferenceSpec::new(1, 0, s)?),
        (Differencing::Seasonal, DifferenceSpec::new(0, 1, s)?),
    ];

    let mut candidates = Vec::with_capacity(variants.len());
    for (kind, spec) in variants {
        let z = difference(ts.values(), spec)?;
        let adf = adf_test(z.values(), None)?;
        let t = z.len();
        let max_lag = 36.min(t / 2);
        let band = 2.0 / (t as f64).sqrt();
        let significant_lags = acf(z.values(), max_lag)?
            .iter()
            .filter(|r| r.abs() > band)
            .count();
        candidates.push(DifferencingCandidate { kind, adf, significant_lags });
    }

    let tie_rank = |kind: Differencing| match kind {
        Differencing::Seasonal => 0,
        Differencing::None => 1,
        Differencing::Regular => 2,
    };
    let stationary: Vec<&DifferencingCandidate> =
        candidates.iter().filter(|c| c.adf.rejects_at_5pct()).collect();
    let recommendation = if stationary.is_empty() {
        candidates
            .iter()
            .min_by(|a, b| {
                a.adf
                    .p_value
                    .total_cmp(&b.adf.p_value)
                    .then(tie_rank(a.kind).cmp(&tie_rank(b.kind)))
            })
            .expect("three candidates")
            .kind
    } else {
        stationary
            .iter()
            .min_by(|a, b| {
                a.significant_lags
                    .cmp(&b.significant_lags)
                    .then(tie_rank(a.kind).cmp(&tie_rank(b.kind)))
            })
            .expect("non-empty")
            .kind
    };

    Ok(DifferencingDecision { recommendation, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values_match_published_monthly_sample() {
        // At the regression size of a 14-year monthly series these agree
        // with the published table to two decimals.
        let cv = mackinnon_critical_values(167);
        assert!((cv.pct1 - (-3.476)).abs() < 0.01, "{}", cv.pct1);
        assert!((cv.pct5 - (-2.882)).abs() < 0.01, "{}", cv.pct5);
        assert!((cv.pct10 - (-2.578)).abs() < 0.01, "{}", cv.pct10);
    }

    #[test]
    fn critical_values_tighten_with_sample_size() {
        let small = mackinnon_critical_values(25);
        let large = mackinnon_critical_values(10_000);
        assert!(small.pct5 < large.pct5);
        assert!((large.pct5 - (-2.86154)).abs() < 1e-2);
    }

    #[test]
    fn p_values_calibrate_against_critical_values() {
        // The p-value at each critical value should be near its level.
        let cv = mackinnon_critical_values(167);
        assert!((mackinnon_p_value(cv.pct1) - 0.01).abs() < 0.002);
        assert!((mackinnon_p_value(cv.pct5) - 0.05).abs() < 0.005);
        assert!((mackinnon_p_value(cv.pct10) - 0.10).abs() < 0.005);
    }

    #[test]
    fn p_value_is_monotone_and_clamped() {
        let mut prev = -0.1;
        let mut t = -20.0;
        while t <= 3.5 {
            let p = mackinnon_p_value(t);
            assert!(p >= prev, "p-value decreased at t={t}");
            assert!((0.0..=1.0).contains(&p));
            prev = p;
            t += 0.05;
        }
        assert_eq!(mackinnon_p_value(-25.0), 0.0);
        assert_eq!(mackinnon_p_value(5.0), 1.0);
    }

    #[test]
    fn stationary_noise_rejects_unit_root() {
        // A deterministic mean-reverting sequence: x_t = 0.2 x_{t-1} + bounded input.
        let mut values = vec![0.0];
        for i in 1..200 {
            let shock = ((i * 37) % 17) as f64 - 8.0;
            values.push(0.2 * values[i - 1] + shock);
        }
        let res = adf_test(&values, None).unwrap();
        assert!(res.t_stat < res.critical.pct1);
        assert!(res.p_value < 0.01);
        assert!(res.rejects_at_5pct());
    }

    #[test]
    fn random_walk_fails_to_reject() {
        // A cumulative sum of bounded pseudo-shocks keeps its unit root.
        let mut values = vec![0.0];
        let mut state = 9_u64;
        for _ in 1..300 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let shock = ((state >> 33) as f64 / 2_f64.powi(31)) - 0.5;
            values.push(values.last().unwrap() + shock);
        }
        let res = adf_test(&values, None).unwrap();
        assert!(res.p_value > 0.05, "random walk rejected: p={}", res.p_value);
    }

    #[test]
    fn t_stat_is_affine_invariant() {
        let values: Vec<f64> = (0..120)
            .map(|i| (i as f64 * 0.7).sin() * 5.0 + ((i * 13) % 7) as f64)
            .collect();
        let scaled: Vec<f64> = values.iter().map(|v| 250.0 + 40.0 * v).collect();
        let a = adf_test(&values, Some(6)).unwrap();
        let b = adf_test(&scaled, Some(6)).unwrap();
        assert_eq!(a.lags_used, b.lags_used);
        assert!((a.t_stat - b.t_stat).abs() < 1e-8);
    }

    #[test]
    fn preconditions_are_enforced() {
        let short = vec![1.0, 2.0, 3.0];
        assert!(matches!(adf_test(&short, None), Err(Error::SeriesTooShort { .. })));
        let constant = vec![5.0; 60];
        assert!(matches!(adf_test(&constant, None), Err(Error::DegenerateSeries)));
        let ok: Vec<f64> = (0..40).map(|i| ((i * 11) % 13) as f64).collect();
        assert!(matches!(
            adf_test(&ok, Some(30)),
            Err(Error::SeriesTooShort { needed: 50, got: 40 })
        ));
    }

    #[test]
    fn lag_zero_matches_plain_dickey_fuller() {
        // With max_lags = 0 the statistic is the simple DF regression's.
        let values: Vec<f64> = (0..80).map(|i| ((i * 29) % 23) as f64).collect();
        let res = adf_test(&values, Some(0)).unwrap();
        assert_eq!(res.lags_used, 0);
        assert_eq!(res.nobs, 79);
        // Independent computation via the ols helper.
        let dy: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let cols = vec![vec![1.0; 79], values[..79].to_vec()];
        let fit = crate::ols::ols(&cols, &["const", "level"], &dy).unwrap();
        assert!((res.t_stat - fit.t_stats[1]).abs() < 1e-12);
    }
}
