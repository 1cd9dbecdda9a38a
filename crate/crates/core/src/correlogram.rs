//! Sample autocorrelations, partial autocorrelations, and Ljung-Box
//! portmanteau statistics: the identification-stage summaries.

use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// Autocorrelations r_1..r_max_lag.
///
/// Uses the biased estimator: mean-centered lag products divided by the
/// full-sample sum of squares. This is the convention whose Ljung-Box
/// statistics match the standard packages, and it guarantees |r_k| <= 1.
pub fn acf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let t = values.len();
    if t < max_lag + 1 {
        return Err(Error::SeriesTooShort { needed: max_lag + 1, got: t });
    }
    let mean = values.iter().sum::<f64>() / t as f64;
    let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if denom <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    Ok((1..=max_lag)
        .map(|k| dev[..t - k].iter().zip(&dev[k..]).map(|(a, b)| a * b).sum::<f64>() / denom)
        .collect())
}

/// Partial autocorrelations phi_11..phi_kk via the Durbin-Levinson
/// recursion on the sample autocorrelations.
///
/// Requires max_lag < T/2 so the implied autoregressions keep enough
/// degrees of freedom to be meaningful.
pub fn pacf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if 2 * max_lag >= values.len() {
        return Err(Error::SeriesTooShort { needed: 2 * max_lag + 1, got: values.len() });
    }
    let r = acf(values, max_lag)?;
    durbin_levinson(&r)
}

fn durbin_levinson(r: &[f64]) -> Result<Vec<f64>> {
    let max_lag = r.len();
    let mut pac = Vec::with_capacity(max_lag);
    let mut phi_prev: Vec<f64> = Vec::new();
    for k in 1..=max_lag {
        let phi_kk = if k == 1 {
            r[0]
        } else {
            let num = r[k - 1] - phi_prev.iter().zip(r.iter().rev().skip(max_lag - k + 1)).fold(
                0.0,
                |acc, (phi, rv)| acc + phi * rv,
            );
            // num = r_k - sum_j phi_{k-1,j} r_{k-j}; the reversed iterator
            // pairs phi_j with r_{k-j}.
            let den = 1.0 - phi_prev.iter().zip(r.iter()).fold(0.0, |acc, (phi, rv)| acc + phi * rv);
            if den.abs() <= 1e-12 {
                return Err(Error::NumericalDegeneracy(format!(
                    "Durbin-Levinson pivot vanished at lag {k}"
                )));
            }
            num / den
        };
        let mut phi_k = Vec::with_capacity(k);
        for j in 0..k - 1 {
            phi_k.push(phi_prev[j] - phi_kk * phi_prev[k - 2 - j]);
        }
        phi_k.push(phi_kk);
        pac.push(phi_kk);
        phi_prev = phi_k;
    }
    Ok(pac)
}

/// Upper tail of the chi-square distribution via the regularized upper
/// incomplete gamma function.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(df / 2.0, x / 2.0)
}

/// Cumulative Ljung-Box statistics Q(1)..Q(max) from autocorrelations of a
/// length-`t` series, with p-values against chi-square(k - df_adjust).
///
/// p-values are `None` for lags k <= df_adjust, where the reference
/// distribution has no degrees of freedom; `df_adjust` is the number of
/// estimated ARMA coefficients when testing residuals, 0 for raw series.
pub fn ljung_box(ac: &[f64], t: usize, df_adjust: usize) -> Vec<(f64, Option<f64>)> {
    let tf = t as f64;
    let mut q = 0.0;
    ac.iter()
        .enumerate()
        .map(|(i, r)| {
            let k = i + 1;
            q += tf * (tf + 2.0) * r * r / (tf - k as f64);
            let prob =
                (k > df_adjust).then(|| chi_square_sf(q, (k - df_adjust) as f64));
            (q, prob)
        })
        .collect()
}

/// The identification-stage table: AC, PAC, Q-statistics and their
/// p-values for lags 1..max_lag, plus the +/-2/sqrt(T) significance band.
#[derive(Clone, Debug, Serialize)]
pub struct Correlogram {
    pub sample_size: usize,
    pub ac: Vec<f64>,
    pub pac: Vec<f64>,
    pub q_stat: Vec<f64>,
    pub q_prob: Vec<Option<f64>>,
    /// Half-width of the flat significance band, 2/sqrt(T).
    pub band: f64,
}

impl Correlogram {
    pub fn compute(values: &[f64], max_lag: usize, df_adjust: usize) -> Result<Self> {
        let ac = acf(values, max_lag)?;
        let pac = pacf(values, max_lag)?;
        let t = values.len();
        let q = ljung_box(&ac, t, df_adjust);
        let (q_stat, q_prob) = q.into_iter().unzip();
        Ok(Correlogram {
            sample_size: t,
            ac,
            pac,
            q_stat,
            q_prob,
            band: 2.0 / (t as f64).sqrt(),
        })
    }

    pub fn max_lag(&self) -> usize {
        self.ac.len()
    }

    /// Lags (1-based) whose autocorrelation sticks out of the band.
    pub fn significant_ac_lags(&self) -> Vec<usize> {
        significant(&self.ac, self.band)
    }

    /// Lags (1-based) whose partial autocorrelation sticks out of the band.
    pub fn significant_pac_lags(&self) -> Vec<usize> {
        significant(&self.pac, self.band)
    }
}

fn significant(values: &[f64], band: f64) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > band)
        .map(|(i, _)| i + 1)
        .collect()
}
