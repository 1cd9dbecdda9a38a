//! Point forecasts on the original scale and forecast accuracy measures.
//!
//! Forecasting runs the model recursion forward on the differenced scale
//! with future shocks at their conditional mean of zero, then undoes the
//! differencing. The accuracy measures are the usual quartet: RMSE, MAD,
//! MAPE, and the bounded Theil U.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sarima::FittedModel;
use crate::series::Period;

/// Multi-step point forecasts. `points[0]` is the value for the month after
/// `origin`.
#[derive(Clone, Debug, Serialize)]
pub struct ForecastResult {
    pub origin: Period,
    pub horizon: usize,
    pub points: Vec<f64>,
}

impl ForecastResult {
    /// Period of `points[i]`.
    pub fn period_at(&self, i: usize) -> Result<Period> {
        self.origin.plus_months(i as i64 + 1)
    }
}

/// Conditional-expectation forecasts `horizon` steps past the estimation
/// sample.
///
/// On the differenced scale each step is
/// `z_hat = delta - sum ar_k z_(t-k) + sum ma_j a_(t-j)` with stored values
/// and residuals while the indices stay in sample, forecasts feeding back in
/// afterwards, and future shocks zero. The differencing inversion then lifts
/// the extension to the original scale.
pub fn forecast(model: &FittedModel, horizon: usize) -> Result<ForecastResult> {
    if horizon < 1 {
        return Err(Error::InvalidConfig("forecast horizon must be at least 1".into()));
    }
    let origin = model.origin();
    // Fail before computing anything if the calendar cannot hold the result.
    origin.plus_months(horizon as i64)?;

    let z = model.data().values();
    let a = model.residuals();
    let t_len = z.len();
    let ar_terms = model.ar_poly().nonzero_lags();
    let ma_terms = model.ma_poly().nonzero_lags();

    let mut extension: Vec<f64> = Vec::with_capacity(horizon);
    for h in 0..horizon {
        let idx = t_len + h;
        let mut v = model.delta();
        for &(lag, c) in &ar_terms {
            if idx >= lag {
                let j = idx - lag;
                let zval = if j < t_len { z[j] } else { extension[j - t_len] };
                v -= c * zval;
            }
            // Pre-sample values are zero, matching the residual recursion.
        }
        for &(lag, m) in &ma_terms {
            if idx >= lag {
                let j = idx - lag;
                if j < t_len {
                    v += m * a[j];
                }
                // Future shocks enter at their conditional mean of zero.
            }
        }
        extension.push(v);
    }

    let full = model.data().integrate(&extension)?;
    let points = full[full.len() - horizon..].to_vec();
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NumericalDegeneracy("forecast produced non-finite values".into()));
    }
    Ok(ForecastResult { origin, horizon, points })
}

/// One-step-ahead fitted values on the original scale, aligned with the
/// model residuals (the first d + D*s observations have no fitted value).
/// Satisfies y_t - fitted_t = residual_t.
pub fn fitted_values(model: &FittedModel) -> Result<Vec<f64>> {
    let y = model.data().integrate(&[])?;
    let warmup = model.data().warmup().len();
    Ok(y[warmup..]
        .iter()
        .zip(model.residuals())
        .map(|(y, a)| y - a)
        .collect())
}

/// Forecast accuracy measures. MAPE is absent when any actual value is zero
/// (the percentage is undefined there); everything else is always reported.
#[derive(Clone, Debug, Serialize)]
pub struct AccuracyReport {
    pub rmse: f64,
    pub mad: f64,
    pub mape: Option<f64>,
    pub theil_u: f64,
}

pub fn accuracy(actual: &[f64], predicted: &[f64]) -> Result<AccuracyReport> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch { left: actual.len(), right: predicted.len() });
    }
    if actual.is_empty() {
        return Err(Error::SeriesTooShort { needed: 1, got: 0 });
    }
    if actual.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("accuracy inputs must be finite".into()));
    }
    let n = actual.len() as f64;
    let mut sq = 0.0;
    let mut abs = 0.0;
    let mut pct = 0.0;
    let mut pct_defined = true;
    let mut sq_a = 0.0;
    let mut sq_p = 0.0;
    for (a, p) in actual.iter().zip(predicted) {
        let e = a - p;
        sq += e * e;
        abs += e.abs();
        if *a == 0.0 {
            pct_defined = false;
        } else {
            pct += (e / a).abs();
        }
        sq_a += a * a;
        sq_p += p * p;
    }
    let rmse = (sq / n).sqrt();
    let denom = (sq_a / n).sqrt() + (sq_p / n).sqrt();
    // Zero denominator means both series are identically zero, a perfect
    // forecast.
    let theil_u = if denom == 0.0 { 0.0 } else { rmse / denom };
    Ok(AccuracyReport {
        rmse,
        mad: abs / n,
        mape: pct_defined.then(|| 100.0 * pct / n),
        theil_u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sarima::{estimate, fit_with_params, SarimaSpec};
    use crate::series::TimeSeries;
    use crate::simulate::{simulate, SimulationConfig};
    use crate::transform::DifferenceSpec;

    fn diff(d: usize, sd: usize, s: usize) -> DifferenceSpec {
        DifferenceSpec::new(d, sd, s).unwrap()
    }

    fn spec(
        ar: &[usize],
        sar: &[usize],
        ma: &[usize],
        sma: &[usize],
        d: DifferenceSpec,
        constant: bool,
    ) -> SarimaSpec {
        SarimaSpec::new(ar, sar, ma, sma, d, constant).unwrap()
    }

    #[test]
    fn seasonal_random_walk_repeats_the_last_year() {
        // No ARMA terms, no constant, D=1: the z-forecast is identically
        // zero, so integration copies the previous year bit for bit.
        let sp = SarimaSpec::empty(diff(0, 1, 12));
        let cfg = SimulationConfig::new(sp.clone(), vec![], 0.0, 1.0, 120, 3).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = fit_with_params(&sp, &ts, &[], 0.0).unwrap();
        let fc = forecast(&model, 24).unwrap();
        let y = ts.values();
        for h in 0..24 {
            let source = y.len() - 12 + (h % 12);
            assert_eq!(fc.points[h], y[source], "h = {h}");
        }
    }

    #[test]
    fn one_step_forecast_matches_conditional_expectation_oracle() {
        let sp = spec(&[1], &[], &[2], &[], diff(0, 0, 12), true);
        let cfg =
            SimulationConfig::new(sp.clone(), vec![0.6, 0.3], 1.5, 1.0, 400, 23).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let fc = forecast(&model, 1).unwrap();

        // Brute force: expand the recursion by hand from the stored data.
        let z = model.data().values();
        let a = model.residuals();
        let t = z.len();
        let coef = model.coefficient_values();
        let expected = model.delta() + coef[0] * z[t - 1] + coef[1] * a[t - 2];
        assert!((fc.points[0] - expected).abs() < 1e-9);
    }

    #[test]
    fn one_step_error_equals_the_stored_residual() {
        let sp = spec(&[1], &[12], &[], &[], diff(0, 1, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.5, -0.4], 0.0, 1.0, 300, 7).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let full = estimate(&sp, &ts).unwrap();

        // Refit the same coefficients on the series without its last point,
        // then forecast that point. The recursion is causal, so the stored
        // residual of the full fit is exactly the one-step error.
        let shorter = TimeSeries::new(
            ts.start(),
            ts.values()[..ts.len() - 1].to_vec(),
            ts.frequency(),
        )
        .unwrap();
        let truncated =
            fit_with_params(&sp, &shorter, &full.coefficient_values(), 0.0).unwrap();
        let fc = forecast(&truncated, 1).unwrap();
        let err = ts.values()[ts.len() - 1] - fc.points[0];
        let stored = *full.residuals().last().unwrap();
        assert!((err - stored).abs() < 1e-9, "{err} vs {stored}");
    }

    #[test]
    fn fitted_values_complement_residuals() {
        let sp = spec(&[1], &[], &[], &[], diff(1, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.4], 0.0, 1.0, 200, 99).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let fitted = fitted_values(&model).unwrap();
        assert_eq!(fitted.len(), model.residuals().len());
        for ((f, a), y) in fitted.iter().zip(model.residuals()).zip(&ts.values()[1..]) {
            assert!((f + a - y).abs() < 1e-12);
        }
    }

    #[test]
    fn forecast_is_affine_equivariant_under_differencing() {
        // With d >= 1 and no constant, shifting and scaling the input
        // series shifts and scales the forecasts the same way.
        let sp = spec(&[1], &[], &[], &[], diff(1, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.5], 0.0, 1.0, 200, 11).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let base = forecast(&model, 6).unwrap();

        let mapped: Vec<f64> = ts.values().iter().map(|v| 100.0 + 3.0 * v).collect();
        let mapped_ts = TimeSeries::new(ts.start(), mapped, 12).unwrap();
        let mapped_model =
            fit_with_params(&sp, &mapped_ts, &model.coefficient_values(), 0.0).unwrap();
        let mapped_fc = forecast(&mapped_model, 6).unwrap();
        for (m, b) in mapped_fc.points.iter().zip(&base.points) {
            let want = 100.0 + 3.0 * b;
            assert!((m - want).abs() < 1e-9 * want.abs().max(1.0), "{m} vs {want}");
        }
    }

    #[test]
    fn forecast_periods_and_overflow() {
        let sp = SarimaSpec::empty(diff(0, 0, 12));
        let cfg = SimulationConfig::new(sp.clone(), vec![], 0.0, 1.0, 24, 1).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = fit_with_params(&sp, &ts, &[], 0.0).unwrap();
        let fc = forecast(&model, 3).unwrap();
        assert_eq!(fc.origin, ts.last_period());
        assert_eq!(fc.period_at(0).unwrap(), ts.last_period().plus_months(1).unwrap());
        assert!(forecast(&model, 0).is_err());
        let huge = i32::MAX as usize * 12;
        assert!(matches!(forecast(&model, huge), Err(Error::HorizonOverflow)));
    }

    #[test]
    fn accuracy_hand_example() {
        let r = accuracy(&[100.0, 200.0], &[110.0, 190.0]).unwrap();
        assert!((r.rmse - 10.0).abs() < 1e-12);
        assert!((r.mad - 10.0).abs() < 1e-12);
        assert!((r.mape.unwrap() - 7.5).abs() < 1e-12);
        let expected_u = 10.0 / (25_000.0_f64.sqrt() + 24_100.0_f64.sqrt());
        assert!((r.theil_u - expected_u).abs() < 1e-12);
        assert!((r.theil_u - 0.0319).abs() < 1e-4);
    }

    #[test]
    fn accuracy_boundary_cases() {
        let perfect = accuracy(&[5.0, -3.0, 2.0], &[5.0, -3.0, 2.0]).unwrap();
        assert_eq!(perfect.rmse, 0.0);
        assert_eq!(perfect.mad, 0.0);
        assert_eq!(perfect.mape.unwrap(), 0.0);
        assert_eq!(perfect.theil_u, 0.0);

        let zero_pred = accuracy(&[3.0, 4.0], &[0.0, 0.0]).unwrap();
        assert!((zero_pred.theil_u - 1.0).abs() < 1e-12);

        let with_zero_actual = accuracy(&[0.0, 4.0], &[1.0, 3.0]).unwrap();
        assert!(with_zero_actual.mape.is_none());
        assert!(with_zero_actual.rmse > 0.0);

        assert!(matches!(
            accuracy(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn accuracy_scale_behavior() {
        let actual = [120.0, 340.0, 560.0, 410.0];
        let predicted = [130.0, 320.0, 575.0, 395.0];
        let base = accuracy(&actual, &predicted).unwrap();
        assert!(base.mad <= base.rmse);
        for c in [0.01, 1.0, 1000.0] {
            let sa: Vec<f64> = actual.iter().map(|v| c * v).collect();
            let sp: Vec<f64> = predicted.iter().map(|v| c * v).collect();
            let scaled = accuracy(&sa, &sp).unwrap();
            assert!((scaled.theil_u - base.theil_u).abs() <= 1e-12);
            assert!((scaled.rmse - c * base.rmse).abs() <= 1e-9 * c);
            assert!((scaled.mad - c * base.mad).abs() <= 1e-9 * c);
        }
    }
}
