//! Residual adequacy checks: the df-adjusted residual correlogram and a
//! serial-correlation LM test in the Breusch-Godfrey style.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::correlogram::Correlogram;
use crate::error::{Error, Result};
use crate::ols::ols;
use crate::sarima::{FittedModel, Term};

/// Correlogram of the model residuals. The Ljung-Box degrees of freedom are
/// reduced by the number of estimated ARMA coefficients, so the Prob column
/// only starts past that lag.
pub fn residual_check(model: &FittedModel, max_lag: usize) -> Result<Correlogram> {
    Correlogram::compute(model.residuals(), max_lag, model.n_coefficients())
}

/// One row of the LM auxiliary regression output.
#[derive(Clone, Debug, Serialize)]
pub struct LmRow {
    pub name: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

fn lagged(values: &[f64], lag: usize) -> Vec<f64> {
    // Out-of-range history is zero, the same convention the residual
    // recursion itself uses, so the sample keeps its full length.
    (0..values.len())
        .map(|t| if t >= lag { values[t - lag] } else { 0.0 })
        .collect()
}

/// Serial-correlation LM test: regresses the residuals on the model's own
/// regressors (lagged differenced values at the AR lags, lagged residuals at
/// the MA lags, the constant if the model has one) plus RESID(-1) through
/// RESID(-lags). Under the adequate-model null every coefficient should be
/// insignificant.
pub fn lm_test(model: &FittedModel, lags: usize) -> Result<Vec<LmRow>> {
    if lags < 1 {
        return Err(Error::InvalidConfig("the LM test needs at least one lag".into()));
    }
    let a = model.residuals();
    let z = model.data().values();
    let t_len = a.len();
    let n_cols = model.n_params() + lags;
    if t_len <= n_cols {
        return Err(Error::SeriesTooShort { needed: n_cols + 1, got: t_len });
    }

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n_cols);
    let mut names: Vec<String> = Vec::with_capacity(n_cols);
    if model.spec().constant() {
        columns.push(vec![1.0; t_len]);
        names.push("C".to_string());
    }
    for term in model.spec().terms() {
        let col = match term {
            Term::Ar(l) | Term::Sar(l) => lagged(z, l),
            Term::Ma(l) | Term::Sma(l) => lagged(a, l),
            Term::Const => unreachable!("terms() never yields the constant"),
        };
        columns.push(col);
        names.push(term.to_string());
    }
    for k in 1..=lags {
        columns.push(lagged(a, k));
        names.push(format!("RESID(-{k})"));
    }

    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let fit = ols(&columns, &name_refs, a)?;
    let df = fit.df_resid as f64;
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::NumericalDegeneracy(format!("t-distribution: {e}")))?;

    Ok(names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let t_stat = fit.t_stats[i];
            LmRow {
                name,
                coefficient: fit.coefficients[i],
                std_error: fit.std_errors[i],
                t_stat,
                p_value: 2.0 * (1.0 - dist.cdf(t_stat.abs())),
            }
        })
        .collect())
}

/// The combined adequacy report: a model passes when no residual
/// autocorrelation or partial autocorrelation leaves the 2/sqrt(T) band and
/// no LM row reaches |t| = 2.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsReport {
    pub residual_correlogram: Correlogram,
    pub lm_rows: Vec<LmRow>,
    pub adequate: bool,
}

pub fn diagnose(model: &FittedModel, max_lag: usize, lm_lags: usize) -> Result<DiagnosticsReport> {
    let correlogram = residual_check(model, max_lag)?;
    let lm_rows = lm_test(model, lm_lags)?;
    let band_clear = correlogram.significant_ac_lags().is_empty()
        && correlogram.significant_pac_lags().is_empty();
    let lm_clear = lm_rows.iter().all(|row| row.t_stat.abs() < 2.0);
    Ok(DiagnosticsReport { residual_correlogram: correlogram, lm_rows, adequate: band_clear && lm_clear })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sarima::{estimate, fit_with_params, SarimaSpec};
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
    fn residual_correlogram_is_df_adjusted() {
        let sp = spec(&[1], &[12], &[], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.5, -0.3], 0.0, 1.0, 400, 2).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let c = residual_check(&model, 12).unwrap();
        // Two coefficients: Prob appears first at lag 3 (index 2).
        assert!(c.q_prob[0].is_none());
        assert!(c.q_prob[1].is_none());
        assert!(c.q_prob[2].is_some());
    }

    #[test]
    fn well_specified_model_is_adequate() {
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.6], 0.0, 1.0, 600, 41).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let report = diagnose(&model, 24, 12).unwrap();
        assert!(report.adequate, "seed 41 should produce a clean fit");
        assert_eq!(report.lm_rows.len(), 1 + 12);
        for row in &report.lm_rows {
            assert!(row.p_value >= 0.0 && row.p_value <= 1.0);
        }
    }

    #[test]
    fn underfit_model_fails_the_band_check() {
        // AR(1) data fitted with no terms at all: residuals are the series
        // itself, whose lag-1 autocorrelation is far outside the band.
        let ar1 = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(ar1, vec![0.7], 0.0, 1.0, 500, 8).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let none = SarimaSpec::empty(diff(0, 0, 12));
        let model = fit_with_params(&none, &ts, &[], 0.0).unwrap();
        let report = diagnose(&model, 24, 12).unwrap();
        assert!(!report.adequate);
        let c = &report.residual_correlogram;
        assert!(c.significant_ac_lags().contains(&1));
        // The planted structure also shows up in the LM rows.
        let resid1 = report.lm_rows.iter().find(|r| r.name == "RESID(-1)").unwrap();
        assert!(resid1.t_stat.abs() > 2.0, "t = {}", resid1.t_stat);
    }

    #[test]
    fn lm_row_layout_matches_the_model_terms() {
        let sp = spec(&[2], &[12], &[14], &[24], diff(0, 1, 12), true);
        let cfg = SimulationConfig::new(
            sp.clone(),
            vec![0.3, -0.2, 0.25, -0.3],
            0.5,
            1.0,
            600,
            77,
        )
        .unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let rows = lm_test(&model, 3).unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(
            names,
            vec!["C", "AR(2)", "SAR(12)", "MA(14)", "SMA(24)", "RESID(-1)", "RESID(-2)", "RESID(-3)"]
        );
    }

    #[test]
    fn resid_lag_colliding_with_an_ma_term_is_reported_collinear() {
        // The MA(1) regressor and RESID(-1) are the same column; the test
        // reports the design as collinear rather than inventing numbers.
        let sp = spec(&[], &[], &[1], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.4], 0.0, 1.0, 300, 15).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        match lm_test(&model, 3) {
            Err(Error::Collinear(names)) => assert!(names.contains(&"RESID(-1)".to_string())),
            other => panic!("expected a collinearity error, got {other:?}"),
        }
    }

    #[test]
    fn lm_t_stats_are_scale_invariant() {
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.5], 0.0, 1.0, 300, 19).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let base = lm_test(&model, 6).unwrap();

        // Rescale the data; with the same relative coefficients the
        // residual series scales by the same constant.
        let scaled_values: Vec<f64> = ts.values().iter().map(|v| v * 250.0).collect();
        let scaled_ts = crate::series::TimeSeries::new(ts.start(), scaled_values, 12).unwrap();
        let scaled_model =
            fit_with_params(&sp, &scaled_ts, &model.coefficient_values(), 0.0).unwrap();
        let scaled = lm_test(&scaled_model, 6).unwrap();
        for (a, b) in base.iter().zip(&scaled) {
            assert!((a.t_stat - b.t_stat).abs() < 1e-8, "{} vs {}", a.t_stat, b.t_stat);
        }
    }

    #[test]
    fn shrinking_the_window_never_flips_adequate_off() {
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        for seed in [3, 4, 5] {
            let cfg = SimulationConfig::new(sp.clone(), vec![0.5], 0.0, 1.0, 500, seed).unwrap();
            let (ts, _) = simulate(&cfg).unwrap();
            let model = estimate(&sp, &ts).unwrap();
            let wide = diagnose(&model, 36, 12).unwrap();
            if wide.adequate {
                let narrow = diagnose(&model, 12, 6).unwrap();
                assert!(narrow.adequate);
            }
        }
    }

    #[test]
    fn preconditions_are_enforced() {
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.5], 0.0, 1.0, 40, 1).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        assert!(lm_test(&model, 0).is_err());
        assert!(matches!(
            lm_test(&model, 39),
            Err(Error::SeriesTooShort { .. })
        ));
    }
}
