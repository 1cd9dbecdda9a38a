//! Candidate-model ranking by information criteria, plus the correlogram
//! heuristic that proposes candidate lags in the first place.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlogram::Correlogram;
use crate::error::{Error, Result};
use crate::sarima::{estimate, FittedModel, SarimaSpec};
use crate::series::TimeSeries;

/// One leaderboard entry. Rows for failed estimations keep the spec and the
/// failure text but carry no numbers.
#[derive(Clone, Debug, Serialize)]
pub struct LeaderboardRow {
    pub spec: SarimaSpec,
    pub converged: bool,
    pub bic: Option<f64>,
    pub aic: Option<f64>,
    pub adj_r2: Option<f64>,
    pub n_params: usize,
    pub failure: Option<String>,
    #[serde(skip)]
    fit: Option<FittedModel>,
}

impl LeaderboardRow {
    pub fn fit(&self) -> Option<&FittedModel> {
        self.fit.as_ref()
    }

    /// Sort class: clean fits, then unconverged fits, then failures.
    fn class(&self) -> u8 {
        match (&self.fit, self.converged) {
            (Some(_), true) => 0,
            (Some(_), false) => 1,
            _ => 2,
        }
    }
}

/// Candidates ranked best first by (BIC, AIC, parameter count); rows
/// without a fit sink to the bottom. The order is a pure function of the
/// candidate set, independent of input order and of estimation scheduling.
#[derive(Clone, Debug, Serialize)]
pub struct Leaderboard {
    pub rows: Vec<LeaderboardRow>,
}

impl Leaderboard {
    /// The winning row: the best-ranked candidate that produced a fit.
    pub fn best(&self) -> Option<&LeaderboardRow> {
        self.rows.iter().find(|r| r.fit.is_some())
    }

    pub fn best_model(&self) -> Option<&FittedModel> {
        self.best().and_then(|r| r.fit.as_ref())
    }
}

fn sort_key(row: &LeaderboardRow) -> (u8, f64, f64, usize, String) {
    (
        row.class(),
        row.bic.unwrap_or(f64::INFINITY),
        row.aic.unwrap_or(f64::INFINITY),
        row.n_params,
        row.spec.to_string(),
    )
}

/// Estimates every candidate (in parallel) and ranks them.
///
/// All candidates must share one `DifferenceSpec`: information criteria are
/// only comparable when the models explain the same dependent series.
/// Individual estimation failures become rows, not errors.
pub fn rank(specs: &[SarimaSpec], ts: &TimeSeries) -> Result<Leaderboard> {
    let first = specs
        .first()
        .ok_or_else(|| Error::InvalidConfig("no candidate specifications given".into()))?;
    if specs.iter().any(|sp| sp.diff() != first.diff()) {
        return Err(Error::IncomparableCandidates);
    }

    let mut rows: Vec<LeaderboardRow> = specs
        .par_iter()
        .map(|sp| {
            let (fit, converged, failure) = match estimate(sp, ts) {
                Ok(m) => (Some(m), true, None),
                Err(Error::EstimationFailed(m)) => (
                    Some(*m),
                    false,
                    Some("did not converge within the evaluation budget".to_string()),
                ),
                Err(e) => (None, false, Some(e.to_string())),
            };
            LeaderboardRow {
                spec: sp.clone(),
                converged,
                bic: fit.as_ref().map(FittedModel::bic),
                aic: fit.as_ref().map(FittedModel::aic),
                adj_r2: fit.as_ref().map(FittedModel::adj_r2),
                n_params: sp.n_params(),
                failure,
                fit,
            }
        })
        .collect();

    rows.sort_by(|a, b| {
        let (ca, ba, aa, na, la) = sort_key(a);
        let (cb, bb, ab, nb, lb) = sort_key(b);
        ca.cmp(&cb)
            .then(ba.total_cmp(&bb))
            .then(aa.total_cmp(&ab))
            .then(na.cmp(&nb))
            .then(la.cmp(&lb))
    });
    Ok(Leaderboard { rows })
}

/// Lags the correlogram proposes as candidates: partial autocorrelations
/// outside the 2/sqrt(T) band suggest AR terms, autocorrelations outside it
/// suggest MA terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LagSuggestion {
    pub ar: Vec<usize>,
    pub ma: Vec<usize>,
}

/// Filters significant lags down to a workable candidate set: nonseasonal
/// lags up to 24, seasonal multiples up to 3 cycles. With `s = 0` no lag
/// counts as seasonal and only the nonseasonal cap applies.
pub fn suggest_lags(c: &Correlogram, t: usize, s: usize) -> LagSuggestion {
    let band = 2.0 / (t as f64).sqrt();
    let keep = |k: usize| {
        if s > 0 && k % s == 0 {
            k <= 3 * s
        } else {
            k <= 24
        }
    };
    // Correlogram vectors start at lag 1.
    let pick = |values: &[f64]| -> Vec<usize> {
        values
            .iter()
            .enumerate()
            .filter(|(i, v)| v.abs() > band && keep(i + 1))
            .map(|(i, _)| i + 1)
            .collect()
    };
    LagSuggestion { ar: pick(&c.pac), ma: pick(&c.ac) }
}
