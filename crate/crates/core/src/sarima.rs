//! Seasonal ARIMA models on arbitrary lag subsets: specification,
//! conditional-least-squares estimation, and information criteria.
//!
//! A specification names individual lags rather than contiguous orders, so
//! AR(9) means one coefficient at lag 9, not nine coefficients. The model
//! for the differenced series z_t is
//!
//!   (1 - sum phi_i B^i)(1 - sum PHI_j B^j) z_t
//!       = delta + (1 + sum theta_i B^i)(1 + sum THETA_j B^j) a_t
//!
//! with the seasonal factors multiplying the regular ones. The MA signs
//! follow the convention in which the printed polynomial carries the
//! coefficients as estimated.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim;
use crate::poly::LagPolynomial;
use crate::series::{Period, TimeSeries};
use crate::transform::{DifferencedSeries, DifferenceSpec};

/// Roots of the AR/MA polynomials must stay outside this modulus during
/// estimation; iterates inside it incur the stationarity penalty.
const ROOT_MARGIN: f64 = 1.001;
const PENALTY_FACTOR: f64 = 1e6;
/// Abort the residual recursion once the sum of squares passes this; the
/// iterate is hopeless and the caller treats it as infinitely bad.
const SSR_CAP: f64 = 1e280;
/// Simplex diameter below which the optimizer is considered converged.
const DIAMETER_TOL: f64 = 1e-8;
/// Objective-evaluation budget per free parameter.
const EVALS_PER_PARAM: usize = 2000;

/// A named model coefficient: autoregressive or moving-average, seasonal or
/// regular, at a specific lag; or the constant.
///
/// Displays in the conventional notation: `AR(9)`, `SAR(12)`, `MA(14)`,
/// `SMA(24)`, `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Term {
    Ar(usize),
    Sar(usize),
    Ma(usize),
    Sma(usize),
    Const,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Ar(lag) => write!(f, "AR({lag})"),
            Term::Sar(lag) => write!(f, "SAR({lag})"),
            Term::Ma(lag) => write!(f, "MA({lag})"),
            Term::Sma(lag) => write!(f, "SMA({lag})"),
            Term::Const => write!(f, "C"),
        }
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "C" {
            return Ok(Term::Const);
        }
        let bad = || Error::BadSpec(format!("unrecognized term '{s}'"));
        let open = s.find('(').ok_or_else(bad)?;
        let lag: usize = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        match &s[..open] {
            "AR" => Ok(Term::Ar(lag)),
            "SAR" => Ok(Term::Sar(lag)),
            "MA" => Ok(Term::Ma(lag)),
            "SMA" => Ok(Term::Sma(lag)),
            _ => Err(bad()),
        }
    }
}

impl From<Term> for String {
    fn from(t: Term) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for Term {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A subset-lag seasonal ARIMA specification: which lags carry AR/MA
/// coefficients, how the series is differenced, and whether a constant is
/// estimated.
///
/// Serializes as `{"ar":[9],"sar":[12],"ma":[14],"sma":[24],"d":0,"D":1,
/// "s":12,"constant":false}`; the lag lists default to empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct SarimaSpec {
    #[serde(rename = "ar")]
    ar_lags: Vec<usize>,
    #[serde(rename = "sar")]
    sar_lags: Vec<usize>,
    #[serde(rename = "ma")]
    ma_lags: Vec<usize>,
    #[serde(rename = "sma")]
    sma_lags: Vec<usize>,
    #[serde(flatten)]
    diff: DifferenceSpec,
    constant: bool,
}

#[derive(Deserialize)]
struct RawSpec {
    #[serde(rename = "ar", default)]
    ar_lags: Vec<usize>,
    #[serde(rename = "sar", default)]
    sar_lags: Vec<usize>,
    #[serde(rename = "ma", default)]
    ma_lags: Vec<usize>,
    #[serde(rename = "sma", default)]
    sma_lags: Vec<usize>,
    #[serde(flatten)]
    diff: DifferenceSpec,
    #[serde(default)]
    constant: bool,
}

impl TryFrom<RawSpec> for SarimaSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        SarimaSpec::new(
            &raw.ar_lags,
            &raw.sar_lags,
            &raw.ma_lags,
            &raw.sma_lags,
            raw.diff,
            raw.constant,
        )
    }
}

fn check_lags(kind: &str, lags: &[usize], seasonal_multiple: Option<usize>) -> Result<Vec<usize>> {
    let mut sorted = lags.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::BadSpec(format!("duplicate {kind} lag {}", pair[0])));
        }
    }
    if sorted.first() == Some(&0) {
        return Err(Error::BadSpec(format!("{kind} lags must be at least 1")));
    }
    if let Some(s) = seasonal_multiple {
        if let Some(bad) = sorted.iter().find(|lag| *lag % s != 0) {
            return Err(Error::BadSpec(format!(
                "{kind} lag {bad} is not a multiple of the seasonal period {s}"
            )));
        }
    }
    Ok(sorted)
}

impl SarimaSpec {
    pub fn new(
        ar_lags: &[usize],
        sar_lags: &[usize],
        ma_lags: &[usize],
        sma_lags: &[usize],
        diff: DifferenceSpec,
        constant: bool,
    ) -> Result<Self> {
        let s = diff.period();
        Ok(SarimaSpec {
            ar_lags: check_lags("AR", ar_lags, None)?,
            sar_lags: check_lags("SAR", sar_lags, Some(s))?,
            ma_lags: check_lags("MA", ma_lags, None)?,
            sma_lags: check_lags("SMA", sma_lags, Some(s))?,
            diff,
            constant,
        })
    }

    /// A specification with no dynamics and no constant: the model under
    /// which the differenced series is pure noise.
    pub fn empty(diff: DifferenceSpec) -> Self {
        SarimaSpec {
            ar_lags: Vec::new(),
            sar_lags: Vec::new(),
            ma_lags: Vec::new(),
            sma_lags: Vec::new(),
            diff,
            constant: false,
        }
    }

    pub fn ar_lags(&self) -> &[usize] {
        &self.ar_lags
    }

    pub fn sar_lags(&self) -> &[usize] {
        &self.sar_lags
    }

    pub fn ma_lags(&self) -> &[usize] {
        &self.ma_lags
    }

    pub fn sma_lags(&self) -> &[usize] {
        &self.sma_lags
    }

    pub fn diff(&self) -> DifferenceSpec {
        self.diff
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    pub fn without_constant(&self) -> Self {
        let mut spec = self.clone();
        spec.constant = false;
        spec
    }

    /// The coefficient order used everywhere: AR, SAR, MA, SMA, each
    /// ascending by lag. The constant is not a term; it rides separately.
    pub fn terms(&self) -> Vec<Term> {
        let mut terms = Vec::with_capacity(self.n_coefficients());
        terms.extend(self.ar_lags.iter().map(|&l| Term::Ar(l)));
        terms.extend(self.sar_lags.iter().map(|&l| Term::Sar(l)));
        terms.extend(self.ma_lags.iter().map(|&l| Term::Ma(l)));
        terms.extend(self.sma_lags.iter().map(|&l| Term::Sma(l)));
        terms
    }

    /// Number of ARMA coefficients (excludes the constant).
    pub fn n_coefficients(&self) -> usize {
        self.ar_lags.len() + self.sar_lags.len() + self.ma_lags.len() + self.sma_lags.len()
    }

    /// Number of free parameters (includes the constant when present).
    pub fn n_params(&self) -> usize {
        self.n_coefficients() + usize::from(self.constant)
    }
}

impl fmt::Display for SarimaSpec {
    /// The leaderboard label, e.g. `C, AR(9), SAR(12), MA(14), SMA(24)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.constant {
            parts.push("C".to_string());
        }
        parts.extend(self.terms().iter().map(Term::to_string));
        if parts.is_empty() {
            parts.push("noise".to_string());
        }
        write!(f, "{}", parts.join(", "))
    }
}

struct Factors {
    ar: LagPolynomial,
    sar: LagPolynomial,
    ma: LagPolynomial,
    sma: LagPolynomial,
}

impl Factors {
    /// Smallest root modulus across all four factors. The roots of a
    /// product are the union of the factors' roots, so checking factors is
    /// equivalent to checking the expanded polynomials and much cheaper.
    fn min_root_modulus(&self) -> f64 {
        [&self.ar, &self.sar, &self.ma, &self.sma]
            .iter()
            .filter_map(|p| p.min_root_modulus())
            .fold(f64::INFINITY, f64::min)
    }
}

fn build_factors(spec: &SarimaSpec, coefficients: &[f64]) -> Result<Factors> {
    if coefficients.len() != spec.n_coefficients() {
        return Err(Error::BadSpec(format!(
            "specification declares {} lags but {} coefficients were supplied",
            spec.n_coefficients(),
            coefficients.len()
        )));
    }
    let mut it = coefficients.iter();
    let mut take = |lags: &[usize], sign: f64| -> Result<LagPolynomial> {
        let terms: Vec<(usize, f64)> = lags
            .iter()
            .map(|&lag| (lag, sign * it.next().expect("length checked")))
            .collect();
        LagPolynomial::with_unit_constant(&terms)
    };
    // AR factors enter as 1 - phi B^i, MA factors as 1 + theta B^j.
    let ar = take(&spec.ar_lags, -1.0)?;
    let sar = take(&spec.sar_lags, -1.0)?;
    let ma = take(&spec.ma_lags, 1.0)?;
    let sma = take(&spec.sma_lags, 1.0)?;
    Ok(Factors { ar, sar, ma, sma })
}

/// Expands a specification and its coefficients into the full AR and MA lag
/// polynomials (regular factor times seasonal factor).
pub fn expand(spec: &SarimaSpec, coefficients: &[f64]) -> Result<(LagPolynomial, LagPolynomial)> {
    let f = build_factors(spec, coefficients)?;
    Ok((f.ar.mul(&f.sar), f.ma.mul(&f.sma)))
}

/// The conditional-least-squares residual recursion:
///
///   a_t = (ar_poly z)_t - delta - sum_{j>=1} ma_j a_{t-j}
///
/// with pre-sample z and a taken as zero. Residuals are produced for every
/// t, so the first few absorb the missing history; that is the conditional
/// in conditional least squares.
pub fn css_residuals(
    z: &[f64],
    ar_poly: &LagPolynomial,
    ma_poly: &LagPolynomial,
    delta: f64,
) -> Vec<f64> {
    recursion(z, &ar_poly.nonzero_lags(), &ma_poly.nonzero_lags(), delta, None).0
}

/// Shared recursion. With a cap, bails out early once the accumulated sum
/// of squares exceeds it (returning an infinite SSR), which keeps hopeless
/// optimizer iterates cheap.
fn recursion(
    z: &[f64],
    ar_terms: &[(usize, f64)],
    ma_terms: &[(usize, f64)],
    delta: f64,
    cap: Option<f64>,
) -> (Vec<f64>, f64) {
    let mut a = Vec::with_capacity(z.len());
    let mut ssr = 0.0;
    for t in 0..z.len() {
        let mut v = z[t] - delta;
        for &(lag, c) in ar_terms {
            if t >= lag {
                v += c * z[t - lag];
            }
        }
        for &(lag, m) in ma_terms {
            if t >= lag {
                v -= m * a[t - lag];
            }
        }
        ssr += v * v;
        a.push(v);
        if let Some(cap) = cap {
            if !(ssr <= cap) {
                return (a, f64::INFINITY);
            }
        }
    }
    (a, ssr)
}

fn split_params<'a>(spec: &SarimaSpec, params: &'a [f64]) -> (&'a [f64], f64) {
    if spec.constant() {
        let (coeffs, delta) = params.split_at(params.len() - 1);
        (coeffs, delta[0])
    } else {
        (params, 0.0)
    }
}

/// Sum of squared residuals at a parameter vector, with the stationarity/
/// invertibility penalty applied to iterates whose roots come within
/// `ROOT_MARGIN` of the unit circle.
fn penalized_ssr(spec: &SarimaSpec, z: &[f64], params: &[f64]) -> f64 {
    let (coefficients, delta) = split_params(spec, params);
    let factors = match build_factors(spec, coefficients) {
        Ok(f) => f,
        Err(_) => return f64::INFINITY,
    };
    let ar = factors.ar.mul(&factors.sar);
    let ma = factors.ma.mul(&factors.sma);
    let (_, ssr) = recursion(z, &ar.nonzero_lags(), &ma.nonzero_lags(), delta, Some(SSR_CAP));
    if factors.min_root_modulus() <= ROOT_MARGIN {
        ssr * PENALTY_FACTOR
    } else {
        ssr
    }
}

/// Unpenalized SSR, used for the curvature estimates at the optimum.
fn raw_ssr(spec: &SarimaSpec, z: &[f64], params: &[f64]) -> f64 {
    let (coefficients, delta) = split_params(spec, params);
    match expand(spec, coefficients) {
        Ok((ar, ma)) => recursion(z, &ar.nonzero_lags(), &ma.nonzero_lags(), delta, Some(SSR_CAP)).1,
        Err(_) => f64::INFINITY,
    }
}

/// Goodness-of-fit criteria from a conditional sum of squares.
///
/// With sigma2 = ssr/T, the Gaussian log-likelihood is
/// l = -(T/2)(1 + log(2 pi) + log sigma2); AIC and BIC are reported in the
/// per-observation form -2l/T + penalty, the scale on which model tables
/// are usually printed.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Criteria {
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
}

pub fn criteria(ssr: f64, t: usize, n_params: usize) -> Result<Criteria> {
    if t <= n_params {
        return Err(Error::BadSpec(format!(
            "criteria need more observations ({t}) than parameters ({n_params})"
        )));
    }
    if !(ssr > 0.0) || !ssr.is_finite() {
        return Err(Error::DegenerateFit);
    }
    let tf = t as f64;
    let sigma2 = ssr / tf;
    let loglik = -(tf / 2.0) * (1.0 + (2.0 * std::f64::consts::PI).ln() + sigma2.ln());
    let n = n_params as f64;
    Ok(Criteria {
        loglik,
        aic: -2.0 * loglik / tf + 2.0 * n / tf,
        bic: -2.0 * loglik / tf + n * tf.ln() / tf,
    })
}

/// An estimated model: coefficients, fit statistics, and the differenced
/// data it was fitted to (kept so diagnostics and forecasting need no
/// re-estimation).
///
/// Serializes to JSON via [`FittedModel::to_json`]; the round-trip is
/// bit-exact because values print with full shortest-round-trip precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    spec: SarimaSpec,
    coefficients: Vec<(Term, f64)>,
    delta: f64,
    ar_poly: LagPolynomial,
    ma_poly: LagPolynomial,
    sigma2: f64,
    loglik: f64,
    aic: f64,
    bic: f64,
    adj_r2: f64,
    t_stats: Vec<(Term, Option<f64>)>,
    residuals: Vec<f64>,
    data: DifferencedSeries,
    start: Period,
    converged: bool,
}

impl FittedModel {
    pub fn spec(&self) -> &SarimaSpec {
        &self.spec
    }

    /// ARMA coefficients in [`SarimaSpec::terms`] order.
    pub fn coefficients(&self) -> &[(Term, f64)] {
        &self.coefficients
    }

    pub fn coefficient_values(&self) -> Vec<f64> {
        self.coefficients.iter().map(|(_, v)| *v).collect()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn ar_poly(&self) -> &LagPolynomial {
        &self.ar_poly
    }

    pub fn ma_poly(&self) -> &LagPolynomial {
        &self.ma_poly
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn loglik(&self) -> f64 {
        self.loglik
    }

    pub fn aic(&self) -> f64 {
        self.aic
    }

    pub fn bic(&self) -> f64 {
        self.bic
    }

    pub fn adj_r2(&self) -> f64 {
        self.adj_r2
    }

    /// t-statistics in terms order, the constant (if any) last. `None` when
    /// the curvature estimate was unusable.
    pub fn t_stats(&self) -> &[(Term, Option<f64>)] {
        &self.t_stats
    }

    pub fn delta_t_stat(&self) -> Option<f64> {
        self.t_stats
            .iter()
            .find(|(term, _)| *term == Term::Const)
            .and_then(|(_, t)| *t)
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// The differenced estimation data, warmup included.
    pub fn data(&self) -> &DifferencedSeries {
        &self.data
    }

    /// Start period of the original (undifferenced) series.
    pub fn start(&self) -> Period {
        self.start
    }

    /// Last period covered by the estimation data.
    pub fn origin(&self) -> Period {
        let n = self.data.warmup().len() + self.data.len();
        self.start
            .plus_months(n as i64 - 1)
            .expect("period range validated at construction")
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn n_coefficients(&self) -> usize {
        self.coefficients.len()
    }

    pub fn n_params(&self) -> usize {
        self.spec.n_params()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Deserializes and re-checks the cross-field invariants that field
    /// level validation cannot see.
    pub fn from_json(text: &str) -> Result<Self> {
        let model: FittedModel = serde_json::from_str(text)
            .map_err(|e| Error::BadSpec(format!("model JSON: {e}")))?;
        let expected = model.spec.terms();
        let got: Vec<Term> = model.coefficients.iter().map(|(t, _)| *t).collect();
        if got != expected {
            return Err(Error::BadSpec(
                "model JSON: coefficients do not match the specification's terms".into(),
            ));
        }
        if model.data.spec() != model.spec.diff() {
            return Err(Error::BadSpec(
                "model JSON: differenced data does not match the specification".into(),
            ));
        }
        if model.residuals.len() != model.data.len() {
            return Err(Error::BadSpec(
                "model JSON: residual length does not match the data".into(),
            ));
        }
        if !(model.sigma2 > 0.0) {
            return Err(Error::BadSpec("model JSON: sigma2 must be positive".into()));
        }
        Ok(model)
    }
}

/// Estimates `spec` on `ts` by conditional least squares.
///
/// Deterministic: ARMA coefficients start at zero (the constant at the
/// differenced-series mean) and Nelder-Mead runs with fixed settings. A
/// budget of 2000 evaluations per parameter that ends without the simplex
/// collapsing yields [`Error::EstimationFailed`] carrying the best fit
/// found.
pub fn estimate(spec: &SarimaSpec, ts: &TimeSeries) -> Result<FittedModel> {
    estimate_with_budget(spec, ts, EVALS_PER_PARAM)
}

fn estimate_with_budget(
    spec: &SarimaSpec,
    ts: &TimeSeries,
    evals_per_param: usize,
) -> Result<FittedModel> {
    let z = ts.difference(spec.diff())?;
    let t_len = z.len();
    let n_par = spec.n_params();
    if t_len < 5 * n_par {
        return Err(Error::SeriesTooShort { needed: 5 * n_par, got: t_len });
    }
    if n_par == 0 {
        return fit_with_params(spec, ts, &[], 0.0);
    }

    let zbar = z.values().iter().sum::<f64>() / t_len as f64;
    let mut x0 = vec![0.0; n_par];
    let mut steps = vec![0.1; n_par];
    if spec.constant() {
        x0[n_par - 1] = zbar;
        steps[n_par - 1] = 0.1 * (1.0 + zbar.abs());
    }

    let z_values = z.values();
    let sol = optim::minimize(
        |params| penalized_ssr(spec, z_values, params),
        &x0,
        &steps,
        &optim::Options {
            max_evals: evals_per_param * n_par,
            diameter_tol: DIAMETER_TOL,
        },
    );

    let (coefficients, delta) = split_params(spec, &sol.x);
    let model = assemble(spec, ts, coefficients, delta, sol.converged)?;
    if sol.converged {
        Ok(model)
    } else {
        Err(Error::EstimationFailed(Box::new(model)))
    }
}

/// Builds the fitted-model record for externally supplied coefficients,
/// without optimizing. Useful for evaluating a known model on data and for
/// reconstructing models in tests.
pub fn fit_with_params(
    spec: &SarimaSpec,
    ts: &TimeSeries,
    coefficients: &[f64],
    delta: f64,
) -> Result<FittedModel> {
    if delta != 0.0 && !spec.constant() {
        return Err(Error::BadSpec(
            "delta must be zero for a specification without a constant".into(),
        ));
    }
    assemble(spec, ts, coefficients, delta, true)
}

fn assemble(
    spec: &SarimaSpec,
    ts: &TimeSeries,
    coefficients: &[f64],
    delta: f64,
    converged: bool,
) -> Result<FittedModel> {
    let z = ts.difference(spec.diff())?;
    let factors = build_factors(spec, coefficients)?;
    if factors.min_root_modulus() <= 1.0 {
        return Err(Error::InfeasibleSpec);
    }
    let ar_poly = factors.ar.mul(&factors.sar);
    let ma_poly = factors.ma.mul(&factors.sma);

    let residuals = css_residuals(z.values(), &ar_poly, &ma_poly, delta);
    let ssr: f64 = residuals.iter().map(|a| a * a).sum();
    if !ssr.is_finite() {
        return Err(Error::NumericalDegeneracy("residual recursion overflowed".into()));
    }
    let t_len = z.len();
    let n_par = spec.n_params();
    let crit = criteria(ssr, t_len, n_par)?;
    let sigma2 = ssr / t_len as f64;

    let zbar = z.values().iter().sum::<f64>() / t_len as f64;
    let tss: f64 = z.values().iter().map(|v| (v - zbar).powi(2)).sum();
    if tss <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let r2 = 1.0 - ssr / tss;
    let tf = t_len as f64;
    let adj_r2 = 1.0 - (1.0 - r2) * (tf - 1.0) / (tf - n_par as f64 - 1.0);

    let mut params: Vec<f64> = coefficients.to_vec();
    if spec.constant() {
        params.push(delta);
    }
    let se = standard_errors(spec, z.values(), &params, sigma2);
    let mut labels = spec.terms();
    if spec.constant() {
        labels.push(Term::Const);
    }
    let t_stats: Vec<(Term, Option<f64>)> = labels
        .iter()
        .zip(params.iter().zip(&se))
        .map(|(term, (coef, se))| (*term, se.map(|se| coef / se)))
        .collect();

    Ok(FittedModel {
        spec: spec.clone(),
        coefficients: spec.terms().into_iter().zip(coefficients.iter().copied()).collect(),
        delta,
        ar_poly,
        ma_poly,
        sigma2,
        loglik: crit.loglik,
        aic: crit.aic,
        bic: crit.bic,
        adj_r2,
        t_stats,
        residuals,
        data: z,
        start: ts.start(),
        converged,
    })
}

/// Standard errors from the curvature of the SSR surface: the asymptotic
/// covariance of a least-squares estimator is 2 sigma2 H^-1 with H the
/// Hessian of the SSR, estimated here by central finite differences.
fn standard_errors(
    spec: &SarimaSpec,
    z: &[f64],
    params: &[f64],
    sigma2: f64,
) -> Vec<Option<f64>> {
    let n = params.len();
    if n == 0 {
        return Vec::new();
    }
    let f = |p: &[f64]| raw_ssr(spec, z, p);
    let h: Vec<f64> = params.iter().map(|p| 1e-4 * p.abs().max(1.0)).collect();
    let f0 = f(params);
    let mut hess = DMatrix::<f64>::zeros(n, n);
    let mut shifted = params.to_vec();
    for i in 0..n {
        // Diagonal: (f(x+h) - 2 f(x) + f(x-h)) / h^2.
        shifted[i] = params[i] + h[i];
        let fp = f(&shifted);
        shifted[i] = params[i] - h[i];
        let fm = f(&shifted);
        shifted[i] = params[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in i + 1..n {
            // Off-diagonal central cross difference.
            let mut corners = [0.0; 4];
            for (k, (si, sj)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
                .iter()
                .enumerate()
            {
                shifted[i] = params[i] + si * h[i];
                shifted[j] = params[j] + sj * h[j];
                corners[k] = f(&shifted);
            }
            shifted[i] = params[i];
            shifted[j] = params[j];
            let v = (corners[0] - corners[1] - corners[2] + corners[3]) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    if hess.iter().any(|v| !v.is_finite()) {
        return vec![None; n];
    }
    match hess.try_inverse() {
        Some(inv) => (0..n)
            .map(|i| {
                let var = 2.0 * sigma2 * inv[(i, i)];
                (var > 0.0).then(|| var.sqrt())
            })
            .collect(),
        None => vec![None; n],
    }
}

/// Fits `spec`, then applies the constant screen: when the estimated
/// constant's |t| is below 2 (or its standard error is unavailable), the
/// constant is judged insignificant and the model is refitted without it.
pub fn estimate_screening_constant(spec: &SarimaSpec, ts: &TimeSeries) -> Result<FittedModel> {
    let model = estimate(spec, ts)?;
    if !spec.constant() {
        return Ok(model);
    }
    let keep = model.delta_t_stat().is_some_and(|t| t.abs() >= 2.0);
    if keep {
        Ok(model)
    } else {
        estimate(&spec.without_constant(), ts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate, SimulationConfig};

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
    fn term_labels_round_trip() {
        for term in [Term::Ar(9), Term::Sar(12), Term::Ma(14), Term::Sma(24), Term::Const] {
            let s = term.to_string();
            assert_eq!(s.parse::<Term>().unwrap(), term);
        }
        assert_eq!(Term::Ar(9).to_string(), "AR(9)");
        assert_eq!(Term::Const.to_string(), "C");
        assert!("XR(3)".parse::<Term>().is_err());
    }

    #[test]
    fn spec_validation_rejects_bad_lags() {
        let d = diff(0, 1, 12);
        assert!(SarimaSpec::new(&[0], &[], &[], &[], d, false).is_err());
        assert!(SarimaSpec::new(&[3, 3], &[], &[], &[], d, false).is_err());
        assert!(SarimaSpec::new(&[], &[13], &[], &[], d, false).is_err());
        assert!(SarimaSpec::new(&[], &[24], &[], &[12], d, false).is_ok());
    }

    #[test]
    fn spec_sorts_lags_and_orders_terms() {
        let sp = spec(&[9, 3], &[12], &[14], &[24], diff(0, 1, 12), true);
        assert_eq!(sp.ar_lags(), &[3, 9]);
        assert_eq!(
            sp.terms(),
            vec![Term::Ar(3), Term::Ar(9), Term::Sar(12), Term::Ma(14), Term::Sma(24)]
        );
        assert_eq!(sp.n_coefficients(), 5);
        assert_eq!(sp.n_params(), 6);
        assert_eq!(sp.to_string(), "C, AR(3), AR(9), SAR(12), MA(14), SMA(24)");
    }

    #[test]
    fn spec_json_round_trips() {
        let sp = spec(&[9], &[12], &[14], &[24], diff(0, 1, 12), false);
        let json = serde_json::to_string(&sp).unwrap();
        assert!(json.contains("\"ar\":[9]"), "{json}");
        assert!(json.contains("\"D\":1"), "{json}");
        let back: SarimaSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sp);
        // Lag lists default to empty; d and D default to zero.
        let minimal: SarimaSpec = serde_json::from_str(r#"{"s":12}"#).unwrap();
        assert_eq!(minimal, SarimaSpec::empty(diff(0, 0, 12)));
    }

    #[test]
    fn expansion_multiplies_seasonal_factors() {
        let sp = spec(&[9], &[12], &[14], &[24], diff(0, 1, 12), false);
        let (ar, ma) = expand(&sp, &[0.154, -0.513, 0.255, -0.860]).unwrap();
        // (1 - 0.154 B^9)(1 + 0.513 B^12)
        assert!((ar.coeff(9) - (-0.154)).abs() < 1e-12);
        assert!((ar.coeff(12) - 0.513).abs() < 1e-12);
        assert!((ar.coeff(21) - (-0.154 * 0.513)).abs() < 1e-12);
        // (1 + 0.255 B^14)(1 - 0.860 B^24)
        assert!((ma.coeff(14) - 0.255).abs() < 1e-12);
        assert!((ma.coeff(24) - (-0.860)).abs() < 1e-12);
        assert!((ma.coeff(38) - (0.255 * -0.860)).abs() < 1e-12);
        assert!(expand(&sp, &[0.1, 0.2]).is_err(), "missing coefficients must fail");
    }

    #[test]
    fn css_recursion_matches_hand_computation() {
        // AR(1) with phi = 0.5 on z = [1, 0.5, 0.25]: each value is half the
        // previous, so residuals after the first vanish.
        let ar = LagPolynomial::with_unit_constant(&[(1, -0.5)]).unwrap();
        let id = LagPolynomial::identity();
        let a = css_residuals(&[1.0, 0.5, 0.25], &ar, &id, 0.0);
        assert_eq!(a, vec![1.0, 0.0, 0.0]);

        // MA(1) with theta = 0.5 on z = [1, 0]: a_0 = 1, a_1 = -0.5 a_0...
        let ma = LagPolynomial::with_unit_constant(&[(1, 0.5)]).unwrap();
        let a = css_residuals(&[1.0, 0.0], &id, &ma, 0.0);
        assert_eq!(a, vec![1.0, -0.5]);

        // A constant shifts every innovation.
        let a = css_residuals(&[2.0, 2.0, 2.0], &id, &id, 2.0);
        assert_eq!(a, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn criteria_closed_form() {
        // T = 100, ssr = 100 => sigma2 = 1, l = -50 (1 + log 2 pi).
        let c = criteria(100.0, 100, 1).unwrap();
        let expected_l = -50.0 * (1.0 + (2.0 * std::f64::consts::PI).ln());
        assert!((c.loglik - expected_l).abs() < 1e-9);
        assert!((c.aic - (-2.0 * expected_l / 100.0 + 0.02)).abs() < 1e-12);
        assert!((c.bic - (-2.0 * expected_l / 100.0 + 100.0_f64.ln() / 100.0)).abs() < 1e-12);
        assert!(matches!(criteria(0.0, 100, 1), Err(Error::DegenerateFit)));
        assert!(criteria(10.0, 3, 5).is_err());
    }

    #[test]
    fn criteria_penalize_extra_parameters() {
        let base = criteria(100.0, 100, 1).unwrap();
        let more = criteria(100.0, 100, 3).unwrap();
        assert!(more.aic > base.aic);
        assert!(more.bic > base.bic);
        // BIC's per-parameter penalty exceeds AIC's once log T > 2.
        assert!((more.bic - base.bic) > (more.aic - base.aic));
    }

    fn white_noise_series(n: usize, seed: u64) -> TimeSeries {
        let cfg = SimulationConfig::new(
            SarimaSpec::empty(diff(0, 0, 12)),
            vec![],
            0.0,
            1.0,
            n,
            seed,
        )
        .unwrap();
        simulate(&cfg).unwrap().0
    }

    #[test]
    fn constant_only_fit_recovers_mean_and_variance() {
        let noise = white_noise_series(400, 7);
        let shifted: Vec<f64> = noise.values().iter().map(|v| v + 5.0).collect();
        let ts = TimeSeries::new(noise.start(), shifted, 12).unwrap();
        let sp = spec(&[], &[], &[], &[], diff(0, 0, 12), true);
        let model = estimate(&sp, &ts).unwrap();

        let mean = ts.values().iter().sum::<f64>() / 400.0;
        let var = ts.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 400.0;
        assert!((model.delta() - mean).abs() < 1e-6, "delta {} vs mean {mean}", model.delta());
        assert!((model.sigma2() - var).abs() / var < 0.02);
        // The mean of a 400-point sample with unit variance has se ~ 0.05,
        // so a shift of 5 is overwhelmingly significant.
        assert!(model.delta_t_stat().unwrap() > 20.0);
    }

    #[test]
    fn ar1_estimate_recovers_coefficient() {
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.5], 0.0, 1.0, 800, 11).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let phi = model.coefficients()[0].1;
        assert!((phi - 0.5).abs() < 0.08, "phi = {phi}");
        assert!(model.converged());
        assert!(model.sigma2() > 0.8 && model.sigma2() < 1.2);
        // A strongly significant coefficient at T = 800.
        assert!(model.t_stats()[0].1.unwrap().abs() > 8.0);
    }

    #[test]
    fn estimation_failure_carries_best_fit_so_far() {
        let sp = spec(&[1], &[], &[1], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.5, 0.3], 0.0, 1.0, 300, 3).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        match estimate_with_budget(&sp, &ts, 3) {
            Err(Error::EstimationFailed(model)) => {
                assert!(!model.converged());
                assert_eq!(model.spec(), &sp);
                assert!(model.sigma2() > 0.0);
            }
            other => panic!("expected EstimationFailed, got {:?}", other.map(|m| m.converged())),
        }
    }

    #[test]
    fn fit_with_params_validates_alignment() {
        let noise = white_noise_series(100, 21);
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        assert!(matches!(
            fit_with_params(&sp, &noise, &[0.5, 0.2], 0.0),
            Err(Error::BadSpec(_))
        ));
        assert!(matches!(
            fit_with_params(&sp, &noise, &[0.5], 1.0),
            Err(Error::BadSpec(_))
        ));
        // A unit root is rejected outright.
        assert!(matches!(
            fit_with_params(&sp, &noise, &[1.0], 0.0),
            Err(Error::InfeasibleSpec)
        ));
    }

    #[test]
    fn model_json_round_trip_is_bit_exact() {
        let sp = spec(&[1], &[12], &[], &[], diff(0, 1, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.5, -0.4], 0.0, 1.0, 300, 5).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let json = model.to_json();
        let back = FittedModel::from_json(&json).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn from_json_rejects_tampered_models() {
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(sp.clone(), vec![0.4], 0.0, 1.0, 120, 9).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate(&sp, &ts).unwrap();
        let json = model.to_json();
        let tampered = json.replace("\"AR(1)\"", "\"MA(1)\"");
        assert!(FittedModel::from_json(&tampered).is_err());
    }

    #[test]
    fn insignificant_constant_is_screened_out() {
        // Mean-zero data: the constant should be dropped on refit.
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), true);
        let cfg_spec = spec(&[1], &[], &[], &[], diff(0, 0, 12), false);
        let cfg = SimulationConfig::new(cfg_spec, vec![0.5], 0.0, 1.0, 600, 13).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate_screening_constant(&sp, &ts).unwrap();
        assert!(!model.spec().constant());
        assert_eq!(model.delta(), 0.0);
    }

    #[test]
    fn significant_constant_is_kept() {
        let sp = spec(&[1], &[], &[], &[], diff(0, 0, 12), true);
        let cfg_spec = spec(&[1], &[], &[], &[], diff(0, 0, 12), true);
        let cfg = SimulationConfig::new(cfg_spec, vec![0.5], 8.0, 1.0, 600, 17).unwrap();
        let (ts, _) = simulate(&cfg).unwrap();
        let model = estimate_screening_constant(&sp, &ts).unwrap();
        assert!(model.spec().constant());
        assert!(model.delta_t_stat().unwrap().abs() >= 2.0);
    }

    #[test]
    fn estimate_requires_five_observations_per_parameter() {
        let noise = white_noise_series(30, 1);
        let sp = spec(&[1, 2, 3], &[], &[1, 2, 3], &[], diff(0, 0, 12), true);
        assert!(matches!(
            estimate(&sp, &noise),
            Err(Error::SeriesTooShort { needed: 35, got: 30 })
        ));
    }
}
