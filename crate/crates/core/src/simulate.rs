//! Synthetic SARIMA generation: the independent oracle the estimation,
//! diagnostics, and forecasting tests are checked against.
//!
//! The random machinery is pinned down to the algorithm so that a seed
//! identifies one exact series on every platform and toolchain: SplitMix64
//! for the uniform stream, the trigonometric Box-Muller transform for
//! normals. Nothing here depends on an external RNG crate whose stream
//! could shift between versions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sarima::{expand, SarimaSpec};
use crate::series::{Period, TimeSeries};
use crate::transform::DifferencedSeries;

/// SplitMix64 (Steele, Lea and Flood's 64-bit mixer): state advances by the
/// golden-gamma increment 0x9E3779B97F4A7C15, and each output is the state
/// passed through two xor-multiply mixing rounds. For seed 0 the first
/// outputs are 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on (0, 1]: the top 53 bits shifted into the unit interval,
    /// nudged off zero so it is safe inside a logarithm.
    fn next_open_closed(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * 2f64.powi(-53)
    }

    /// Uniform on [0, 1).
    fn next_closed_open(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * 2f64.powi(-53)
    }
}

/// Standard normal draws via Box-Muller: each uniform pair (u1, u2) yields
/// r cos(theta) and r sin(theta) with r = sqrt(-2 ln u1), theta = 2 pi u2.
/// The second draw of each pair is cached, so consecutive calls consume the
/// uniform stream two at a time.
#[derive(Clone, Debug)]
pub struct NormalSource {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new(seed: u64) -> Self {
        NormalSource { rng: SplitMix64::new(seed), spare: None }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = self.rng.next_open_closed();
        let u2 = self.rng.next_closed_open();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

fn default_start() -> Period {
    Period::new(2000, 1).expect("valid period")
}

/// Everything that determines a simulated series. Two equal configs always
/// produce bit-identical output.
///
/// Serializes with coefficients as a `{"AR(1)": 0.5, ...}` map keyed by
/// term label, the resolved burn-in, and the start period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSimulationConfig", into = "RawSimulationConfig")]
pub struct SimulationConfig {
    spec: SarimaSpec,
    coefficients: Vec<f64>,
    delta: f64,
    sigma: f64,
    length: usize,
    burn_in: usize,
    seed: u64,
    start: Period,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawSimulationConfig {
    spec: SarimaSpec,
    #[serde(default)]
    coefficients: BTreeMap<String, f64>,
    #[serde(default)]
    delta: f64,
    sigma: f64,
    length: usize,
    #[serde(default)]
    burn_in: Option<usize>,
    seed: u64,
    #[serde(default = "default_start")]
    start: Period,
}

impl TryFrom<RawSimulationConfig> for SimulationConfig {
    type Error = Error;

    fn try_from(raw: RawSimulationConfig) -> Result<Self> {
        let terms = raw.spec.terms();
        if raw.coefficients.len() != terms.len() {
            let known: Vec<String> = terms.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidConfig(format!(
                "expected coefficients for exactly {{{}}}, got {} entries",
                known.join(", "),
                raw.coefficients.len()
            )));
        }
        let mut coefficients = Vec::with_capacity(terms.len());
        for term in &terms {
            match raw.coefficients.get(&term.to_string()) {
                Some(v) => coefficients.push(*v),
                None => {
                    return Err(Error::InvalidConfig(format!(
                        "missing coefficient for {term}"
                    )))
                }
            }
        }
        let mut cfg = SimulationConfig::new(
            raw.spec,
            coefficients,
            raw.delta,
            raw.sigma,
            raw.length,
            raw.seed,
        )?;
        if let Some(b) = raw.burn_in {
            cfg = cfg.with_burn_in(b)?;
        }
        cfg.start = raw.start;
        Ok(cfg)
    }
}

impl From<SimulationConfig> for RawSimulationConfig {
    fn from(cfg: SimulationConfig) -> Self {
        let coefficients = cfg
            .spec
            .terms()
            .iter()
            .map(ToString::to_string)
            .zip(cfg.coefficients.iter().copied())
            .collect();
        RawSimulationConfig {
            spec: cfg.spec,
            coefficients,
            delta: cfg.delta,
            sigma: cfg.sigma,
            length: cfg.length,
            burn_in: Some(cfg.burn_in),
            seed: cfg.seed,
            start: cfg.start,
        }
    }
}

impl SimulationConfig {
    /// Burn-in defaults to ten times the larger expanded polynomial degree;
    /// the start period to 2000-01. Override with [`Self::with_burn_in`] and
    /// [`Self::with_start`].
    pub fn new(
        spec: SarimaSpec,
        coefficients: Vec<f64>,
        delta: f64,
        sigma: f64,
        length: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "shock standard deviation must be positive and finite, got {sigma}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidConfig("delta must be finite".into()));
        }
        if delta != 0.0 && !spec.constant() {
            return Err(Error::InvalidConfig(
                "nonzero delta requires a specification with a constant".into(),
            ));
        }
        let (ar, ma) = expand(&spec, &coefficients)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let min_modulus = [&ar, &ma]
            .iter()
            .filter_map(|p| p.min_root_modulus())
            .fold(f64::INFINITY, f64::min);
        if min_modulus <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "polynomial roots must lie outside the unit circle (min modulus {min_modulus:.6})"
            )));
        }
        let warmup = spec.diff().warmup_len();
        if length <= warmup {
            return Err(Error::InvalidConfig(format!(
                "length {length} leaves no observations after the {warmup}-value differencing warmup"
            )));
        }
        let burn_in = 10 * ar.degree().max(ma.degree());
        Ok(SimulationConfig {
            spec,
            coefficients,
            delta,
            sigma,
            length,
            burn_in,
            seed,
            start: default_start(),
        })
    }

    /// Overrides the burn-in. Values below the 10x-degree default are
    /// rejected so the sampled window always sits past the transient.
    pub fn with_burn_in(mut self, burn_in: usize) -> Result<Self> {
        let (ar, ma) = expand(&self.spec, &self.coefficients)?;
        let floor = 10 * ar.degree().max(ma.degree());
        if burn_in < floor {
            return Err(Error::InvalidConfig(format!(
                "burn-in {burn_in} is below the minimum {floor} for these polynomial degrees"
            )));
        }
        self.burn_in = burn_in;
        Ok(self)
    }

    pub fn with_start(mut self, start: Period) -> Self {
        self.start = start;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn spec(&self) -> &SarimaSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn start(&self) -> Period {
        self.start
    }
}

/// Draws shocks, runs the ARMA recursion on the differenced scale, and
/// integrates up to the original scale (initial conditions zero, so the
/// first d + D*s output values are zero).
///
/// Returns the series and the kept shocks, one per differenced observation;
/// burn-in values of both are discarded. Differencing the output with the
/// config's spec recovers the internal z-series up to float reconstruction
/// error.
pub fn simulate(cfg: &SimulationConfig) -> Result<(TimeSeries, Vec<f64>)> {
    let (ar, ma) = expand(&cfg.spec, &cfg.coefficients)?;
    let ar_terms = ar.nonzero_lags();
    let ma_terms = ma.nonzero_lags();

    let warmup_len = cfg.spec.diff().warmup_len();
    let z_len = cfg.length - warmup_len;
    let total = cfg.burn_in + z_len;

    let mut source = NormalSource::new(cfg.seed);
    let shocks: Vec<f64> = (0..total).map(|_| cfg.sigma * source.next_normal()).collect();

    // ar(B) z_t = delta + ma(B) a_t, pre-sample values zero.
    let mut z = Vec::with_capacity(total);
    for t in 0..total {
        let mut v = cfg.delta + shocks[t];
        for &(lag, m) in &ma_terms {
            if t >= lag {
                v += m * shocks[t - lag];
            }
        }
        for &(lag, c) in &ar_terms {
            if t >= lag {
                v -= c * z[t - lag];
            }
        }
        z.push(v);
    }

    let kept_z = z[cfg.burn_in..].to_vec();
    let kept_shocks = shocks[cfg.burn_in..].to_vec();
    let differenced =
        DifferencedSeries::from_parts(kept_z, cfg.spec.diff(), vec![0.0; warmup_len])?;
    let values = differenced.integrate(&[])?;
    let ts = TimeSeries::new(cfg.start, values, cfg.spec.diff().period())?;
    Ok((ts, kept_shocks))
}
