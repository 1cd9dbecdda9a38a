//! Lag (backshift) polynomials with unit constant term.
//!
//! A polynomial c(B) = 1 + c1*B + ... + cn*B^n acts on a series by
//! (c(B)x)_t = sum_j c_j x_{t-j}. AR and MA operators, and their seasonal
//! products, are all of this form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are treated as structural zeros when
/// trimming degree and enumerating active lags.
const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LagPolynomial {
    /// coeffs[k] multiplies B^k; coeffs[0] is always exactly 1.
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for LagPolynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.first() != Some(&1.0) {
            return Err(Error::BadSpec("lag polynomial must have constant term 1".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::BadSpec("lag polynomial coefficients must be finite".into()));
        }
        Ok(LagPolynomial { coeffs })
    }
}

impl From<LagPolynomial> for Vec<f64> {
    fn from(p: LagPolynomial) -> Vec<f64> {
        p.coeffs
    }
}

impl LagPolynomial {
    /// The polynomial 1 (no dynamics).
    pub fn identity() -> Self {
        LagPolynomial { coeffs: vec![1.0] }
    }

    /// Builds 1 + sum coeff_i * B^{lag_i}. Lags must be positive and
    /// distinct; callers fold sign conventions into the coefficients.
    pub fn with_unit_constant(terms: &[(usize, f64)]) -> Result<Self> {
        let degree = terms.iter().map(|(lag, _)| *lag).max().unwrap_or(0);
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[0] = 1.0;
        for &(lag, c) in terms {
            if lag == 0 {
                return Err(Error::BadSpec("lag 0 would change the unit constant term".into()));
            }
            if coeffs[lag] != 0.0 {
                return Err(Error::BadSpec(format!("duplicate lag {lag}")));
            }
            if !c.is_finite() {
                return Err(Error::BadSpec(format!("coefficient at lag {lag} is not finite")));
            }
            coeffs[lag] = c;
        }
        Ok(LagPolynomial { coeffs })
    }

    pub fn coeff(&self, power: usize) -> f64 {
        self.coeffs.get(power).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Highest power with a non-negligible coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.abs() > ZERO_TOL)
            .unwrap_or(0)
    }

    /// Active lags (power >= 1) and their coefficients, ascending.
    pub fn nonzero_lags(&self) -> Vec<(usize, f64)> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| c.abs() > ZERO_TOL)
            .map(|(lag, c)| (lag, *c))
            .collect()
    }

    /// Polynomial product; the result's degree is the sum of the factors'.
    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LagPolynomial { coeffs }
    }

    /// Evaluates the polynomial at a scalar, e.g. at 1 to convert an
    /// intercept into a process mean.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// True when every root lies strictly outside the circle of the given
    /// radius. This is the stationarity/invertibility question with the
    /// radius left adjustable, answered exactly by the Schur-Cohn
    /// recursion, which always terminates in `degree` steps.
    pub fn roots_outside(&self, radius: f64) -> bool {
        let n = self.degree();
        if n == 0 {
            return true;
        }
        // z^n p(radius/z) maps the roots to radius/root: p's roots all lie
        // beyond the radius exactly when that polynomial is Schur stable.
        // Its coefficients are p's scaled by radius^k, reversed.
        let mut f: Vec<f64> = Vec::with_capacity(n + 1);
        let mut scale = 1.0;
        for k in 0..=n {
            f.push(self.coeffs[k] * scale);
            scale *= radius;
        }
        f.reverse();
        schur_cohn_stable(&f)
    }

    /// Smallest root modulus, or `None` for a degree-zero polynomial.
    ///
    /// Stationarity/invertibility requires every root strictly outside the
    /// unit circle, i.e. a minimum modulus above 1. Single-term polynomials
    /// (every factor of a subset-lag model, checked on each objective
    /// evaluation during estimation) have the closed form |c|^(-1/k);
    /// anything denser goes through bisection over [`Self::roots_outside`].
    pub fn min_root_modulus(&self) -> Option<f64> {
        let n = self.degree();
        if n == 0 {
            return None;
        }
        let active = self.nonzero_lags();
        // 1 + c B^k puts its k roots evenly on the circle of radius
        // |c|^(-1/k).
        if active.len() == 1 {
            let (k, c) = active[0];
            return Some(c.abs().powf(-1.0 / k as f64));
        }
        // The root moduli multiply to 1/|c_n| (the constant term is 1), so
        // the geometric mean bounds the smallest root from above.
        let mut hi = self.coeffs[n].abs().powf(-1.0 / n as f64) * (1.0 + 1e-9);
        let mut lo = 0.0;
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if self.roots_outside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Schur-Cohn test: true when every root of a0 + a1*z + ... + an*z^n lies
/// strictly inside the unit circle. Each step peels off one degree, so the
/// recursion runs exactly `n` times; boundary and degenerate cases (a root
/// on the circle, non-finite intermediates) report unstable.
fn schur_cohn_stable(poly: &[f64]) -> bool {
    let mut a = poly.to_vec();
    loop {
        let n = a.len() - 1;
        if n == 0 {
            return true;
        }
        let lead = a[n];
        let tail = a[0];
        if !(tail.abs() < lead.abs()) {
            return false;
        }
        // lead*a(z) - tail*z^n a(1/z) has zero constant term; dividing by z
        // leaves a polynomial one degree down with the same stability.
        let mut next: Vec<f64> = (1..=n).map(|k| lead * a[k] - tail * a[n - k]).collect();
        let max = next.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !max.is_finite() {
            return false;
        }
        if max > 0.0 {
            // Rescaling does not move the roots; it keeps the repeated
            // products from overflowing at high degree.
            for v in &mut next {
                *v /= max;
            }
        }
        a = next;
    }
}

impl std::fmt::Display for LagPolynomial {
    /// Renders like `1 - 0.154B^9 + 0.513B^12`, the conventional notation.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "1")?;
        for (lag, c) in self.nonzero_lags() {
            let sign = if c < 0.0 { '-' } else { '+' };
            write!(f, " {} {:.3}B^{}", sign, c.abs(), lag)?;
        }
        Ok(())
    }
}
