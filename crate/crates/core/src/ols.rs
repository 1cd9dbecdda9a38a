//! Ordinary least squares on named columns.
//!
//! Used by the unit-root regression and the serial-correlation LM
//! regression. Solved by modified Gram-Schmidt QR so that linearly
//! dependent columns can be detected and reported by name instead of
//! surfacing as a mystery singular matrix.

use crate::error::{Error, Result};

/// A column's squared norm must keep at least this fraction after
/// projection onto the preceding columns to count as independent.
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug)]
pub(crate) struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub rss: f64,
    /// Residual degrees of freedom, rows minus columns.
    pub df_resid: usize,
}

/// Regresses `y` on `columns`. `names` label the columns in collinearity
/// errors and must match `columns` in length.
pub(crate) fn ols(columns: &[Vec<f64>], names: &[&str], y: &[f64]) -> Result<OlsFit> {
    let p = columns.len();
    let n = y.len();
    assert_eq!(p, names.len(), "every column needs a name");
    assert!(p > 0, "regression needs at least one column");
    for col in columns {
        assert_eq!(col.len(), n, "column length must match the dependent variable");
    }
    if n <= p {
        return Err(Error::SeriesTooShort { needed: p + 1, got: n });
    }

    // Modified Gram-Schmidt: q holds orthonormal columns, r the upper
    // triangle, so X = Q R.
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut r = vec![vec![0.0; p]; p];
    let mut dependent: Vec<String> = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        let orig_norm = norm(&v);
        for (i, qi) in q.iter().enumerate() {
            let proj = dot(qi, &v);
            r[i][j] = proj;
            for (vk, qk) in v.iter_mut().zip(qi) {
                *vk -= proj * qk;
            }
        }
        let rem = norm(&v);
        if rem <= DEPENDENCE_TOL * orig_norm.max(f64::MIN_POSITIVE) {
            dependent.push(names[j].to_string());
            // Keep a placeholder so indices stay aligned while we scan the
            // remaining columns for more offenders.
            r[j][j] = 0.0;
            q.push(vec![0.0; n]);
            continue;
        }
        r[j][j] = rem;
        for vk in v.iter_mut() {
            *vk /= rem;
        }
        q.push(v);
    }
    if !dependent.is_empty() {
        return Err(Error::Collinear(dependent));
    }

    // Solve R beta = Q^T y by back substitution.
    let qty: Vec<f64> = q.iter().map(|qi| dot(qi, y)).collect();
    let mut beta = vec![0.0; p];
    for j in (0..p).rev() {
        let mut acc = qty[j];
        for k in j + 1..p {
            acc -= r[j][k] * beta[k];
        }
        beta[j] = acc / r[j][j];
    }

    let mut residuals = y.to_vec();
    for (col, b) in columns.iter().zip(&beta) {
        for (res, x) in residuals.iter_mut().zip(col) {
            *res -= b * x;
        }
    }
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df_resid = n - p;
    let sigma2 = rss / df_resid as f64;

    // (X'X)^-1 = R^-1 R^-T, so its (j,j) entry is the squared norm of row
    // j of R^-1, i.e. of the solution of R^T v = e_j (forward substitution
    // down the lower-triangular transpose).
    let mut std_errors = vec![0.0; p];
    for j in 0..p {
        let mut v = vec![0.0; p];
        v[j] = 1.0 / r[j][j];
        for i in j + 1..p {
            let mut acc = 0.0;
            for k in j..i {
                acc -= r[k][i] * v[k];
            }
            v[i] = acc / r[i][i];
        }
        let var = sigma2 * v.iter().map(|x| x * x).sum::<f64>();
        std_errors[j] = var.max(0.0).sqrt();
    }

    let t_stats = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| if *se > 0.0 { b / se } else { f64::INFINITY.copysign(*b) })
        .collect();

    Ok(OlsFit { coefficients: beta, std_errors, t_stats, rss, df_resid })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
