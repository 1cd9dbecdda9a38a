//! Nelder-Mead simplex minimization.
//!
//! Derivative-free, which suits the conditional sum-of-squares surface: the
//! stationarity penalty makes it non-smooth at the admissible-region
//! boundary. Standard coefficients (reflection 1, expansion 2, contraction
//! 0.5, shrink 0.5); fully deterministic for a given start.

pub(crate) struct Options {
    pub max_evals: usize,
    /// Convergence when the largest pairwise vertex distance drops below this.
    pub diameter_tol: f64,
}

pub(crate) struct Solution {
    pub x: Vec<f64>,
    pub converged: bool,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn diameter(vertices: &[Vec<f64>]) -> f64 {
    let mut max = 0.0_f64;
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            max = max.max(distance(&vertices[i], &vertices[j]));
        }
    }
    max
}

/// Minimizes `f` from `x0`, offsetting each coordinate by `steps[i]` to form
/// the initial simplex. Non-finite objective values are treated as +inf so
/// penalized or overflowed iterates are simply avoided.
pub(crate) fn minimize(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    opts: &Options,
) -> Solution {
    assert_eq!(x0.len(), steps.len());
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    if n == 0 {
        return Solution { x: x0.to_vec(), converged: true };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let points: Vec<Vec<f64>> = simplex.iter().map(|(x, _)| x.clone()).collect();
        if diameter(&points) < opts.diameter_tol {
            return Solution { x: simplex.swap_remove(0).0, converged: true };
        }
        if evals >= opts.max_evals {
            return Solution { x: simplex.swap_remove(0).0, converged: false };
        }

        let best = simplex[0].1;
        let second_worst = simplex[n - 1].1;
        let worst = simplex[n].1;

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }

        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[n].0)
            .map(|(c, w)| c + (c - w))
            .collect();
        let fr = eval(&reflect, &mut evals);

        if fr < best {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let fe = eval(&expand, &mut evals);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[n] = (reflect, fr);
            continue;
        }

        // Contract toward the better of the worst vertex and its reflection.
        let (toward, f_toward) = if fr < worst { (&reflect, fr) } else { (&simplex[n].0, worst) };
        let contract: Vec<f64> = centroid
            .iter()
            .zip(toward)
            .map(|(c, w)| c + 0.5 * (w - c))
            .collect();
        let fc = eval(&contract, &mut evals);
        if fc < f_toward {
            simplex[n] = (contract, fc);
            continue;
        }

        // Shrink everything toward the best vertex.
        let best_x = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best_x) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            *v = eval(x, &mut evals);
        }
    }
}
