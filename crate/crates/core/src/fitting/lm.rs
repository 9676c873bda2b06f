//! Damped Gauss-Newton (Levenberg-Marquardt) for small dense problems.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// A scalar model `y = f(x; p)` with an analytic parameter gradient.
pub trait Model {
    fn n_params(&self) -> usize;
    fn value(&self, x: f64, params: &[f64]) -> f64;
    /// Writes `∂f/∂p_i` into `out`.
    fn gradient(&self, x: f64, params: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Relative parameter change below which the fit has converged.
    pub tolerance: f64,
    pub initial_lambda: f64,
    /// Damping is multiplied by this on a rejected step and divided by it on
    /// an accepted one.
    pub lambda_factor: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tolerance: 1e-8,
            initial_lambda: 1e-3,
            lambda_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    pub iterations: usize,
    /// RMS of `model - data`.
    pub rms: f64,
}

fn cost<M: Model>(model: &M, xs: &[f64], ys: &[f64], p: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = model.value(x, p) - y;
            r * r
        })
        .sum()
}

/// Solves `a·x = b` in place by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular system.
pub(crate) fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Minimizes `Σ (f(x_i; p) - y_i)²` starting from `init`.
///
/// Converges when an accepted step changes the parameter vector by less
/// than `tolerance` relative to its norm, or when no damped step can lower
/// the cost any further (the damping overflows at a stationary point).
/// Running out of iterations is a [`Error::FitFailure`] carrying the last
/// iterate.
pub fn levenberg_marquardt<M: Model>(
    model: &M,
    xs: &[f64],
    ys: &[f64],
    init: &[f64],
    config: &LmConfig,
) -> Result<LmOutcome> {
    let np = model.n_params();
    assert_eq!(init.len(), np);
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let rms = |c: f64| (c / n.max(1) as f64).sqrt();

    let mut p = init.to_vec();
    let mut current = cost(model, xs, ys, &p);
    if !current.is_finite() {
        return Err(Error::FitFailure {
            reason: "non-finite cost at initial guess".into(),
            iterations: 0,
            rms: f64::NAN,
            last: p,
        });
    }
    let mut lambda = config.initial_lambda;
    let mut grad = vec![0.0; np];

    for iteration in 1..=config.max_iterations {
        let mut jtj = vec![vec![0.0; np]; np];
        let mut jtr = vec![0.0; np];
        for (&x, &y) in xs.iter().zip(ys) {
            model.gradient(x, &p, &mut grad);
            let r = y - model.value(x, &p);
            for i in 0..np {
                jtr[i] += grad[i] * r;
                for j in 0..=i {
                    jtj[i][j] += grad[i] * grad[j];
                }
            }
        }
        for i in 0..np {
            for j in 0..i {
                jtj[j][i] = jtj[i][j];
            }
        }

        loop {
            let mut damped = jtj.clone();
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let mut rhs = jtr.clone();
            let step = solve_dense(&mut damped, &mut rhs);
            if let Some(delta) = step {
                let trial: Vec<f64> = p.iter().zip(&delta).map(|(a, d)| a + d).collect();
                let trial_cost = cost(model, xs, ys, &trial);
                if trial_cost.is_finite() && trial_cost <= current {
                    let dnorm = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
                    let pnorm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                    p = trial;
                    current = trial_cost;
                    lambda = (lambda / config.lambda_factor).max(1e-15);
                    if dnorm <= config.tolerance * (pnorm + config.tolerance) {
                        return Ok(LmOutcome {
                            params: p,
                            iterations: iteration,
                            rms: rms(current),
                        });
                    }
                    break;
                }
            }
            lambda *= config.lambda_factor;
            if lambda > 1e16 {
                return Ok(LmOutcome {
                    params: p,
                    iterations: iteration,
                    rms: rms(current),
                });
            }
        }
    }

    Err(Error::FitFailure {
        reason: "iteration limit reached".into(),
        iterations: config.max_iterations,
        rms: rms(current),
        last: p,
    })
}
