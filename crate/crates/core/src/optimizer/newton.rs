//! Newton polish of near-minimizers.
//!
//! Close to a minimizer the objective differences along any direction drop
//! below floating-point noise while the (analytic) gradient remains
//! accurate, so line-search methods stop making verifiable progress well
//! above tight gradient tolerances. This module finishes the job by damped
//! Newton steps on the gradient system: the Hessian is assembled by
//! central differences of the gradient, steps are accepted on gradient
//! inf-norm decrease, and a Levenberg shift handles indefiniteness away
//! from the minimum.

use super::bfgs::Objective;

/// Outcome of a [`polish`] run.
#[derive(Debug, Clone)]
pub struct PolishDiagnostics {
    pub steps: usize,
    pub grad_evals: usize,
    pub initial_grad_norm: f64,
    pub final_grad_norm: f64,
    pub converged: bool,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Hessian columns by central differences of the gradient.
pub(crate) fn fd_hessian(objective: &dyn Objective, x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut h = vec![vec![0.0; n]; n];
    let mut gp = vec![0.0; n];
    let mut gm = vec![0.0; n];
    let mut probe = x.to_vec();
    for i in 0..n {
        let step = 1e-7 * (1.0 + x[i].abs());
        probe[i] = x[i] + step;
        objective.value_and_grad(&probe, &mut gp);
        probe[i] = x[i] - step;
        objective.value_and_grad(&probe, &mut gm);
        probe[i] = x[i];
        for j in 0..n {
            h[j][i] = (gp[j] - gm[j]) / (2.0 * step);
        }
    }
    // Symmetrize: the exact Hessian is symmetric, the stencil noise is not.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (h[i][j] + h[j][i]);
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    h
}

/// Solve (H + λI) d = −g by Gaussian elimination with partial pivoting.
pub(crate) fn solve_shifted(h: &[Vec<f64>], g: &[f64], lambda: f64) -> Option<Vec<f64>> {
    let n = g.len();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = h[i].clone();
            row[i] += lambda;
            row.push(-g[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|a, b| aug[*a][col].abs().total_cmp(&aug[*b][col].abs()))?;
        if aug[pivot][col] == 0.0 {
            return None;
        }
        aug.swap(col, pivot);
        for row in col + 1..n {
            let factor = aug[row][col] / aug[col][col];
            if factor != 0.0 {
                for k in col..=n {
                    let v = aug[col][k];
                    aug[row][k] -= factor * v;
                }
            }
        }
    }
    let mut d = vec![0.0; n];
    for row in (0..n).rev() {
        let mut v = aug[row][n];
        for k in row + 1..n {
            v -= aug[row][k] * d[k];
        }
        d[row] = v / aug[row][row];
        if !d[row].is_finite() {
            return None;
        }
    }
    Some(d)
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// [`polish`] with finite-difference Hessians.
pub fn polish(
    objective: &dyn Objective,
    x: &mut [f64],
    grad_tol: f64,
    max_steps: usize,
) -> PolishDiagnostics {
    polish_with(
        objective,
        &|v| fd_hessian(objective, v),
        x,
        grad_tol,
        max_steps,
    )
}

/// Refines `x` in place until the gradient inf-norm reaches `grad_tol`, a
/// step cap is hit, or no damped Newton step reduces the gradient norm.
///
/// Steps are accepted on Euclidean gradient-norm decrease (the natural
/// merit function for Newton on ∇I = 0); termination uses the inf-norm.
pub fn polish_with(
    objective: &dyn Objective,
    hessian: &dyn Fn(&[f64]) -> Vec<Vec<f64>>,
    x: &mut [f64],
    grad_tol: f64,
    max_steps: usize,
) -> PolishDiagnostics {
    let n = x.len();
    let mut grad_evals = 1usize;
    let mut g = vec![0.0; n];
    objective.value_and_grad(x, &mut g);
    let initial = inf_norm(&g);
    let mut merit = l2_norm(&g);
    let mut steps = 0;
    let mut lambda = 0.0f64;

    while inf_norm(&g) > grad_tol && steps < max_steps {
        let h = hessian(x);
        let diag_scale = (0..n)
            .map(|i| h[i][i].abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let mut improved = false;
        for _ in 0..12 {
            if let Some(d) = solve_shifted(&h, &g, lambda) {
                // Backtrack on the gradient norm along the damped direction.
                let mut scale = 1.0;
                for _ in 0..20 {
                    let trial: Vec<f64> = (0..n).map(|i| x[i] + scale * d[i]).collect();
                    let mut g_new = vec![0.0; n];
                    let value = objective.value_and_grad(&trial, &mut g_new);
                    grad_evals += 1;
                    let merit_new = l2_norm(&g_new);
                    if value.is_finite() && merit_new < merit {
                        x.copy_from_slice(&trial);
                        g = g_new;
                        merit = merit_new;
                        improved = true;
                        break;
                    }
                    scale *= 0.5;
                }
            }
            if improved {
                // Relax the damping while full steps keep working.
                lambda *= 0.25;
                if lambda < 1e-14 * diag_scale {
                    lambda = 0.0;
                }
                break;
            }
            lambda = if lambda == 0.0 {
                1e-10 * diag_scale
            } else {
                lambda * 30.0
            };
        }
        if !improved {
            break;
        }
        steps += 1;
    }

    PolishDiagnostics {
        steps,
        grad_evals,
        initial_grad_norm: initial,
        final_grad_norm: inf_norm(&g),
        converged: inf_norm(&g) <= grad_tol,
    }
}
