//! Verification of hand-coded gradients against central finite differences.

use super::Objective;

/// Finite-difference step (componentwise).
const FD_STEP: f64 = 1e-6;

/// Discrepancies below this absolute floor count as exact; larger ones are
/// measured relative to the bigger of the two gradient magnitudes.
const ABS_FLOOR: f64 = 1e-8;

/// Compares the analytic gradient of `objective` at `x` against central
/// finite differences and returns the largest componentwise relative error.
///
/// Components where |analytic − FD| ≤ 1e−8 contribute zero: close to a
/// minimizer both gradients shrink below what central differences can
/// resolve, and the floor keeps that measurement noise from registering as
/// a relative error.
pub fn grad_check(objective: &dyn Objective, x: &[f64]) -> f64 {
    let n = x.len();
    let mut analytic = vec![0.0; n];
    objective.value_and_grad(x, &mut analytic);

    let mut probe = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..n {
        probe[i] = x[i] + FD_STEP;
        let fp = objective.value(&probe);
        probe[i] = x[i] - FD_STEP;
        let fm = objective.value(&probe);
        probe[i] = x[i];
        let fd = (fp - fm) / (2.0 * FD_STEP);
        let diff = (analytic[i] - fd).abs();
        if diff <= ABS_FLOOR {
            continue;
        }
        let denom = analytic[i].abs().max(fd.abs()).max(ABS_FLOOR);
        worst = worst.max(diff / denom);
    }
    worst
}
