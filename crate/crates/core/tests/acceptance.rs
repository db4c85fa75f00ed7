//! Acceptance suite: one test per shipped claim, each printing a PASS line
//! with the measured numbers (run with `-- --nocapture` to see them).
//!
//! Criterion 8b pins a second-order Richardson window for the layer
//! constraint residual; the implemented residual converges at fourth order
//! (see the note on the test), so that single check fails by construction
//! and documents the discrepancy.

mod common;

use rand::{Rng, SeedableRng};
use smectic_core::bv_probe::{default_families, probe, ProbeSetup};
use smectic_core::fields::{curve_geometry_all, make_zigzag};
use smectic_core::functionals::{partition_energy, BoundaryTermForm, GWeight, ModelParams};
use smectic_core::jump_energy::{
    bisectors, phi, phi_angular_both, zeta, Alpha, DensityKind, JumpCost, JumpTriple,
};
use smectic_core::optimizer::{
    grad_check, solve_quarter, solve_rectangle, QuarterObjective, SolveReport, SolverConfig,
};
use smectic_core::qtensor::{DirectorAngle, QTensor, SampledField, UnitVector};
use std::f64::consts::{LN_2, PI, SQRT_2};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

fn params(k1: f64, mu: f64, alpha: f64, eps: f64) -> ModelParams {
    ModelParams::new(k1, mu, Alpha::new(alpha).unwrap(), eps).unwrap()
}

fn q(beta: f64) -> QTensor {
    QTensor::from_angle(DirectorAngle::new(beta))
}

/// Rectangle solve shared by criteria 1 and 2: L = 1, α = 0.5, μ = 1,
/// final mesh 200.
fn rectangle_solution() -> &'static (SolveReport, Duration) {
    static SOLUTION: OnceLock<(SolveReport, Duration)> = OnceLock::new();
    SOLUTION.get_or_init(|| {
        let cfg = SolverConfig {
            mesh_schedule: vec![50, 100, 200],
            ..SolverConfig::default()
        };
        let start = Instant::now();
        let report = solve_rectangle(1.0, 1.0, &params(1.0, 1.0, 0.5, 1e-12), &cfg)
            .expect("rectangle solve");
        (report, start.elapsed())
    })
}

/// The four quarter-disk panels shared by criteria 3 and 4:
/// K₁ = 2, μ ∈ {1, 2}, α ∈ {0.2, 0.5}, ε = 1e−12, integral boundary form
/// with the linear weight, mesh 50 → 100 in steps of 10.
fn quarter_panels() -> &'static Vec<(f64, f64, SolveReport, Duration)> {
    static PANELS: OnceLock<Vec<(f64, f64, SolveReport, Duration)>> = OnceLock::new();
    PANELS.get_or_init(|| {
        let mut out = Vec::new();
        for mu in [1.0, 2.0] {
            for alpha in [0.2, 0.5] {
                let start = Instant::now();
                let report = solve_quarter(
                    &params(2.0, mu, alpha, 1e-12),
                    &SolverConfig::default(),
                    BoundaryTermForm::Integral(GWeight::Linear),
                )
                .expect("quarter solve");
                out.push((mu, alpha, report, start.elapsed()));
            }
        }
        out
    })
}

#[test]
fn criterion_01_rectangle_parabola_reproduction() {
    let (report, elapsed) = rectangle_solution();
    assert!(report.converged, "rectangle solve did not converge");
    assert_eq!(report.profile.len(), 200);

    let mut linf = 0.0f64;
    let mut cartesian = 0.0f64;
    for (j, rho) in report.profile.rho_samples().iter().enumerate() {
        let theta = report.profile.theta(j);
        linf = linf.max((rho - 1.0 / (1.0 + theta.sin())).abs());
        let (x1, x2) = (rho * theta.cos(), rho * theta.sin());
        cartesian = cartesian.max((x2 - (0.5 - 0.5 * x1 * x1)).abs());
    }
    assert!(linf <= 1e-3, "max |rho - closed form| = {linf:.3e}");
    assert!(
        cartesian <= 1e-3,
        "Cartesian parabola deviation = {cartesian:.3e}"
    );
    assert!(
        *elapsed <= Duration::from_secs(30),
        "rectangle runtime {elapsed:?}"
    );
    println!(
        "criterion 1 PASS: rectangle m=200 converged, max|rho err| {linf:.3e}, \
         Cartesian deviation {cartesian:.3e}, runtime {elapsed:?}"
    );
}

#[test]
fn criterion_02_bisection_property_at_rectangle_optimum() {
    let (report, _) = rectangle_solution();
    let geometry = curve_geometry_all(&report.profile);
    let half_pi = PI / 2.0;
    let mut worst = 0.0f64;
    for (j, g) in geometry
        .iter()
        .enumerate()
        .skip(1)
        .take(report.profile.len() - 2)
    {
        let theta = report.profile.theta(j);
        let target = (half_pi + theta) / 2.0;
        let mut d = (g.normal_angle - target).rem_euclid(half_pi);
        if d > half_pi / 2.0 {
            d = half_pi - d;
        }
        worst = worst.max(d);
    }
    assert!(worst <= 1e-2, "bisection defect {worst:.3e}");
    println!("criterion 2 PASS: normal bisects the layer pair to {worst:.3e} rad (tol 1e-2)");
}

#[test]
fn criterion_03_quarter_panels_converge_and_fit_two_parabolas() {
    for (mu, alpha, report, elapsed) in quarter_panels() {
        assert!(
            report.converged && report.final_grad_norm <= 1e-8,
            "panel mu={mu} alpha={alpha}: grad {:.3e}",
            report.final_grad_norm
        );
        let fit = report.fit.as_ref().expect("fit");
        assert!(
            fit.max_deviation <= 0.02,
            "panel mu={mu} alpha={alpha}: fit deviation {:.3e}",
            fit.max_deviation
        );
        assert!(
            *elapsed <= Duration::from_secs(60),
            "panel mu={mu} alpha={alpha}: runtime {elapsed:?}"
        );
        println!(
            "criterion 3 PASS: panel mu={mu} alpha={alpha}: grad {:.2e}, \
             arc fit (a={:.4}, b={:.4}) deviation {:.2e}, runtime {elapsed:?}",
            report.final_grad_norm, fit.a, fit.b, fit.max_deviation
        );
    }
}

#[test]
fn criterion_04_jump_set_shrinks_with_mu_more_than_with_alpha() {
    let panels = quarter_panels();
    let mean = |mu: f64, alpha: f64| -> f64 {
        panels
            .iter()
            .find(|(m, a, _, _)| *m == mu && *a == alpha)
            .map(|(_, _, r, _)| r.mean_rho())
            .expect("panel")
    };
    let mut min_mu_effect = f64::INFINITY;
    for alpha in [0.2, 0.5] {
        let hi = mean(1.0, alpha);
        let lo = mean(2.0, alpha);
        assert!(lo < hi, "alpha={alpha}: mean rho {lo} !< {hi}");
        min_mu_effect = min_mu_effect.min(hi - lo);
    }
    let mut max_alpha_effect = 0.0f64;
    for mu in [1.0, 2.0] {
        max_alpha_effect = max_alpha_effect.max((mean(mu, 0.5) - mean(mu, 0.2)).abs());
    }
    assert!(
        max_alpha_effect < min_mu_effect,
        "alpha effect {max_alpha_effect:.3e} not weaker than mu effect {min_mu_effect:.3e}"
    );
    println!(
        "criterion 4 PASS: mean rho shrinks with mu (weakest effect {min_mu_effect:.3e}); \
         alpha effect at most {max_alpha_effect:.3e}"
    );
}

#[test]
fn criterion_05_zigzag_envelope_coincidence() {
    for (b, mu) in [(1.0, 1.0), (2.0, 1.5)] {
        let p = params(1.0, mu, 0.5, 0.0);
        let qp = q(0.0);
        let qm = q(PI / 2.0);
        let expected = SQRT_2 * b * mu;
        for n_teeth in 1..=64usize {
            let config = make_zigzag(b, n_teeth, qp, qm).unwrap();
            let cost = partition_energy(&config, &p, DensityKind::Singular, 1e-9);
            let v = cost.finite().expect("sawtooth energy is finite");
            assert!(
                (v - expected).abs() <= 1e-12,
                "b={b} mu={mu} teeth={n_teeth}: {v} vs {expected}"
            );
        }
        let flat = make_zigzag(b, 0, qp, qm).unwrap();
        assert_eq!(
            partition_energy(&flat, &p, DensityKind::Singular, 1e-9),
            JumpCost::Infinite
        );
        let flat_phi = partition_energy(&flat, &p, DensityKind::Envelope, 1e-9)
            .finite()
            .unwrap();
        assert!(
            (flat_phi - expected).abs() <= 1e-12,
            "{flat_phi} vs {expected}"
        );
    }
    println!(
        "criterion 5 PASS: sawtooth singular energy = √2·b·μ for 1..=64 teeth (1e-12), \
         flat singular infinite, flat envelope = √2·b·μ"
    );
}

#[test]
fn criterion_06_identity_and_symmetry_suite() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61_803);
    let alpha = Alpha::new(0.5).unwrap();
    for _ in 0..10_000 {
        let bp: f64 = rng.random_range(-10.0..10.0);
        let bm: f64 = rng.random_range(-10.0..10.0);
        let g: f64 = rng.random_range(-10.0..10.0);
        let delta: f64 = rng.random_range(-10.0..10.0);
        let (qp, qm) = (q(bp), q(bm));
        let nu = UnitVector::from_angle(g);

        // Identity bridging the tensor and angular distance.
        let d = qp.distance(&qm);
        assert!((d - (bp - bm).sin().abs()).abs() < 1e-12);
        // Identity bridging the tensor and angular normal mismatch.
        let lhs = SQRT_2 * (qp.normal_form(nu) - qm.normal_form(nu)).abs();
        let rhs = ((bp + bm - 2.0 * g).sin() * (bp - bm).sin()).abs();
        assert!((lhs - rhs).abs() < 1e-12);
        // The two printed angular forms agree, and match the tensor form.
        let (first, second) = phi_angular_both(bp, bm, g, alpha);
        assert!((first - second).abs() < 1e-12);
        let tensor = phi(&JumpTriple::new(qp, qm, nu), alpha);
        assert!((first - tensor).abs() < 1e-12);

        // C1: zero iff coincident, else bounded below by |ΔQ|^α.
        if d > 1e-14 {
            assert!(tensor >= d.powf(0.5) - 1e-15 && tensor > 0.0);
        }
        assert_eq!(phi(&JumpTriple::new(qp, qp, nu), alpha), 0.0);
        // C2: exact orientation swap.
        let swapped = phi(&JumpTriple::new(qm, qp, nu.opposite()), alpha);
        assert_eq!(tensor, swapped);
        // C3: frame rotation and reflection.
        assert!(
            (phi_angular_both(bp + delta, bm + delta, g + delta, alpha).0 - first).abs() < 1e-12
        );
        assert!((phi_angular_both(-bp, -bm, -g, alpha).0 - first).abs() < 1e-12);
    }

    // C4: the γ-grid minimum sits at the four bisectors.
    let (bp, bm) = (1.1, 0.2);
    let (qp, qm) = (q(bp), q(bm));
    let bis = bisectors(&qp, &qm).unwrap();
    let n = 10_000;
    let mut best = (f64::INFINITY, 0.0f64);
    for k in 0..n {
        let g = 2.0 * PI * k as f64 / n as f64;
        let v = phi(&JumpTriple::new(qp, qm, UnitVector::from_angle(g)), alpha);
        if v < best.0 {
            best = (v, g);
        }
    }
    let cell = 2.0 * PI / n as f64;
    assert!(bis.iter().any(|nu| {
        let mut d = (best.1 - nu.angle()).rem_euclid(2.0 * PI);
        if d > PI {
            d = 2.0 * PI - d;
        }
        d <= cell
    }));
    let at_bisector = phi(&JumpTriple::new(qp, qm, bis[0]), alpha);
    assert!(at_bisector <= best.0 + 1e-15);
    // Envelope inequality on the same spot checks (finite ≤ singular).
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(271_828);
    for _ in 0..10_000 {
        let t = JumpTriple::new(
            q(rng.random_range(-6.0..6.0)),
            q(rng.random_range(-6.0..6.0)),
            UnitVector::from_angle(rng.random_range(0.0..2.0 * PI)),
        );
        let envelope = JumpCost::Finite(phi(&t, alpha));
        assert!(envelope.le(&zeta(&t, alpha, 0.0)));
    }
    println!(
        "criterion 6 PASS: tensor/angular identities to 1e-12 on 10^4 samples; \
         C1-C4 and the envelope inequality hold"
    );
}

#[test]
fn criterion_07_gradient_correctness_on_quarter_objective() {
    let p = params(2.0, 1.0, 0.5, 1e-12);
    let objective = QuarterObjective::new(50, p, BoundaryTermForm::Integral(GWeight::Linear));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(777);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: Vec<f64> = (0..50)
            .map(|_| LN_2 + rng.random_range(-0.3..0.3))
            .collect();
        worst = worst.max(grad_check(&objective, &x));
    }
    assert!(worst <= 1e-5, "worst grad check {worst:.3e}");
    println!("criterion 7 PASS: grad check ≤ {worst:.3e} over 20 random profiles (tol 1e-5)");
}

fn circular_field_residual(h: f64) -> f64 {
    let n = (0.5 / h) as usize + 1;
    SampledField::from_director_fn((0.5, 0.5), h, n, n, |x, y| DirectorAngle::new(y.atan2(x)))
        .unwrap()
        .constraint_residual()
        .max_abs()
        .unwrap()
}

#[test]
fn criterion_08a_constraint_residual_bound() {
    let max = circular_field_residual(1.0 / 256.0);
    assert!(max <= 1e-3, "max residual {max:.3e}");
    println!("criterion 8a PASS: circular-layer residual {max:.3e} ≤ 1e-3 at h = 1/256");
}

#[test]
fn criterion_08b_constraint_residual_richardson_window() {
    // Pinned expectation: ratios within [3.5, 4.5] (second order). The
    // residual's quadratic form has rank-one coefficients n⊗n, and the
    // exact directional derivative (n·∇)Q vanishes for concentric layers,
    // so the computed residual is the squared stencil error and converges
    // at FOURTH order (ratios near 16). This check therefore fails by
    // construction; it is kept faithful to the pinned window and the
    // measured ratios are printed for the record.
    let maxes = [
        circular_field_residual(1.0 / 64.0),
        circular_field_residual(1.0 / 128.0),
        circular_field_residual(1.0 / 256.0),
    ];
    let ratios = [maxes[0] / maxes[1], maxes[1] / maxes[2]];
    println!(
        "criterion 8b: measured residuals [{:.3e}, {:.3e}, {:.3e}] with Richardson ratios \
         [{:.2}, {:.2}] (fourth-order square structure; the pinned window is [3.5, 4.5])",
        maxes[0], maxes[1], maxes[2], ratios[0], ratios[1]
    );
    for r in ratios {
        assert!(
            (3.5..=4.5).contains(&r),
            "Richardson ratio {r:.3} outside the pinned [3.5, 4.5] window \
             (the residual is a perfect square of an O(h²) quantity; see test comment)"
        );
    }
    println!("criterion 8b PASS");
}

#[test]
fn criterion_09_bv_probe_verdicts() {
    // Singular density, orthogonal directors, non-bisector normal: the
    // sawtooth beats the (infinite) flat interface.
    let p = params(1.0, 1.0, 0.5, 0.0);
    let setup = ProbeSetup::new(q(0.0), q(PI / 2.0), UnitVector::from_angle(PI / 2.0));
    let families = default_families(&setup);
    let singular = probe(&setup, &families, &p, DensityKind::Singular, 1e-9).unwrap();
    assert_eq!(singular.flat_cost, JumpCost::Infinite);
    let winner = singular.beaten_by.as_deref().expect("flat must be beaten");
    assert!(winner.contains("zig-zag"), "beaten by {winner}");

    // Envelope density: no shipped competitor undercuts the flat interface
    // by more than 1e-9 anywhere on the 12-point (Δβ, γ-offset) grid.
    let mut worst_undercut = 0.0f64;
    for dbeta_deg in [30.0f64, 60.0, 90.0] {
        for offset_deg in [0.0f64, 22.5, 45.0, 67.5] {
            let beta_plus = dbeta_deg.to_radians();
            let gamma = beta_plus / 2.0 + offset_deg.to_radians();
            let setup = ProbeSetup::new(q(beta_plus), q(0.0), UnitVector::from_angle(gamma));
            let families = default_families(&setup);
            let report = probe(&setup, &families, &p, DensityKind::Envelope, 1e-9).unwrap();
            let flat = report.flat_cost.finite().unwrap();
            let min = report.family_minimum.finite().unwrap();
            worst_undercut = worst_undercut.max(flat - min);
            assert!(
                report.flat_optimal_within_family() || flat - min <= 1e-9,
                "Δβ={dbeta_deg}°, offset={offset_deg}°: undercut {:.3e} by {:?}",
                flat - min,
                report.beaten_by
            );
        }
    }
    println!(
        "criterion 9 PASS: singular flat beaten by {winner}; envelope flat undercut \
         by at most {worst_undercut:.3e} over the 12-point grid (tol 1e-9)"
    );
}
