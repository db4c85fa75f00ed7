//! Jump energy densities for director walls.
//!
//! Two densities are provided for a jump `(Q⁺, Q⁻, ν)`:
//!
//! * the singular density `ζ_α`: `|Q⁺ − Q⁻|^α` when the no-dislocation
//!   condition `Q⁺ν·ν = Q⁻ν·ν` holds, infinite otherwise;
//! * its finite envelope `φ_α`:
//!   `|Q⁺ − Q⁻|^α (1 + √2 |Q⁺ν·ν − Q⁻ν·ν| / |Q⁺ − Q⁻|)^{1/2}`,
//!   with the value 0 when `Q⁺ = Q⁻`.
//!
//! In angular variables (directors at angles β₊, β₋, normal at angle γ)
//! the envelope reads
//!
//! ```text
//! φ_α = |sin(β₊ − β₋)|^α (1 + |sin(β₊ + β₋ − 2γ)|)^{1/2}
//!     = |sin(β₊ − β₋)|^α (|cos((β₊+β₋)/2 − γ)| + |sin((β₊+β₋)/2 − γ)|)
//! ```
//!
//! Both densities are minimized in ν exactly at the four directions that
//! bisect the angles between the two director lines.

use crate::error::Error;
use crate::qtensor::{QTensor, UnitVector};
use crate::Result;
use std::f64::consts::PI;

/// Two Q-tensors below threshold distance are treated as equal jumps.
const COINCIDENCE_TOL: f64 = 1e-14;

/// Jump exponent, restricted to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Alpha> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Alpha(alpha))
        } else {
            Err(Error::param(
                "alpha",
                format!("jump exponent must lie strictly in (0, 1), got {alpha}"),
            ))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Arguments of a jump energy density.
#[derive(Debug, Clone, Copy)]
pub struct JumpTriple {
    pub q_plus: QTensor,
    pub q_minus: QTensor,
    pub nu: UnitVector,
}

impl JumpTriple {
    pub fn new(q_plus: QTensor, q_minus: QTensor, nu: UnitVector) -> JumpTriple {
        JumpTriple {
            q_plus,
            q_minus,
            nu,
        }
    }
}

/// Selects which density a functional integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// The singular density ζ_α (infinite off the bisector constraint).
    Singular,
    /// The finite envelope φ_α.
    Envelope,
}

/// Extended-real value of a jump energy; `Infinite` is a value, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpCost {
    Finite(f64),
    Infinite,
}

impl JumpCost {
    pub fn is_finite(&self) -> bool {
        matches!(self, JumpCost::Finite(_))
    }

    /// Finite value, if any.
    pub fn finite(&self) -> Option<f64> {
        match self {
            JumpCost::Finite(v) => Some(*v),
            JumpCost::Infinite => None,
        }
    }

    /// Total order with `Infinite` above every finite value.
    pub fn le(&self, other: &JumpCost) -> bool {
        match (self, other) {
            (JumpCost::Finite(a), JumpCost::Finite(b)) => a <= b,
            (JumpCost::Finite(_), JumpCost::Infinite) => true,
            (JumpCost::Infinite, JumpCost::Infinite) => true,
            (JumpCost::Infinite, JumpCost::Finite(_)) => false,
        }
    }
}

impl std::fmt::Display for JumpCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JumpCost::Finite(v) => write!(f, "{v}"),
            JumpCost::Infinite => write!(f, "inf"),
        }
    }
}

/// Singular density ζ_α.
///
/// `tol ≥ 0` gives the numerical meaning of the no-dislocation equality:
/// the constraint is considered satisfied when
/// `|Q⁺ν·ν − Q⁻ν·ν| ≤ tol`.
pub fn zeta(t: &JumpTriple, a: Alpha, tol: f64) -> JumpCost {
    let d = t.q_plus.distance(&t.q_minus);
    if d < COINCIDENCE_TOL {
        return JumpCost::Finite(0.0);
    }
    let mismatch = (t.q_plus.normal_form(t.nu) - t.q_minus.normal_form(t.nu)).abs();
    if mismatch <= tol {
        JumpCost::Finite(d.powf(a.value()))
    } else {
        JumpCost::Infinite
    }
}

/// Envelope density φ_α in tensor variables.
///
/// The `Q⁺ = Q⁻` case (where the formula is 0/0) is an explicit zero
/// branch, selected when `|Q⁺ − Q⁻| < 1e−14`.
pub fn phi(t: &JumpTriple, a: Alpha) -> f64 {
    let d = t.q_plus.distance(&t.q_minus);
    if d < COINCIDENCE_TOL {
        return 0.0;
    }
    let mismatch = (t.q_plus.normal_form(t.nu) - t.q_minus.normal_form(t.nu)).abs();
    let anisotropy = 1.0 + std::f64::consts::SQRT_2 * mismatch / d;
    d.powf(a.value()) * anisotropy.sqrt()
}

/// Envelope density φ_α in angular variables (first printed form).
///
/// Angles are used as given; the expression is 2π-periodic in every slot,
/// so canonicalization is unnecessary and would only introduce spurious
/// discontinuities during optimization.
pub fn phi_angular(beta_plus: f64, beta_minus: f64, gamma: f64, a: Alpha) -> f64 {
    phi_angular_both(beta_plus, beta_minus, gamma, a).0
}

/// Both printed forms of the angular envelope:
/// `(1 + |sin(β₊+β₋−2γ)|)^{1/2}` and `|cos| + |sin|` of the half-angle.
/// They agree identically; returning both lets tests pin the identity.
pub fn phi_angular_both(beta_plus: f64, beta_minus: f64, gamma: f64, a: Alpha) -> (f64, f64) {
    let amplitude = (beta_plus - beta_minus).sin().abs().powf(a.value());
    let first = amplitude * (1.0 + (beta_plus + beta_minus - 2.0 * gamma).sin().abs()).sqrt();
    let half = 0.5 * (beta_plus + beta_minus) - gamma;
    let second = amplitude * (half.cos().abs() + half.sin().abs());
    (first, second)
}

/// The four unit normals bisecting the angles between the director lines
/// of `q_plus` and `q_minus`: `γ_k = (β₊ + β₋)/2 + kπ/2`, `k = 0..3`.
///
/// Errors when the tensors coincide: every direction then satisfies the
/// jump condition and the bisector set is not four points.
pub fn bisectors(q_plus: &QTensor, q_minus: &QTensor) -> Result<[UnitVector; 4]> {
    if q_plus.distance(q_minus) < COINCIDENCE_TOL {
        return Err(Error::DegenerateJump);
    }
    let beta_plus = q_plus.angle()?.radians();
    let beta_minus = q_minus.angle()?.radians();
    let base = 0.5 * (beta_plus + beta_minus);
    Ok([
        UnitVector::from_angle(base),
        UnitVector::from_angle(base + PI / 2.0),
        UnitVector::from_angle(base + PI),
        UnitVector::from_angle(base + 3.0 * PI / 2.0),
    ])
}
