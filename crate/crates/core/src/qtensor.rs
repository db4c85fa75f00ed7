//! Algebra of normalized 2D uniaxial Q-tensors.
//!
//! A director line field `n = (cos β, sin β)` (identified with `−n`) is
//! encoded as the symmetric trace-free matrix
//!
//! ```text
//! Q = (1/√2) (n ⊗ n − I/2) = [[q11, q12], [q12, -q11]]
//! ```
//!
//! with `q11 = cos(2β)/(2√2)` and `q12 = sin(2β)/(2√2)`. Every such tensor
//! satisfies `q11² + q12² = 1/8` (Frobenius norm 1/2); this is the manifold
//! membership invariant enforced here. The module also provides the
//! constant-layer-thickness residual `A(Q)(∇Q, ∇Q)` evaluated by finite
//! differences on sampled fields.

use crate::error::Error;
use crate::Result;
use std::f64::consts::PI;

/// Squared component norm of a manifold member: q11² + q12² = 1/8.
pub const MANIFOLD_NORM_SQ: f64 = 0.125;

/// Membership tolerance for exact constructions (from an angle).
pub const CONSTRUCT_TOL: f64 = 1e-12;

/// Membership tolerance for parsed inputs (raw components).
pub const PARSE_TOL: f64 = 1e-9;

/// Angle of a director line, canonicalized to `[0, π)`.
///
/// Two angles differing by an integer multiple of π describe the same line
/// field (head-to-tail symmetry) and compare equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectorAngle {
    beta: f64,
}

impl DirectorAngle {
    /// Canonicalizes `beta` (radians) into `[0, π)`.
    pub fn new(beta: f64) -> Self {
        let mut b = beta.rem_euclid(PI);
        // rem_euclid can return exactly PI when beta is a tiny negative number.
        if b >= PI {
            b -= PI;
        }
        DirectorAngle { beta: b }
    }

    /// Canonical representative in `[0, π)`.
    pub fn radians(&self) -> f64 {
        self.beta
    }

    /// Director components `(cos β, sin β)` of the canonical representative.
    pub fn director(&self) -> (f64, f64) {
        (self.beta.cos(), self.beta.sin())
    }
}

/// Unit vector on S¹, stored by its Cartesian components so that the
/// symmetry operations (`opposite`, `perp`) are exact sign flips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    c: f64,
    s: f64,
}

impl UnitVector {
    /// Unit vector at angle `gamma` (radians).
    pub fn from_angle(gamma: f64) -> Self {
        UnitVector {
            c: gamma.cos(),
            s: gamma.sin(),
        }
    }

    /// Normalizes a nonzero vector.
    pub fn from_components(x: f64, y: f64) -> Result<UnitVector> {
        let norm = x.hypot(y);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::param(
                "nu",
                "cannot normalize a zero or non-finite vector",
            ));
        }
        Ok(UnitVector {
            c: x / norm,
            s: y / norm,
        })
    }

    /// Angle of the vector, reported in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        let mut g = self.s.atan2(self.c).rem_euclid(2.0 * PI);
        if g >= 2.0 * PI {
            g -= 2.0 * PI;
        }
        g
    }

    /// Cartesian components.
    pub fn components(&self) -> (f64, f64) {
        (self.c, self.s)
    }

    /// The vector rotated by +π/2.
    pub fn perp(&self) -> UnitVector {
        UnitVector {
            c: -self.s,
            s: self.c,
        }
    }

    /// The opposite vector.
    pub fn opposite(&self) -> UnitVector {
        UnitVector {
            c: -self.c,
            s: -self.s,
        }
    }
}

/// A point of the manifold of normalized 2D uniaxial Q-tensors.
///
/// Only the two independent components are stored; the full matrix
/// `[[q11, q12], [q12, -q11]]` is materialized on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QTensor {
    q11: f64,
    q12: f64,
}

/// Deviation of raw components from the manifold norm constraint.
fn manifold_defect(q11: f64, q12: f64) -> f64 {
    (q11 * q11 + q12 * q12 - MANIFOLD_NORM_SQ).abs()
}

impl QTensor {
    /// Tensor of the director line at angle `beta`.
    pub fn from_angle(beta: DirectorAngle) -> QTensor {
        let two_beta = 2.0 * beta.radians();
        let scale = 0.5 / std::f64::consts::SQRT_2;
        let q = QTensor {
            q11: two_beta.cos() * scale,
            q12: two_beta.sin() * scale,
        };
        debug_assert!(manifold_defect(q.q11, q.q12) <= CONSTRUCT_TOL);
        q
    }

    /// Validates raw components against the manifold invariant
    /// (tolerance [`PARSE_TOL`], the parsed-input tolerance).
    pub fn from_components(q11: f64, q12: f64) -> Result<QTensor> {
        let defect = manifold_defect(q11, q12);
        if !defect.is_finite() || defect > PARSE_TOL {
            return Err(Error::OffManifold {
                q11,
                q12,
                defect,
                tol: PARSE_TOL,
            });
        }
        Ok(QTensor { q11, q12 })
    }

    /// Wraps components without validating the manifold invariant.
    ///
    /// Only intended for constructing deliberately invalid inputs in tests.
    pub fn from_components_unchecked(q11: f64, q12: f64) -> QTensor {
        QTensor { q11, q12 }
    }

    pub fn q11(&self) -> f64 {
        self.q11
    }

    pub fn q12(&self) -> f64 {
        self.q12
    }

    /// Full 2×2 matrix `[[q11, q12], [q12, -q11]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.q11, self.q12], [self.q12, -self.q11]]
    }

    /// Angle of the director line, reported in `[0, π)`.
    ///
    /// Rejects tensors violating the manifold invariant beyond [`PARSE_TOL`].
    pub fn angle(&self) -> Result<DirectorAngle> {
        let defect = manifold_defect(self.q11, self.q12);
        if !defect.is_finite() || defect > PARSE_TOL {
            return Err(Error::OffManifold {
                q11: self.q11,
                q12: self.q12,
                defect,
                tol: PARSE_TOL,
            });
        }
        Ok(DirectorAngle::new(0.5 * self.q12.atan2(self.q11)))
    }

    /// Frobenius distance `|Q⁺ − Q⁻| = √(2 (Δq11² + Δq12²))`.
    ///
    /// For manifold members this equals `|sin(β₊ − β₋)|`.
    pub fn distance(&self, other: &QTensor) -> f64 {
        let d11 = self.q11 - other.q11;
        let d12 = self.q12 - other.q12;
        (2.0 * (d11 * d11 + d12 * d12)).sqrt()
    }

    /// Normal component `ν · (Q ν)` of the tensor in direction `ν`.
    ///
    /// Equals `(1/√2)(cos²(β − γ) − 1/2)` for the director angle β.
    pub fn normal_form(&self, nu: UnitVector) -> f64 {
        let (c, s) = nu.components();
        // ν·(Qν) contracts to q11 cos(2γ) + q12 sin(2γ).
        let c2 = c * c - s * s;
        let s2 = 2.0 * s * c;
        self.q11 * c2 + self.q12 * s2
    }
}

/// Result grid of [`SampledField::constraint_residual`].
///
/// Interior points whose stencil crosses a jump-masked cell (and all
/// boundary points, which lack a central stencil) are skipped and carry
/// `None`.
#[derive(Debug, Clone)]
pub struct ResidualGrid {
    nx: usize,
    ny: usize,
    values: Vec<Option<f64>>,
}

impl ResidualGrid {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Residual at lattice point `(i, j)`, if it was evaluated.
    pub fn at(&self, i: usize, j: usize) -> Option<f64> {
        self.values[j * self.nx + i]
    }

    /// Number of evaluated points.
    pub fn evaluated_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Number of interior points skipped because of the jump mask.
    pub fn skipped_interior_count(&self) -> usize {
        let mut n = 0;
        for j in 1..self.ny - 1 {
            for i in 1..self.nx - 1 {
                if self.values[j * self.nx + i].is_none() {
                    n += 1;
                }
            }
        }
        n
    }

    /// Largest absolute residual over evaluated points.
    pub fn max_abs(&self) -> Option<f64> {
        self.values
            .iter()
            .flatten()
            .map(|v| v.abs())
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// Q-tensor field sampled on a uniform rectangular lattice.
///
/// `jump_mask` marks lattice cells crossed by the jump set; difference
/// stencils touching a marked cell are not evaluated.
#[derive(Debug, Clone)]
pub struct SampledField {
    origin: (f64, f64),
    spacing: f64,
    nx: usize,
    ny: usize,
    values: Vec<QTensor>,
    jump_mask: Vec<bool>,
}

impl SampledField {
    /// Builds a field from explicit per-point values and a per-cell mask.
    ///
    /// `values` is row-major (`values[j * nx + i]`), `jump_mask` has
    /// `(nx−1)(ny−1)` entries in the same order over cells.
    pub fn new(
        origin: (f64, f64),
        spacing: f64,
        nx: usize,
        ny: usize,
        values: Vec<QTensor>,
        jump_mask: Vec<bool>,
    ) -> Result<SampledField> {
        if nx < 3 || ny < 3 {
            return Err(Error::param("grid", "lattice must be at least 3x3"));
        }
        if !(spacing > 0.0) {
            return Err(Error::param("spacing", "lattice spacing must be positive"));
        }
        if values.len() != nx * ny {
            return Err(Error::param("values", "value count does not match lattice"));
        }
        if jump_mask.len() != (nx - 1) * (ny - 1) {
            return Err(Error::param(
                "jump_mask",
                "cell count does not match lattice",
            ));
        }
        for q in &values {
            if manifold_defect(q.q11, q.q12) > PARSE_TOL {
                return Err(Error::OffManifold {
                    q11: q.q11,
                    q12: q.q12,
                    defect: manifold_defect(q.q11, q.q12),
                    tol: PARSE_TOL,
                });
            }
        }
        Ok(SampledField {
            origin,
            spacing,
            nx,
            ny,
            values,
            jump_mask,
        })
    }

    /// Samples a smooth director field (no jump cells).
    pub fn from_director_fn(
        origin: (f64, f64),
        spacing: f64,
        nx: usize,
        ny: usize,
        director: impl Fn(f64, f64) -> DirectorAngle,
    ) -> Result<SampledField> {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let x = origin.0 + i as f64 * spacing;
                let y = origin.1 + j as f64 * spacing;
                values.push(QTensor::from_angle(director(x, y)));
            }
        }
        SampledField::new(
            origin,
            spacing,
            nx,
            ny,
            values,
            vec![false; (nx - 1) * (ny - 1)],
        )
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn value(&self, i: usize, j: usize) -> &QTensor {
        &self.values[j * self.nx + i]
    }

    fn cell_masked(&self, ci: usize, cj: usize) -> bool {
        self.jump_mask[cj * (self.nx - 1) + ci]
    }

    /// True when the central 5-point stencil at interior point `(i, j)`
    /// touches a jump-masked cell. The stencil arms lie in the closure of
    /// the four cells incident to the point.
    fn stencil_crosses_jump(&self, i: usize, j: usize) -> bool {
        self.cell_masked(i - 1, j - 1)
            || self.cell_masked(i, j - 1)
            || self.cell_masked(i - 1, j)
            || self.cell_masked(i, j)
    }

    /// Constant-layer-thickness residual `A(Q)(∇Q, ∇Q)` per lattice point,
    /// with `A(Q)(∇Q, ∇Q) = (√2 Q_hk + ½ δ_hk) Q_ij,h Q_ij,k`.
    ///
    /// Gradients are second-order central differences; interior points whose
    /// stencil crosses a jump-masked cell are skipped. For layer fields that
    /// are locally parallel the residual vanishes at rate O(h²).
    pub fn constraint_residual(&self) -> ResidualGrid {
        let mut values = vec![None; self.nx * self.ny];
        let inv2h = 1.0 / (2.0 * self.spacing);
        for j in 1..self.ny - 1 {
            for i in 1..self.nx - 1 {
                if self.stencil_crosses_jump(i, j) {
                    continue;
                }
                let q = self.value(i, j);
                let xp = self.value(i + 1, j);
                let xm = self.value(i - 1, j);
                let yp = self.value(i, j + 1);
                let ym = self.value(i, j - 1);
                let gx11 = (xp.q11 - xm.q11) * inv2h;
                let gx12 = (xp.q12 - xm.q12) * inv2h;
                let gy11 = (yp.q11 - ym.q11) * inv2h;
                let gy12 = (yp.q12 - ym.q12) * inv2h;
                // S_hk = Q_ij,h Q_ij,k summed over the full matrix: the
                // diagonal pair contributes q11-derivatives twice, the
                // off-diagonal pair q12-derivatives twice.
                let s11 = 2.0 * (gx11 * gx11 + gx12 * gx12);
                let s22 = 2.0 * (gy11 * gy11 + gy12 * gy12);
                let s12 = 2.0 * (gx11 * gy11 + gx12 * gy12);
                let sqrt2 = std::f64::consts::SQRT_2;
                let a = (sqrt2 * q.q11 + 0.5) * s11
                    + 2.0 * sqrt2 * q.q12 * s12
                    + (-sqrt2 * q.q11 + 0.5) * s22;
                values[j * self.nx + i] = Some(a);
            }
        }
        ResidualGrid {
            nx: self.nx,
            ny: self.ny,
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_2SQRT2: f64 = 0.35355339059327373; // 1/(2√2)

    #[test]
    fn tensor_from_axis_aligned_angles() {
        let q = QTensor::from_angle(DirectorAngle::new(0.0));
        assert!((q.q11() - INV_2SQRT2).abs() < 1e-15);
        assert!(q.q12().abs() < 1e-15);

        // n and -n give the same tensor.
        let q_pi = QTensor::from_angle(DirectorAngle::new(PI));
        assert_eq!(q, q_pi);

        let q45 = QTensor::from_angle(DirectorAngle::new(PI / 4.0));
        assert!(q45.q11().abs() < 1e-15);
        assert!((q45.q12() - INV_2SQRT2).abs() < 1e-15);
    }

    #[test]
    fn angle_round_trip_and_rejection() {
        let q = QTensor::from_components(INV_2SQRT2, 0.0).unwrap();
        assert_eq!(q.angle().unwrap().radians(), 0.0);

        let q = QTensor::from_components(0.0, INV_2SQRT2).unwrap();
        assert!((q.angle().unwrap().radians() - PI / 4.0).abs() < 1e-15);

        // 0.3² + 0.3² = 0.18 ≠ 0.125: rejected at parse tolerance.
        assert!(QTensor::from_components(0.3, 0.3).is_err());
        let bad = QTensor::from_components_unchecked(0.3, 0.3);
        assert!(bad.angle().is_err());
    }

    #[test]
    fn angle_round_trip_over_random_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(314_159);
        for _ in 0..10_000 {
            let beta: f64 = rng.random_range(-20.0..20.0);
            let q = QTensor::from_angle(DirectorAngle::new(beta));
            let back = q.angle().unwrap().radians();
            let mut d = (back - beta).rem_euclid(PI);
            if d > PI / 2.0 {
                d = PI - d;
            }
            assert!(d < 1e-12, "beta {beta}: round trip {back}");
        }
    }

    #[test]
    fn distance_matches_sine_identity() {
        let q0 = QTensor::from_angle(DirectorAngle::new(0.0));
        let q90 = QTensor::from_angle(DirectorAngle::new(PI / 2.0));
        let q60 = QTensor::from_angle(DirectorAngle::new(PI / 3.0));
        assert_eq!(q0.distance(&q0), 0.0);
        assert!((q0.distance(&q90) - 1.0).abs() < 1e-14);
        assert!((q0.distance(&q60) - 0.75f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn normal_form_examples() {
        let q0 = QTensor::from_angle(DirectorAngle::new(0.0));
        let e1 = UnitVector::from_angle(0.0);
        assert!((q0.normal_form(e1) - INV_2SQRT2).abs() < 1e-15);

        let diag = UnitVector::from_angle(PI / 4.0);
        assert!(q0.normal_form(diag).abs() < 1e-15);

        // ν parallel to the director always yields 1/(2√2).
        for beta in [0.3, 1.1, 2.9] {
            let q = QTensor::from_angle(DirectorAngle::new(beta));
            let nu = UnitVector::from_angle(beta);
            assert!((q.normal_form(nu) - INV_2SQRT2).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_field_has_zero_residual() {
        let field =
            SampledField::from_director_fn((0.0, 0.0), 0.1, 9, 9, |_, _| DirectorAngle::new(0.7))
                .unwrap();
        let res = field.constraint_residual();
        assert_eq!(res.evaluated_count(), 49);
        assert_eq!(res.max_abs().unwrap(), 0.0);
    }

    #[test]
    fn horizontal_layer_field_has_zero_residual() {
        let field = SampledField::from_director_fn((0.0, 0.0), 0.05, 11, 11, |_, _| {
            DirectorAngle::new(PI / 2.0)
        })
        .unwrap();
        assert_eq!(field.constraint_residual().max_abs().unwrap(), 0.0);
    }

    #[test]
    fn circular_layer_residual_is_small() {
        // n = (x/r, y/r): concentric circular layers, curl-free director.
        let h = 1.0 / 256.0;
        let n = (0.5 / h) as usize + 1;
        let field = SampledField::from_director_fn((0.5, 0.5), h, n, n, |x, y| {
            DirectorAngle::new(y.atan2(x))
        })
        .unwrap();
        let max = field.constraint_residual().max_abs().unwrap();
        assert!(max < 1e-3, "max residual {max:.3e}");
    }

    #[test]
    fn jump_mask_skips_stencils() {
        let nx = 5;
        let ny = 5;
        let mut mask = vec![false; (nx - 1) * (ny - 1)];
        mask[(nx - 1) + 1] = true; // cell (1,1)
        let values = vec![QTensor::from_angle(DirectorAngle::new(0.2)); nx * ny];
        let field = SampledField::new((0.0, 0.0), 0.1, nx, ny, values, mask).unwrap();
        let res = field.constraint_residual();
        // Cell (1,1) is incident to interior points (1,1), (2,1), (1,2), (2,2).
        assert_eq!(res.skipped_interior_count(), 4);
        assert!(res.at(1, 1).is_none());
        assert!(res.at(2, 2).is_none());
        assert!(res.at(3, 3).is_some());
    }

    #[test]
    fn residual_convergence_under_refinement() {
        // The coefficient matrix √2·Q_hk + ½δ_hk equals n_h n_k exactly, so
        // the residual is the perfect square |n·∇̃Q|². For concentric layers
        // the exact radial derivative of Q vanishes and only the squared
        // O(h²) stencil error remains: the residual converges at fourth
        // order, with Richardson ratios near 16.
        let mut maxes = Vec::new();
        for shift in [0, 1, 2] {
            let h = 1.0 / (64.0 * (1 << shift) as f64);
            let n = (0.5 / h) as usize + 1;
            let field = SampledField::from_director_fn((0.5, 0.5), h, n, n, |x, y| {
                DirectorAngle::new(y.atan2(x))
            })
            .unwrap();
            maxes.push(field.constraint_residual().max_abs().unwrap());
        }
        for w in maxes.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio >= 3.5, "slower than second order: ratio {ratio}");
            assert!(
                (13.0..=17.5).contains(&ratio),
                "Richardson ratio {ratio} departs from the fourth-order square structure"
            );
        }
    }
}
