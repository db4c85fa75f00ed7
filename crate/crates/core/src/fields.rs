//! Restricted configuration classes: polar-curve jump sets, the rectangle
//! and quarter-disk director fields, and piecewise-constant partitions.
//!
//! Jump sets are star-shaped polar curves `θ ↦ (ρ(θ)cosθ, ρ(θ)sinθ)`; the
//! radial profile is stored either as ρ samples or as the substituted
//! variable `u` with `ρ = e^{-u}`.

use crate::error::Error;
use crate::numdiff::derivative_second_order;
use crate::qtensor::{DirectorAngle, QTensor, SampledField, UnitVector};
use crate::Result;
use std::f64::consts::PI;

/// How the samples of a [`RadialProfile`] are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Samples are radii ρ > 0.
    Rho,
    /// Samples are u with ρ = e^{-u}.
    U,
}

/// Sampled scalar function on a uniform angular grid describing a polar
/// jump curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    theta_lo: f64,
    theta_hi: f64,
    values: Vec<f64>,
    repr: Representation,
}

impl RadialProfile {
    /// Profile of radius samples (all strictly positive).
    pub fn from_rho(theta_lo: f64, theta_hi: f64, values: Vec<f64>) -> Result<RadialProfile> {
        Self::validate(theta_lo, theta_hi, &values)?;
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::InvalidProfile(format!(
                "radius samples must be strictly positive, found {bad}"
            )));
        }
        Ok(RadialProfile {
            theta_lo,
            theta_hi,
            values,
            repr: Representation::Rho,
        })
    }

    /// Profile of u samples, ρ = e^{-u}.
    pub fn from_u(theta_lo: f64, theta_hi: f64, values: Vec<f64>) -> Result<RadialProfile> {
        Self::validate(theta_lo, theta_hi, &values)?;
        Ok(RadialProfile {
            theta_lo,
            theta_hi,
            values,
            repr: Representation::U,
        })
    }

    fn validate(theta_lo: f64, theta_hi: f64, values: &[f64]) -> Result<()> {
        if values.len() < 3 {
            return Err(Error::InvalidProfile(format!(
                "profile needs at least 3 samples, got {}",
                values.len()
            )));
        }
        if !(theta_hi > theta_lo) {
            return Err(Error::InvalidProfile(format!(
                "angular span [{theta_lo}, {theta_hi}] is empty"
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!("non-finite sample {bad}")));
        }
        Ok(())
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.theta_lo, self.theta_hi)
    }

    /// Uniform grid spacing.
    pub fn spacing(&self) -> f64 {
        (self.theta_hi - self.theta_lo) / (self.len() - 1) as f64
    }

    /// Grid angle of sample `j`.
    pub fn theta(&self, j: usize) -> f64 {
        self.theta_lo + j as f64 * self.spacing()
    }

    /// All grid angles.
    pub fn thetas(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.theta(j)).collect()
    }

    /// Raw samples in the stored representation.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Radius samples, converting from u if necessary.
    pub fn rho_samples(&self) -> Vec<f64> {
        match self.repr {
            Representation::Rho => self.values.clone(),
            Representation::U => self.values.iter().map(|u| (-u).exp()).collect(),
        }
    }

    /// u samples, converting from ρ if necessary.
    pub fn u_samples(&self) -> Vec<f64> {
        match self.repr {
            Representation::U => self.values.clone(),
            Representation::Rho => self.values.iter().map(|r| -r.ln()).collect(),
        }
    }

    /// Same profile in the ρ representation.
    pub fn to_rho(&self) -> RadialProfile {
        RadialProfile {
            theta_lo: self.theta_lo,
            theta_hi: self.theta_hi,
            values: self.rho_samples(),
            repr: Representation::Rho,
        }
    }

    /// Same profile in the u representation.
    pub fn to_u(&self) -> RadialProfile {
        RadialProfile {
            theta_lo: self.theta_lo,
            theta_hi: self.theta_hi,
            values: self.u_samples(),
            repr: Representation::U,
        }
    }

    /// Radius at an arbitrary angle by linear interpolation of the ρ samples.
    pub fn rho_at(&self, theta: f64) -> Result<f64> {
        let rhos = self.rho_samples();
        self.interp(&rhos, theta)
    }

    fn interp(&self, samples: &[f64], theta: f64) -> Result<f64> {
        let eps = 1e-12 * (1.0 + self.theta_hi.abs());
        if theta < self.theta_lo - eps || theta > self.theta_hi + eps {
            return Err(Error::InvalidProfile(format!(
                "angle {theta} outside span [{}, {}]",
                self.theta_lo, self.theta_hi
            )));
        }
        let h = self.spacing();
        let t = ((theta - self.theta_lo) / h).clamp(0.0, (self.len() - 1) as f64);
        let j = (t.floor() as usize).min(self.len() - 2);
        let frac = t - j as f64;
        Ok(samples[j] * (1.0 - frac) + samples[j + 1] * frac)
    }

    /// Stencil derivative of the ρ samples at the grid points.
    pub fn rho_derivative_samples(&self) -> Vec<f64> {
        derivative_second_order(&self.rho_samples(), self.spacing())
    }

    /// Mean radius, 1/(θ_hi − θ_lo) ∫ ρ dθ by the trapezoid rule.
    pub fn mean_rho(&self) -> f64 {
        let rhos = self.rho_samples();
        crate::numdiff::trapezoid(&rhos, self.spacing()) / (self.theta_hi - self.theta_lo)
    }
}

/// Point, tangent and normal data of a polar curve at one angle.
#[derive(Debug, Clone, Copy)]
pub struct CurveGeometry {
    /// Cartesian point (ρcosθ, ρsinθ).
    pub point: (f64, f64),
    /// Angle of the curve tangent.
    pub tangent_angle: f64,
    /// Angle γ of the curve normal (tangent + π/2).
    pub normal_angle: f64,
    /// Normal as a unit vector.
    pub normal: UnitVector,
    /// Arclength density √(ρ² + ρ′²).
    pub arclength_density: f64,
}

fn geometry_from_samples(theta: f64, rho: f64, drho: f64) -> CurveGeometry {
    let (s, c) = theta.sin_cos();
    let tangent = (drho * c - rho * s, drho * s + rho * c);
    let tangent_angle = tangent.1.atan2(tangent.0);
    let normal_angle = tangent_angle + PI / 2.0;
    CurveGeometry {
        point: (rho * c, rho * s),
        tangent_angle,
        normal_angle,
        normal: UnitVector::from_angle(normal_angle),
        arclength_density: rho.hypot(drho),
    }
}

/// Geometry of the profile's curve at angle `theta`.
///
/// ρ and ρ′ come from the profile samples; ρ′ uses the same second-order
/// stencil as the functionals, interpolated linearly off the grid.
pub fn curve_geometry(profile: &RadialProfile, theta: f64) -> Result<CurveGeometry> {
    let rho = profile.rho_at(theta)?;
    let drho = profile.interp(&profile.rho_derivative_samples(), theta)?;
    Ok(geometry_from_samples(theta, rho, drho))
}

/// Curve geometry at every grid point of the profile (the derivative
/// samples are computed once).
pub fn curve_geometry_all(profile: &RadialProfile) -> Vec<CurveGeometry> {
    let rhos = profile.rho_samples();
    let drhos = profile.rho_derivative_samples();
    (0..profile.len())
        .map(|j| geometry_from_samples(profile.theta(j), rhos[j], drhos[j]))
        .collect()
}

/// Tolerance below which a point counts as lying on the jump curve.
const ON_CURVE_TOL: f64 = 1e-12;

/// Rectangle configuration: domain (−L, L) × (0, H), jump curve pinned to
/// ρ(0) = ρ(π) = L, circular layers inside the curve (director β = θ) and
/// horizontal layers outside (β = π/2).
#[derive(Debug, Clone)]
pub struct RectangleConfig {
    half_width: f64,
    height: f64,
    profile: RadialProfile,
}

impl RectangleConfig {
    pub fn new(half_width: f64, height: f64, profile: RadialProfile) -> Result<RectangleConfig> {
        if !(half_width > 0.0) {
            return Err(Error::param("L", "half-width must be positive"));
        }
        if !(height > half_width / 2.0) {
            return Err(Error::param("H", "height must exceed L/2"));
        }
        let (lo, hi) = profile.span();
        if lo.abs() > 1e-12 || (hi - PI).abs() > 1e-12 {
            return Err(Error::InvalidProfile(format!(
                "rectangle profile must span [0, pi], got [{lo}, {hi}]"
            )));
        }
        let rhos = profile.rho_samples();
        let pin_tol = 1e-12 * half_width.max(1.0);
        if (rhos[0] - half_width).abs() > pin_tol
            || (rhos[rhos.len() - 1] - half_width).abs() > pin_tol
        {
            return Err(Error::InvalidProfile(
                "rectangle profile endpoints must be pinned to L".into(),
            ));
        }
        Ok(RectangleConfig {
            half_width,
            height,
            profile,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// Director angle at a point off the jump curve: β = θ inside
    /// (r < ρ(θ)), β = π/2 outside.
    pub fn director_at(&self, point: (f64, f64)) -> Result<DirectorAngle> {
        let r = point.0.hypot(point.1);
        let theta = point.1.atan2(point.0);
        let rho = self.profile.rho_at(theta)?;
        if (r - rho).abs() < ON_CURVE_TOL {
            return Err(Error::PointOnJumpCurve { r, theta });
        }
        Ok(if r < rho {
            DirectorAngle::new(theta)
        } else {
            DirectorAngle::new(PI / 2.0)
        })
    }

    /// One-sided director limits (inner, outer) at curve angle `theta`.
    pub fn director_limits(&self, theta: f64) -> (DirectorAngle, DirectorAngle) {
        (DirectorAngle::new(theta), DirectorAngle::new(PI / 2.0))
    }
}

/// Quarter-disk configuration: unit quarter disk, horizontal layers inside
/// the curve (director β = π/2) and circular layers outside (β = θ).
/// The admissibility bound ρ < 1 is recorded, not enforced.
#[derive(Debug, Clone)]
pub struct QuarterConfig {
    profile: RadialProfile,
}

impl QuarterConfig {
    pub fn new(profile: RadialProfile) -> Result<QuarterConfig> {
        let (lo, hi) = profile.span();
        if lo.abs() > 1e-12 || (hi - PI / 2.0).abs() > 1e-12 {
            return Err(Error::InvalidProfile(format!(
                "quarter profile must span [0, pi/2], got [{lo}, {hi}]"
            )));
        }
        Ok(QuarterConfig { profile })
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// Whether the jump curve stays inside the unit disk (ρ < 1 everywhere).
    pub fn is_admissible(&self) -> bool {
        self.profile.rho_samples().iter().all(|r| *r < 1.0)
    }

    /// Director angle at a point off the jump curve: β = π/2 inside
    /// (r < ρ(θ)), β = θ outside.
    pub fn director_at(&self, point: (f64, f64)) -> Result<DirectorAngle> {
        let r = point.0.hypot(point.1);
        let theta = point.1.atan2(point.0);
        let rho = self.profile.rho_at(theta)?;
        if (r - rho).abs() < ON_CURVE_TOL {
            return Err(Error::PointOnJumpCurve { r, theta });
        }
        Ok(if r < rho {
            DirectorAngle::new(PI / 2.0)
        } else {
            DirectorAngle::new(theta)
        })
    }

    /// One-sided director limits (inner, outer) at curve angle `theta`.
    pub fn director_limits(&self, theta: f64) -> (DirectorAngle, DirectorAngle) {
        (DirectorAngle::new(PI / 2.0), DirectorAngle::new(theta))
    }
}

/// The closed-form minimizing profile of the rectangle problem,
/// ρ(θ) = L/(1 + sinθ), sampled on m points of [0, π]. In Cartesian
/// coordinates this curve is the parabola x₂ = L/2 − x₁²/(2L).
pub fn parabola_profile(half_width: f64, m: usize) -> RadialProfile {
    let h = PI / (m - 1) as f64;
    let values = (0..m)
        .map(|j| {
            let theta = j as f64 * h;
            half_width / (1.0 + theta.sin())
        })
        .collect();
    RadialProfile::from_rho(0.0, PI, values).expect("closed-form profile is valid")
}

/// Samples a rectangle configuration on a lattice window, marking cells
/// crossed by the jump curve (sign change of r − ρ(θ) at the corners).
pub fn sample_rectangle_field(
    config: &RectangleConfig,
    origin: (f64, f64),
    spacing: f64,
    nx: usize,
    ny: usize,
) -> Result<SampledField> {
    let mut values = Vec::with_capacity(nx * ny);
    let mut side = vec![0i8; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let x = origin.0 + i as f64 * spacing;
            let y = origin.1 + j as f64 * spacing;
            let r = x.hypot(y);
            let theta = y.atan2(x);
            let rho = config.profile.rho_at(theta)?;
            side[j * nx + i] = if r < rho { -1 } else { 1 };
            let beta = if r < rho {
                DirectorAngle::new(theta)
            } else {
                DirectorAngle::new(PI / 2.0)
            };
            values.push(QTensor::from_angle(beta));
        }
    }
    let mut jump_mask = vec![false; (nx - 1) * (ny - 1)];
    for cj in 0..ny - 1 {
        for ci in 0..nx - 1 {
            let corners = [
                side[cj * nx + ci],
                side[cj * nx + ci + 1],
                side[(cj + 1) * nx + ci],
                side[(cj + 1) * nx + ci + 1],
            ];
            jump_mask[cj * (nx - 1) + ci] = corners.iter().any(|s| *s != corners[0]);
        }
    }
    SampledField::new(origin, spacing, nx, ny, values, jump_mask)
}

/// One straight piece of a piecewise-constant interface.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceSegment {
    pub start: (f64, f64),
    pub end: (f64, f64),
    pub q_plus: QTensor,
    pub q_minus: QTensor,
    pub normal: UnitVector,
}

impl InterfaceSegment {
    pub fn length(&self) -> f64 {
        (self.end.0 - self.start.0).hypot(self.end.1 - self.start.1)
    }

    /// Mismatch of the no-dislocation condition across this segment.
    pub fn bisector_defect(&self) -> f64 {
        (self.q_plus.normal_form(self.normal) - self.q_minus.normal_form(self.normal)).abs()
    }
}

/// One region of a piecewise-constant configuration.
#[derive(Debug, Clone)]
pub struct Region {
    pub polygon: Vec<(f64, f64)>,
    pub tensor: QTensor,
}

/// Piecewise-constant configuration: a polygonal partition of a domain
/// with one Q-tensor per region and explicit interface segments.
#[derive(Debug, Clone)]
pub struct PiecewiseConstantConfig {
    pub regions: Vec<Region>,
    pub interfaces: Vec<InterfaceSegment>,
    /// Whether every interface normal bisects its director pair (within 1e−9).
    pub all_bisecting: bool,
}

impl PiecewiseConstantConfig {
    pub fn new(regions: Vec<Region>, interfaces: Vec<InterfaceSegment>) -> Result<Self> {
        for seg in &interfaces {
            let t = (seg.end.0 - seg.start.0, seg.end.1 - seg.start.1);
            let len = seg.length();
            if !(len > 0.0) {
                return Err(Error::param("interfaces", "zero-length interface segment"));
            }
            let (nc, ns) = seg.normal.components();
            if (t.0 * nc + t.1 * ns).abs() / len > 1e-9 {
                return Err(Error::param(
                    "interfaces",
                    "interface normal is not orthogonal to its segment",
                ));
            }
        }
        let all_bisecting = interfaces.iter().all(|s| s.bisector_defect() <= 1e-9);
        Ok(PiecewiseConstantConfig {
            regions,
            interfaces,
            all_bisecting,
        })
    }

    /// Total interface length.
    pub fn interface_length(&self) -> f64 {
        self.interfaces.iter().map(|s| s.length()).sum()
    }
}

/// Rectangle of base `b` with a 45° sawtooth interface of `n_teeth` teeth
/// between the `q_minus` region (below) and the `q_plus` region (above).
/// `n_teeth = 0` builds the flat horizontal interface instead.
///
/// Every sawtooth segment has slope ±1, so the interface length is √2·b
/// for any number of teeth; for orthogonal director pairs the segment
/// normals are bisectors.
pub fn make_zigzag(
    b: f64,
    n_teeth: usize,
    q_plus: QTensor,
    q_minus: QTensor,
) -> Result<PiecewiseConstantConfig> {
    if !(b > 0.0) {
        return Err(Error::param("b", "base length must be positive"));
    }
    let half = b / 2.0;
    // Interface polyline along the base, teeth rising at 45 degrees.
    let polyline: Vec<(f64, f64)> = if n_teeth == 0 {
        vec![(0.0, 0.0), (b, 0.0)]
    } else {
        let w = b / (2.0 * n_teeth as f64);
        (0..=2 * n_teeth)
            .map(|i| {
                let x = i as f64 * w;
                let y = if i % 2 == 0 { 0.0 } else { w };
                (x, y)
            })
            .collect()
    };

    let mut interfaces = Vec::with_capacity(polyline.len() - 1);
    for pair in polyline.windows(2) {
        let (p0, p1) = (pair[0], pair[1]);
        let t = (p1.0 - p0.0, p1.1 - p0.1);
        // Normal pointing into the upper (q_plus) region.
        let mut normal = UnitVector::from_components(-t.1, t.0)?;
        if normal.components().1 < 0.0 {
            normal = normal.opposite();
        }
        interfaces.push(InterfaceSegment {
            start: p0,
            end: p1,
            q_plus,
            q_minus,
            normal,
        });
    }

    // Upper region: top edge plus the reversed polyline; lower: bottom edge
    // plus the polyline.
    let mut upper = vec![(0.0, half), (b, half)];
    upper.extend(polyline.iter().rev());
    let mut lower = vec![(0.0, -half), (b, -half)];
    lower.extend(polyline.iter().rev());
    let regions = vec![
        Region {
            polygon: upper,
            tensor: q_plus,
        },
        Region {
            polygon: lower,
            tensor: q_minus,
        },
    ];
    PiecewiseConstantConfig::new(regions, interfaces)
}

/// Two-parabola composite curve `x₁ = min(√(a² + 2a x₂), √(b² − 2b x₂))`
/// evaluated at height `x₂` (the second radicand is clamped at zero).
pub fn two_arc_x1(a: f64, b: f64, x2: f64) -> f64 {
    let first = (a * a + 2.0 * a * x2).max(0.0).sqrt();
    let second = (b * b - 2.0 * b * x2).max(0.0).sqrt();
    first.min(second)
}

/// The same composite curve in polar form, ρ = min(a/(1−sinθ), b/(1+sinθ)).
pub fn two_arc_rho(a: f64, b: f64, theta: f64) -> f64 {
    let s = theta.sin();
    let first = if 1.0 - s > 0.0 {
        a / (1.0 - s)
    } else {
        f64::INFINITY
    };
    first.min(b / (1.0 + s))
}

/// Result of fitting a quarter-disk profile by the two-parabola curve.
#[derive(Debug, Clone, Copy)]
pub struct ParabolicArcFit {
    /// First arc parameter, pinned to ρ(0).
    pub a: f64,
    /// Second arc parameter, pinned to 2ρ(π/2).
    pub b: f64,
    /// Largest |x₁_profile − x₁_arc| over the grid, at equal x₂.
    pub max_deviation: f64,
}

/// Fits the two-parabola curve to a profile on [0, π/2] by pinning the
/// parameters to the boundary values (a = ρ(0), b = 2ρ(π/2)) and reports
/// the largest horizontal deviation.
pub fn fit_parabolic_arcs(profile: &RadialProfile) -> Result<ParabolicArcFit> {
    let (lo, hi) = profile.span();
    if lo.abs() > 1e-12 || (hi - PI / 2.0).abs() > 1e-12 {
        return Err(Error::InvalidProfile(format!(
            "arc fit expects a profile on [0, pi/2], got [{lo}, {hi}]"
        )));
    }
    let rhos = profile.rho_samples();
    let a = rhos[0];
    let b = 2.0 * rhos[rhos.len() - 1];
    let mut max_deviation = 0.0f64;
    for (j, rho) in rhos.iter().enumerate() {
        let theta = profile.theta(j);
        let x1 = rho * theta.cos();
        let x2 = rho * theta.sin();
        max_deviation = max_deviation.max((x1 - two_arc_x1(a, b, x2)).abs());
    }
    Ok(ParabolicArcFit {
        a,
        b,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_profile(lo: f64, hi: f64, m: usize, rho: f64) -> RadialProfile {
        RadialProfile::from_rho(lo, hi, vec![rho; m]).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert!(RadialProfile::from_rho(0.0, PI, vec![1.0, 1.0]).is_err());
        assert!(RadialProfile::from_rho(0.0, PI, vec![1.0, -1.0, 1.0]).is_err());
        assert!(RadialProfile::from_rho(PI, 0.0, vec![1.0; 5]).is_err());
        let p = RadialProfile::from_u(0.0, 1.0, vec![0.0, 0.5, 1.0]).unwrap();
        let rhos = p.rho_samples();
        assert!((rhos[1] - (-0.5f64).exp()).abs() < 1e-15);
        let back = p.to_rho().to_u();
        for (u0, u1) in p.values().iter().zip(back.values()) {
            assert!((u0 - u1).abs() < 1e-15);
        }
    }

    #[test]
    fn director_branches_rectangle() {
        let config = RectangleConfig::new(1.0, 1.0, constant_profile(0.0, PI, 9, 1.0)).unwrap();
        let theta = PI / 4.0;
        let inside = (0.5 * theta.cos(), 0.5 * theta.sin());
        assert!((config.director_at(inside).unwrap().radians() - theta).abs() < 1e-15);
        let outside = (2.0 * theta.cos(), 2.0 * theta.sin());
        assert!((config.director_at(outside).unwrap().radians() - PI / 2.0).abs() < 1e-15);
        let on_curve = (theta.cos(), theta.sin());
        assert!(matches!(
            config.director_at(on_curve),
            Err(Error::PointOnJumpCurve { .. })
        ));
        let (inner, outer) = config.director_limits(theta);
        assert_eq!(inner.radians(), theta);
        assert_eq!(outer.radians(), PI / 2.0);
    }

    #[test]
    fn director_branches_quarter() {
        let config = QuarterConfig::new(constant_profile(0.0, PI / 2.0, 9, 0.5)).unwrap();
        let theta = PI / 3.0;
        let outside = (0.75 * theta.cos(), 0.75 * theta.sin());
        assert!((config.director_at(outside).unwrap().radians() - theta).abs() < 1e-15);
        let inside = (0.25 * theta.cos(), 0.25 * theta.sin());
        assert!((config.director_at(inside).unwrap().radians() - PI / 2.0).abs() < 1e-15);
        assert!(config.is_admissible());
        let big = QuarterConfig::new(constant_profile(0.0, PI / 2.0, 9, 1.5)).unwrap();
        assert!(!big.is_admissible());
    }

    #[test]
    fn curve_geometry_circle_arc() {
        let p = constant_profile(0.0, PI, 21, 0.7);
        for theta in [0.3, 1.0, 2.5] {
            let g = curve_geometry(&p, theta).unwrap();
            // Radial normal: γ ≡ θ (mod π); constant arclength density.
            let d = (g.normal_angle - theta).rem_euclid(PI);
            assert!(d.min(PI - d) < 1e-9, "normal angle {}", g.normal_angle);
            assert!((g.arclength_density - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_geometry_parabola_endpoints() {
        let l = 1.3;
        let p = parabola_profile(l, 4001);
        // θ = 0: ρ = L, ρ' = −L, normal at π/4 (mod π), density L√2.
        let g0 = curve_geometry(&p, 0.0).unwrap();
        let d0 = (g0.normal_angle - PI / 4.0).rem_euclid(PI);
        assert!(d0.min(PI - d0) < 1e-5);
        assert!((g0.arclength_density - l * std::f64::consts::SQRT_2).abs() < 1e-5);
        // θ = π/2: ρ = L/2, ρ' = 0, normal at π/2 (mod π), density L/2.
        let g1 = curve_geometry(&p, PI / 2.0).unwrap();
        let d1 = (g1.normal_angle - PI / 2.0).rem_euclid(PI);
        assert!(d1.min(PI - d1) < 1e-5);
        assert!((g1.arclength_density - l / 2.0).abs() < 1e-5);
    }

    #[test]
    fn parabola_profile_matches_cartesian_parabola() {
        let l = 1.0;
        let p = parabola_profile(l, 501);
        for j in 0..p.len() {
            let theta = p.theta(j);
            let rho = p.values()[j];
            let (x1, x2) = (rho * theta.cos(), rho * theta.sin());
            assert!((x2 - (l / 2.0 - x1 * x1 / (2.0 * l))).abs() < 1e-10);
        }
    }

    #[test]
    fn parabola_normals_bisect() {
        // Normal angle must match (π/2 + θ)/2 modulo π/2; the stencil error
        // in ρ' is O(h²), so a fine grid is needed for the 1e−8 tolerance.
        let p = parabola_profile(1.0, 50_001);
        for j in (0..p.len()).step_by(500) {
            let theta = p.theta(j);
            let g = curve_geometry(&p, theta).unwrap();
            let target = (PI / 2.0 + theta) / 2.0;
            let half_pi = PI / 2.0;
            let mut d = (g.normal_angle - target).rem_euclid(half_pi);
            if d > half_pi / 2.0 {
                d = half_pi - d;
            }
            assert!(d <= 1e-8, "theta {theta}: bisector defect {d:.3e}");
        }
    }

    #[test]
    fn rectangle_inner_field_satisfies_constraint() {
        // Inside the curve the rectangle field is the circular-layer field:
        // the residual vanishes to discretization order (the window keeps
        // clear of the circle center, where derivatives grow like 1/r³).
        let config = RectangleConfig::new(1.0, 1.0, parabola_profile(1.0, 801)).unwrap();
        let mut maxes = Vec::new();
        for scale in [1usize, 2] {
            let h = 1.0 / (128.0 * scale as f64);
            let n = 1 + 27 * scale;
            let field = sample_rectangle_field(&config, (0.2, 0.1), h, n, n).unwrap();
            let res = field.constraint_residual();
            assert_eq!(res.skipped_interior_count(), 0);
            maxes.push(res.max_abs().unwrap());
        }
        assert!(maxes[0] < 1e-4, "residual {:.3e}", maxes[0]);
        assert!(maxes[0] / maxes[1] > 8.0, "no refinement decay: {maxes:?}");
    }

    #[test]
    fn sampled_rectangle_marks_jump_cells() {
        let config = RectangleConfig::new(1.0, 1.0, constant_profile(0.0, PI, 33, 1.0)).unwrap();
        // Window straddling the circle r = 1.
        let field = sample_rectangle_field(&config, (0.5, 0.5), 1.0 / 64.0, 33, 33).unwrap();
        let res = field.constraint_residual();
        assert!(res.skipped_interior_count() > 0);
    }

    #[test]
    fn zigzag_interface_length_is_spacing_independent() {
        let qp = QTensor::from_angle(DirectorAngle::new(0.0));
        let qm = QTensor::from_angle(DirectorAngle::new(PI / 2.0));
        for n in [1usize, 4, 16, 64] {
            let z = make_zigzag(1.0, n, qp, qm).unwrap();
            assert!(
                (z.interface_length() - std::f64::consts::SQRT_2).abs() < 1e-12,
                "teeth {n}"
            );
            assert!(z.all_bisecting);
            assert_eq!(z.interfaces.len(), 2 * n);
        }
        let flat = make_zigzag(1.0, 0, qp, qm).unwrap();
        assert!((flat.interface_length() - 1.0).abs() < 1e-15);
        assert!((flat.interfaces[0].normal.angle() - PI / 2.0).abs() < 1e-12);
        assert!(!flat.all_bisecting);

        // Non-orthogonal pair: the 45° teeth no longer bisect.
        let skew = make_zigzag(1.0, 4, qp, QTensor::from_angle(DirectorAngle::new(1.0))).unwrap();
        assert!(!skew.all_bisecting);
    }

    #[test]
    fn arc_fit_self_consistency() {
        let (a, b) = (0.3, 0.5);
        let m = 201;
        let values: Vec<f64> = (0..m)
            .map(|j| two_arc_rho(a, b, (PI / 2.0) * j as f64 / (m - 1) as f64))
            .collect();
        let p = RadialProfile::from_rho(0.0, PI / 2.0, values).unwrap();
        let fit = fit_parabolic_arcs(&p).unwrap();
        assert!((fit.a - a).abs() < 1e-12);
        assert!((fit.b - b).abs() < 1e-12);
        assert!(
            fit.max_deviation <= 1e-10,
            "deviation {:.3e}",
            fit.max_deviation
        );
    }

    #[test]
    fn arc_fit_rejects_circle() {
        let p = constant_profile(0.0, PI / 2.0, 201, 0.5);
        let fit = fit_parabolic_arcs(&p).unwrap();
        assert_eq!(fit.a, 0.5);
        assert_eq!(fit.b, 1.0);
        assert!(
            fit.max_deviation > 1e-3,
            "a circle is not the two-arc curve"
        );
    }

    #[test]
    fn arc_boundary_identities() {
        let (a, b) = (0.3, 0.5);
        assert!((two_arc_x1(a, b, 0.0) - a).abs() < 1e-15);
        assert!(two_arc_x1(a, b, b / 2.0).abs() < 1e-15);
    }
}
