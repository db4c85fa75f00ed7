//! Numerical probing of BV-ellipticity on the unit square.
//!
//! For a jump datum `(Q⁺, Q⁻, ν)` the flat interface through a unit square
//! C (sides parallel to ν and ν⊥, boundary data fixed on a collar) is
//! compared against parameterized piecewise-constant competitor families:
//! sawtooth interfaces at a given angle, sawtooths aligned with the
//! bisector directions, and laminates with one intermediate tensor. A
//! density is BV-elliptic when no such competitor beats the flat
//! interface; a finite family can refute that but never prove it, and the
//! verdict wording reflects the asymmetry.

use crate::error::Error;
use crate::fields::{InterfaceSegment, PiecewiseConstantConfig, Region};
use crate::functionals::{partition_energy, ModelParams};
use crate::jump_energy::{bisectors, DensityKind, JumpCost};
use crate::qtensor::{QTensor, UnitVector};
use crate::Result;

/// Fixed collar margin: the boundary-datum square C′ has side 1 + 2·0.1.
pub const COLLAR_MARGIN: f64 = 0.1;

/// Jump datum and probe geometry.
#[derive(Debug, Clone, Copy)]
pub struct ProbeSetup {
    pub q_plus: QTensor,
    pub q_minus: QTensor,
    pub nu: UnitVector,
}

impl ProbeSetup {
    pub fn new(q_plus: QTensor, q_minus: QTensor, nu: UnitVector) -> ProbeSetup {
        ProbeSetup {
            q_plus,
            q_minus,
            nu,
        }
    }

    /// Frame axes of the square: t̂ along the interface, ŝ along ν.
    fn frame(&self) -> (UnitVector, UnitVector) {
        // ν⊥ spans the flat interface; ν is the "upward" normal.
        (self.nu.perp(), self.nu)
    }

    fn to_global(self, t: f64, s: f64) -> (f64, f64) {
        let (that, shat) = self.frame();
        let (tc, ts) = that.components();
        let (sc, ss) = shat.components();
        (t * tc + s * sc, t * ts + s * ss)
    }
}

/// Piecewise-constant competitor families over the probe square.
#[derive(Debug, Clone)]
pub enum CompetitorFamily {
    /// The flat interface itself (the reference configuration).
    Flat,
    /// Sawtooth interface with the given tooth angle (radians, in (0, π/2))
    /// and tooth count.
    ZigZag { angle: f64, n_teeth: usize },
    /// Sawtooth whose two segment normals are the bisectors of the datum
    /// pair; the construction that realizes the envelope value under the
    /// singular density.
    BisectorZigZag { n_teeth: usize },
    /// Strip of one intermediate tensor between Q⁻ and Q⁺, of the given
    /// width (in units of the square side); each sub-interface is laid at
    /// its own pair's bisector orientations where representable, and the
    /// strip's cut edges on ∂C are billed as well.
    Laminate { intermediate: QTensor, width: f64 },
}

impl CompetitorFamily {
    fn label(&self) -> String {
        match self {
            CompetitorFamily::Flat => "flat".into(),
            CompetitorFamily::ZigZag { angle, n_teeth } => {
                format!("zig-zag(angle {:.1}°, {n_teeth} teeth)", angle.to_degrees())
            }
            CompetitorFamily::BisectorZigZag { n_teeth } => {
                format!("bisector zig-zag({n_teeth} teeth)")
            }
            CompetitorFamily::Laminate { width, .. } => format!("laminate(width {width})"),
        }
    }
}

/// Energy of one competitor, or the reason it is not representable.
#[derive(Debug, Clone)]
pub struct CompetitorResult {
    pub label: String,
    pub cost: Option<JumpCost>,
}

/// Outcome of a probe for one density kind.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub kind: DensityKind,
    pub flat_cost: JumpCost,
    pub competitors: Vec<CompetitorResult>,
    /// Cheapest competitor strictly below the flat interface (beyond the
    /// comparison tolerance), if any.
    pub beaten_by: Option<String>,
    /// Best competitor cost over the family (including the flat one).
    pub family_minimum: JumpCost,
}

impl ProbeReport {
    pub fn flat_optimal_within_family(&self) -> bool {
        self.beaten_by.is_none()
    }
}

/// Builds a sawtooth polyline over the base segment [−1/2, 1/2]×{0} in
/// frame coordinates, rising along `d1` and falling along `d2` per tooth.
/// Returns `None` when the teeth leave the unit square.
fn sawtooth_points(d1: (f64, f64), d2: (f64, f64), n_teeth: usize) -> Option<Vec<(f64, f64)>> {
    // Solve a·d1 + b·d2 = (1/n, 0) with a, b > 0.
    let w = 1.0 / n_teeth as f64;
    let det = d1.0 * d2.1 - d1.1 * d2.0;
    if det.abs() < 1e-12 {
        return None;
    }
    let a = (w * d2.1 - 0.0 * d2.0) / det;
    let b = (d1.0 * 0.0 - d1.1 * w) / det;
    if !(a > 1e-12 && b > 1e-12) {
        return None;
    }
    let apex_height = (a * d1.1).abs();
    if apex_height > 0.5 {
        return None;
    }
    let mut points = Vec::with_capacity(2 * n_teeth + 1);
    let mut t = -0.5;
    points.push((t, 0.0));
    for _ in 0..n_teeth {
        let apex_s = a * d1.1;
        t += a * d1.0;
        points.push((t, apex_s));
        t += b * d2.0;
        // Each tooth closes exactly on the base line.
        points.push((t, 0.0));
    }
    Some(points)
}

/// Interface segments (global coordinates) for a polyline separating
/// `upper` (larger ŝ side) from `lower`, with normals pointing to `upper`.
fn polyline_interfaces(
    setup: &ProbeSetup,
    points: &[(f64, f64)],
    upper: QTensor,
    lower: QTensor,
) -> Result<Vec<InterfaceSegment>> {
    let (_, shat) = setup.frame();
    let (sc, ss) = shat.components();
    let mut segments = Vec::with_capacity(points.len() - 1);
    for pair in points.windows(2) {
        let p0 = setup.to_global(pair[0].0, pair[0].1);
        let p1 = setup.to_global(pair[1].0, pair[1].1);
        let tangent = (p1.0 - p0.0, p1.1 - p0.1);
        let mut normal = UnitVector::from_components(-tangent.1, tangent.0)?;
        let (nc, ns) = normal.components();
        if nc * sc + ns * ss < 0.0 {
            normal = normal.opposite();
        }
        segments.push(InterfaceSegment {
            start: p0,
            end: p1,
            q_plus: upper,
            q_minus: lower,
            normal,
        });
    }
    Ok(segments)
}

fn square_region(setup: &ProbeSetup, s_lo: f64, s_hi: f64, tensor: QTensor) -> Region {
    let corners = [
        setup.to_global(-0.5, s_lo),
        setup.to_global(0.5, s_lo),
        setup.to_global(0.5, s_hi),
        setup.to_global(-0.5, s_hi),
    ];
    Region {
        polygon: corners.to_vec(),
        tensor,
    }
}

/// Directions (frame coordinates) of the two bisector normals of a pair,
/// or `None` when the pair is degenerate.
fn bisector_frame_normals(
    setup: &ProbeSetup,
    q_plus: &QTensor,
    q_minus: &QTensor,
) -> Option<[(f64, f64); 2]> {
    let bis = bisectors(q_plus, q_minus).ok()?;
    let (that, shat) = setup.frame();
    let (tc, ts) = that.components();
    let (sc, ss) = shat.components();
    let to_frame = |v: UnitVector| {
        let (x, y) = v.components();
        (x * tc + y * ts, x * sc + y * ss)
    };
    Some([to_frame(bis[0]), to_frame(bis[1])])
}

/// Builds the competitor configuration, or `None` when the family member
/// cannot be represented inside the square.
fn build_competitor(
    setup: &ProbeSetup,
    family: &CompetitorFamily,
) -> Result<Option<PiecewiseConstantConfig>> {
    let upper = setup.q_plus;
    let lower = setup.q_minus;
    match family {
        CompetitorFamily::Flat => {
            let segs = polyline_interfaces(setup, &[(-0.5, 0.0), (0.5, 0.0)], upper, lower)?;
            let regions = vec![
                square_region(setup, 0.0, 0.5, upper),
                square_region(setup, -0.5, 0.0, lower),
            ];
            Ok(Some(PiecewiseConstantConfig::new(regions, segs)?))
        }
        CompetitorFamily::ZigZag { angle, n_teeth } => {
            if !(*angle > 0.0 && *angle < std::f64::consts::FRAC_PI_2) || *n_teeth == 0 {
                return Ok(None);
            }
            let d1 = (angle.cos(), angle.sin());
            let d2 = (angle.cos(), -angle.sin());
            let Some(points) = sawtooth_points(d1, d2, *n_teeth) else {
                return Ok(None);
            };
            let segs = polyline_interfaces(setup, &points, upper, lower)?;
            let regions = vec![
                square_region(setup, 0.0, 0.5, upper),
                square_region(setup, -0.5, 0.0, lower),
            ];
            Ok(Some(PiecewiseConstantConfig::new(regions, segs)?))
        }
        CompetitorFamily::BisectorZigZag { n_teeth } => {
            if *n_teeth == 0 {
                return Ok(None);
            }
            let Some([n1, n2]) = bisector_frame_normals(setup, &upper, &lower) else {
                return Ok(None);
            };
            // Tooth edges run perpendicular to the bisector normals; pick
            // the orientation of each edge with a positive t̂ component.
            let mut d1 = (-n1.1, n1.0);
            if d1.0 < 0.0 {
                d1 = (-d1.0, -d1.1);
            }
            let mut d2 = (-n2.1, n2.0);
            if d2.0 < 0.0 {
                d2 = (-d2.0, -d2.1);
            }
            // Rise first: make d1 the ascending edge.
            if d1.1 < 0.0 {
                std::mem::swap(&mut d1, &mut d2);
            }
            let Some(points) = sawtooth_points(d1, d2, *n_teeth) else {
                return Ok(None);
            };
            let segs = polyline_interfaces(setup, &points, upper, lower)?;
            let regions = vec![
                square_region(setup, 0.0, 0.5, upper),
                square_region(setup, -0.5, 0.0, lower),
            ];
            Ok(Some(PiecewiseConstantConfig::new(regions, segs)?))
        }
        CompetitorFamily::Laminate {
            intermediate,
            width,
        } => {
            if !(*width > 0.0 && *width < 0.5) {
                return Ok(None);
            }
            let mid = *intermediate;
            let mut segments = Vec::new();
            // Sub-interface between mid (below) and q_plus (above) at
            // height s = width, at the sub-pair bisector orientation where
            // representable (teeth chosen to stay within the strip).
            for (s_level, hi, lo) in [(*width, upper, mid), (0.0, mid, lower)] {
                let shift = |pts: Vec<(f64, f64)>| -> Vec<(f64, f64)> {
                    pts.into_iter().map(|(t, s)| (t, s + s_level)).collect()
                };
                let built = bisector_frame_normals(setup, &hi, &lo).and_then(|[n1, n2]| {
                    let mut d1 = (-n1.1, n1.0);
                    if d1.0 < 0.0 {
                        d1 = (-d1.0, -d1.1);
                    }
                    let mut d2 = (-n2.1, n2.0);
                    if d2.0 < 0.0 {
                        d2 = (-d2.0, -d2.1);
                    }
                    if d1.1 < 0.0 {
                        std::mem::swap(&mut d1, &mut d2);
                    }
                    // Keep the teeth inside a margin of the strip width.
                    let slope = (d1.1 / d1.0).abs().max(1e-3);
                    let n_teeth = (2.0 * slope / width.min(0.25)).ceil() as usize;
                    sawtooth_points(d1, d2, n_teeth.max(2))
                });
                let points = match built {
                    Some(pts) => shift(pts),
                    // Degenerate sub-pair: a flat sub-interface.
                    None => vec![(-0.5, s_level), (0.5, s_level)],
                };
                segments.extend(polyline_interfaces(setup, &points, hi, lo)?);
            }
            // Cut edges of the strip on ∂C: the collar datum is q_plus for
            // s > 0, so both vertical edges jump between q_plus and mid.
            let (that, _) = setup.frame();
            for t_edge in [-0.5f64, 0.5] {
                let p0 = setup.to_global(t_edge, 0.0);
                let p1 = setup.to_global(t_edge, *width);
                let normal = if t_edge < 0.0 { that.opposite() } else { that };
                segments.push(InterfaceSegment {
                    start: p0,
                    end: p1,
                    q_plus: setup.q_plus,
                    q_minus: mid,
                    normal,
                });
            }
            let regions = vec![
                square_region(setup, *width, 0.5, upper),
                square_region(setup, 0.0, *width, mid),
                square_region(setup, -0.5, 0.0, lower),
            ];
            Ok(Some(PiecewiseConstantConfig::new(regions, segments)?))
        }
    }
}

/// Evaluates the flat interface against the competitor families.
///
/// `tol` is the bisector tolerance handed to the singular density. The
/// verdict compares against the flat cost with a 1e−12 slack so that exact
/// ties (the bisector sawtooth under the envelope) do not read as beatings.
pub fn probe(
    setup: &ProbeSetup,
    families: &[CompetitorFamily],
    params: &ModelParams,
    kind: DensityKind,
    tol: f64,
) -> Result<ProbeReport> {
    let flat_config = build_competitor(setup, &CompetitorFamily::Flat)?
        .ok_or_else(|| Error::param("setup", "flat interface must be representable"))?;
    let flat_cost = partition_energy(&flat_config, params, kind, tol);

    let mut competitors = Vec::with_capacity(families.len());
    let mut beaten_by: Option<(String, f64)> = None;
    let mut family_minimum = flat_cost;
    for family in families {
        let label = family.label();
        let cost = match build_competitor(setup, family)? {
            Some(config) => {
                let cost = partition_energy(&config, params, kind, tol);
                if let JumpCost::Finite(v) = cost {
                    let beats_flat = match flat_cost {
                        JumpCost::Infinite => true,
                        JumpCost::Finite(f) => v < f - 1e-12,
                    };
                    if beats_flat && beaten_by.as_ref().is_none_or(|(_, best)| v < *best) {
                        beaten_by = Some((label.clone(), v));
                    }
                }
                if cost.le(&family_minimum) {
                    family_minimum = cost;
                }
                Some(cost)
            }
            None => None,
        };
        competitors.push(CompetitorResult { label, cost });
    }

    Ok(ProbeReport {
        kind,
        flat_cost,
        competitors,
        beaten_by: beaten_by.map(|(label, _)| label),
        family_minimum,
    })
}

/// The competitor families shipped with the command-line probe: sawtooth
/// angles from 15° to 75°, tooth counts 1–8, the bisector sawtooth, and
/// laminates through the mid-angle tensor.
pub fn default_families(setup: &ProbeSetup) -> Vec<CompetitorFamily> {
    let mut families = Vec::new();
    for angle_deg in [15.0f64, 30.0, 45.0, 60.0, 75.0] {
        for n_teeth in 1..=8 {
            families.push(CompetitorFamily::ZigZag {
                angle: angle_deg.to_radians(),
                n_teeth,
            });
        }
    }
    for n_teeth in [1usize, 2, 4, 8] {
        families.push(CompetitorFamily::BisectorZigZag { n_teeth });
    }
    if let (Ok(bp), Ok(bm)) = (setup.q_plus.angle(), setup.q_minus.angle()) {
        let mid = crate::qtensor::DirectorAngle::new(0.5 * (bp.radians() + bm.radians()));
        let intermediate = QTensor::from_angle(mid);
        for width in [0.1, 0.2] {
            families.push(CompetitorFamily::Laminate {
                intermediate,
                width,
            });
        }
    }
    families
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jump_energy::Alpha;
    use crate::qtensor::DirectorAngle;
    use std::f64::consts::PI;

    fn setup(beta_plus: f64, beta_minus: f64, gamma: f64) -> ProbeSetup {
        ProbeSetup::new(
            QTensor::from_angle(DirectorAngle::new(beta_plus)),
            QTensor::from_angle(DirectorAngle::new(beta_minus)),
            UnitVector::from_angle(gamma),
        )
    }

    fn params(mu: f64, alpha: f64) -> ModelParams {
        ModelParams::new(1.0, mu, Alpha::new(alpha).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn singular_flat_is_beaten_at_non_bisector() {
        // Orthogonal directors, vertical ν: the flat interface violates the
        // bisector condition (infinite cost); the bisector sawtooth is
        // finite.
        let s = setup(0.0, PI / 2.0, PI / 2.0);
        let p = params(1.0, 0.5);
        let families = default_families(&s);
        let report = probe(&s, &families, &p, DensityKind::Singular, 1e-9).unwrap();
        assert_eq!(report.flat_cost, JumpCost::Infinite);
        let beaten = report.beaten_by.as_deref().expect("zig-zag must win");
        assert!(beaten.contains("zig-zag"), "beaten by {beaten}");
        // The winning cost is √2·|ΔQ|^α·μ for this datum.
        let min = report.family_minimum.finite().unwrap();
        assert!(
            (min - std::f64::consts::SQRT_2).abs() < 1e-9,
            "minimum {min}"
        );
    }

    #[test]
    fn envelope_flat_survives_shipped_families() {
        let s = setup(0.0, PI / 2.0, PI / 2.0);
        let p = params(1.0, 0.5);
        let families = default_families(&s);
        let report = probe(&s, &families, &p, DensityKind::Envelope, 1e-9).unwrap();
        assert!(
            report.flat_optimal_within_family(),
            "beaten by {:?}",
            report.beaten_by
        );
        // The bisector sawtooth ties the flat envelope value exactly.
        let flat = report.flat_cost.finite().unwrap();
        let min = report.family_minimum.finite().unwrap();
        assert!(flat - min <= 1e-12);
    }

    #[test]
    fn coinciding_tensors_cost_nothing() {
        let s = setup(0.7, 0.7, 1.1);
        let p = params(1.0, 0.5);
        let report = probe(
            &s,
            &[CompetitorFamily::ZigZag {
                angle: PI / 4.0,
                n_teeth: 3,
            }],
            &p,
            DensityKind::Envelope,
            1e-9,
        )
        .unwrap();
        assert_eq!(report.flat_cost, JumpCost::Finite(0.0));
        assert!(report.flat_optimal_within_family());
    }

    #[test]
    fn bisector_sawtooth_realizes_envelope_value() {
        // For any datum, the sawtooth at bisector orientations costs under
        // ζ exactly what the flat interface costs under φ.
        let p = params(1.3, 0.4);
        for (bp, bm, g) in [(0.2, 1.4, 0.9), (0.0, PI / 3.0, 1.2), (1.0, 2.3, 0.3)] {
            let s = setup(bp, bm, g);
            let zz = probe(
                &s,
                &[CompetitorFamily::BisectorZigZag { n_teeth: 4 }],
                &p,
                DensityKind::Singular,
                1e-9,
            )
            .unwrap();
            let flat_phi = probe(&s, &[], &p, DensityKind::Envelope, 1e-9).unwrap();
            let zz_cost = zz.competitors[0].cost.unwrap().finite().unwrap();
            let flat_cost = flat_phi.flat_cost.finite().unwrap();
            assert!(
                (zz_cost - flat_cost).abs() < 1e-9,
                "({bp}, {bm}, {g}): {zz_cost} vs {flat_cost}"
            );
        }
    }

    #[test]
    fn frame_indifference_of_competitor_energies() {
        let p = params(1.0, 0.5);
        let fam = [
            CompetitorFamily::ZigZag {
                angle: 0.6,
                n_teeth: 3,
            },
            CompetitorFamily::BisectorZigZag { n_teeth: 2 },
        ];
        let base = probe(&setup(0.2, 1.5, 0.8), &fam, &p, DensityKind::Envelope, 1e-9).unwrap();
        for delta in [0.4, 1.9, -0.7] {
            let rotated = probe(
                &setup(0.2 + delta, 1.5 + delta, 0.8 + delta),
                &fam,
                &p,
                DensityKind::Envelope,
                1e-9,
            )
            .unwrap();
            for (a, b) in base.competitors.iter().zip(&rotated.competitors) {
                let (va, vb) = (
                    a.cost.unwrap().finite().unwrap(),
                    b.cost.unwrap().finite().unwrap(),
                );
                assert!((va - vb).abs() < 1e-12, "{} vs {}", va, vb);
            }
        }
    }

    #[test]
    fn steep_teeth_are_rejected_as_unrepresentable() {
        let s = setup(0.0, PI / 2.0, PI / 2.0);
        let p = params(1.0, 0.5);
        let report = probe(
            &s,
            &[CompetitorFamily::ZigZag {
                angle: 75.0f64.to_radians(),
                n_teeth: 1,
            }],
            &p,
            DensityKind::Envelope,
            1e-9,
        )
        .unwrap();
        assert!(report.competitors[0].cost.is_none());
    }
}
