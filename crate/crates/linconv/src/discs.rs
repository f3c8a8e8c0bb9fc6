//! Disc-pair hull containment and explicit counterexample discs.
//!
//! A C^{1,1} bounded domain is linearly convex iff it contains the convex
//! hull of any two complex affine discs in it with common center. This
//! module samples that containment over a (t, θ₁, θ₂) grid, builds the
//! explicit disc pair that witnesses failure for the local model domain
//! {ρ_c < 0}, searches for tangential chords through boundary points, and
//! runs the real-convexity midpoint-of-triangle analogue.

use crate::chunk::{run_chunked, Trial};
use crate::domains::{model_rho_c, BoundaryPoint, DomainError, DomainSpec};
use crate::geometry::{random_unit_direction, CDirection, CPoint, GeometryError};
use crate::report::{CriterionReport, Witness};
use crate::tolerances as tol;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiscsError {
    #[error("disc centers differ by {0:.3e}, must coincide")]
    CenterMismatch(f64),
    #[error("disc radius must be positive")]
    BadRadius,
    #[error("model constant c must be ≥ 1, got {0}")]
    BadModelConstant(f64),
    #[error("delta must be positive, got {0}")]
    BadDelta(f64),
    #[error("delta too large: discriminant 4c²δ² + 4δ − 1/c = {0:.6} is not negative")]
    DeltaTooLarge(f64),
    #[error("tolerance must be positive and finite")]
    BadTolerance,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Closed affine complex disc {center + λ·direction : |λ| ≤ radius}.
#[derive(Debug, Clone, Copy)]
pub struct Disc {
    pub center: CPoint,
    pub direction: CDirection,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: CPoint, direction: CDirection, radius: f64) -> Result<Self, DiscsError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DiscsError::BadRadius);
        }
        Ok(Disc { center, direction, radius })
    }

    /// Point at disc parameter λ (|λ| ≤ radius on the closed disc).
    #[inline]
    pub fn point_at(&self, lambda: Complex64) -> CPoint {
        self.center.add(&self.direction.vector().mul_complex(lambda))
    }

    /// Largest |coordinate distance| from the center.
    pub fn extent(&self) -> f64 {
        self.radius * self.direction.norm()
    }
}

/// Sampling resolution for the hull containment grid.
#[derive(Debug, Clone, Copy)]
pub struct HullGrid {
    /// Points on the convex-combination parameter t ∈ [0,1], endpoints included.
    pub t_steps: usize,
    /// Phase samples per disc.
    pub phase_steps: usize,
    /// 1 samples only |λ| = radius (enough for subharmonic restrictions);
    /// more adds interior rings |λ| = radius·k/rings.
    pub radial_rings: usize,
}

impl Default for HullGrid {
    fn default() -> Self {
        HullGrid { t_steps: 33, phase_steps: 64, radial_rings: 1 }
    }
}

impl HullGrid {
    pub fn dense(self, rings: usize) -> Self {
        HullGrid { radial_rings: rings.max(1), ..self }
    }

    fn samples(&self) -> u64 {
        (self.t_steps * self.phase_steps * self.phase_steps * self.radial_rings * self.radial_rings)
            as u64
    }
}

/// Convex-hull containment test for two discs with common center.
///
/// Samples z = center + t·λ₁X₁ + (1−t)·λ₂X₂ over the grid and fails when
/// any sample has ρ ≥ −tol; the witness is the worst (maximum-ρ) sample,
/// ties resolved by lexicographic grid index. Discs not strictly inside D
/// yield an inconclusive precondition report rather than a hull verdict.
pub fn disc_pair_hull_check(
    domain: &DomainSpec,
    d1: &Disc,
    d2: &Disc,
    grid: &HullGrid,
    tolerance: f64,
) -> Result<CriterionReport, DiscsError> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(DiscsError::BadTolerance);
    }
    let center_gap = d1.center.dist(&d2.center);
    if center_gap > 1e-12 * domain.scale() {
        return Err(DiscsError::CenterMismatch(center_gap));
    }
    domain.rho(&d1.center)?;

    // Precondition: both closed discs strictly inside D, checked on 256
    // boundary phases (the restriction of ρ to a disc is subharmonic for
    // every builtin family, so boundary phases dominate the interior).
    for (which, disc) in [(1, d1), (2, d2)] {
        if let Some((rho, lambda)) = disc_outside_sample(domain, disc, tolerance) {
            let witness = Witness::with_context(
                &disc.point_at(lambda),
                json!({
                    "precondition": format!("disc {which} is not strictly inside the domain"),
                    "rho": rho,
                    "lambda": [lambda.re, lambda.im],
                }),
            );
            return Ok(CriterionReport::inconclusive(
                "disc_pair_hull",
                -rho - tolerance,
                Some(witness),
                256,
            ));
        }
    }

    let (max_rho, witness_point) = hull_grid_max(domain, d1, d2, grid);
    let margin = -max_rho;
    let samples = grid.samples();
    if max_rho >= -tolerance {
        let witness = Witness::with_context(
            &witness_point,
            json!({ "rho": max_rho, "center": d1.center.to_vec() }),
        );
        Ok(CriterionReport::fail("disc_pair_hull", margin, witness, samples))
    } else {
        Ok(CriterionReport::pass("disc_pair_hull", margin, samples))
    }
}

fn disc_outside_sample(
    domain: &DomainSpec,
    disc: &Disc,
    tolerance: f64,
) -> Option<(f64, Complex64)> {
    // Center plus 256 boundary phases: subharmonicity of ρ on the disc
    // makes the boundary dominate for builtins; the center catches gross
    // violations of custom constraint combinations.
    let center_rho = domain.rho_unchecked(&disc.center);
    if center_rho >= -tolerance {
        return Some((center_rho, Complex64::new(0.0, 0.0)));
    }
    let n = 256;
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let lambda = Complex64::from_polar(disc.radius, theta);
        let rho = domain.rho_unchecked(&disc.point_at(lambda));
        if rho >= -tolerance {
            return Some((rho, lambda));
        }
    }
    None
}

fn hull_grid_max(
    domain: &DomainSpec,
    d1: &Disc,
    d2: &Disc,
    grid: &HullGrid,
) -> (f64, CPoint) {
    let nt = grid.t_steps.max(2);
    let np = grid.phase_steps.max(1);
    let nr = grid.radial_rings.max(1);
    let phase_step = 2.0 * std::f64::consts::PI / np as f64;

    // Parallel over t-slabs; fold in t order so the argmax is the first
    // lexicographic (t, ring₁, ring₂, θ₁, θ₂) index.
    let slabs: Vec<(f64, CPoint)> = (0..nt)
        .into_par_iter()
        .map(|it| {
            let t = it as f64 / (nt - 1) as f64;
            let mut best = (f64::NEG_INFINITY, d1.center);
            for r1 in 1..=nr {
                let rad1 = d1.radius * r1 as f64 / nr as f64;
                for r2 in 1..=nr {
                    let rad2 = d2.radius * r2 as f64 / nr as f64;
                    for k1 in 0..np {
                        let l1 = Complex64::from_polar(rad1, k1 as f64 * phase_step);
                        let leg1 = d1.center.add(&d1.direction.vector().mul_complex(l1 * t));
                        for k2 in 0..np {
                            let l2 = Complex64::from_polar(rad2, k2 as f64 * phase_step);
                            let z = leg1
                                .add(&d2.direction.vector().mul_complex(l2 * (1.0 - t)));
                            let rho = domain.rho_unchecked(&z);
                            if rho > best.0 {
                                best = (rho, z);
                            }
                        }
                    }
                }
            }
            best
        })
        .collect();

    let mut best = (f64::NEG_INFINITY, d1.center);
    for s in slabs {
        if s.0 > best.0 {
            best = s;
        }
    }
    best
}

/// The explicit disc pair that violates hull containment for the model
/// domain {ρ_c < 0}: common center (−δ, 0), unit disc parameter, directions
/// (δ, δ/μ) and (−δ, δ/μ) with μ = √(2cδ). Valid only while the chord
/// discriminant 4c²δ² + 4δ − 1/c stays negative.
pub fn construct_counterexample_discs(c: f64, delta: f64) -> Result<(Disc, Disc), DiscsError> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(DiscsError::BadModelConstant(c));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(DiscsError::BadDelta(delta));
    }
    let discriminant = chord_discriminant(c, delta);
    if discriminant >= 0.0 {
        return Err(DiscsError::DeltaTooLarge(discriminant));
    }
    let mu = (2.0 * c * delta).sqrt();
    let center = CPoint::new(&[-delta, 0.0, 0.0, 0.0])?;
    let dir1 = CDirection::new(&[delta, 0.0, delta / mu, 0.0])?;
    let dir2 = CDirection::new(&[-delta, 0.0, delta / mu, 0.0])?;
    Ok((Disc::new(center, dir1, 1.0)?, Disc::new(center, dir2, 1.0)?))
}

#[inline]
pub fn chord_discriminant(c: f64, delta: f64) -> f64 {
    4.0 * c * c * delta * delta + 4.0 * delta - 1.0 / c
}

/// Margins of the chord inequality for the counterexample construction.
#[derive(Debug, Clone, Copy)]
pub struct ChordInequality {
    /// max over sampled phases of ρ_c on ∂D₁, divided by δ; construction is
    /// valid only while this is negative.
    pub disc_margin: f64,
    /// 4c²δ² + 4δ − 1/c.
    pub discriminant: f64,
    /// max over x ∈ [−1,1] of −1 + 4cδ + 2(1−2cδ)x − (1+1/c)x².
    pub quadratic_max: f64,
}

/// Evaluate the chord inequality margins: ρ_c/δ sampled on ∂D₁, the
/// discriminant, and the maximum of the equivalent x-quadratic. Positive
/// values report an invalid construction; nothing errs.
pub fn chord_inequality_margin(
    c: f64,
    delta: f64,
    samples: usize,
) -> Result<ChordInequality, DiscsError> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(DiscsError::BadModelConstant(c));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(DiscsError::BadDelta(delta));
    }
    let mu = (2.0 * c * delta).sqrt();
    let center = CPoint::new(&[-delta, 0.0, 0.0, 0.0])?;
    let dir1 = CDirection::new(&[delta, 0.0, delta / mu, 0.0])?;
    let d1 = Disc::new(center, dir1, 1.0)?;
    let n = samples.max(4);
    let mut disc_margin = f64::NEG_INFINITY;
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let p = d1.point_at(Complex64::from_polar(1.0, theta));
        disc_margin = disc_margin.max(model_rho_c(c, &p) / delta);
    }

    // −1 + 4cδ + 2(1−2cδ)x − (1+1/c)x² on [−1, 1]; concave, so the max sits
    // at the clamped vertex.
    let a2 = 1.0 + 1.0 / c;
    let vertex = ((1.0 - 2.0 * c * delta) / a2).clamp(-1.0, 1.0);
    let q = |x: f64| -1.0 + 4.0 * c * delta + 2.0 * (1.0 - 2.0 * c * delta) * x - a2 * x * x;
    let quadratic_max = q(vertex).max(q(-1.0)).max(q(1.0));

    Ok(ChordInequality {
        disc_margin,
        discriminant: chord_discriminant(c, delta),
        quadratic_max,
    })
}

/// A chord through a boundary point inside the complex tangent line: the
/// boundary point is its midpoint and the punctured segment stays inside D
/// by at least `interior_margin` in ρ.
#[derive(Debug, Clone)]
pub struct ChordWitness {
    pub boundary_point: CPoint,
    pub endpoint_a: CPoint,
    pub endpoint_b: CPoint,
    pub interior_margin: f64,
    pub half_length: f64,
    pub phase: f64,
}

/// Search for a tangential chord [a,b] ⊂ T^ℂ(p) with midpoint p and
/// [a,b]∖{p} ⊂ D. Tries each half-length against `phases` rotations of the
/// tangent direction and returns the first witness found. Half-lengths
/// exceeding the bounding radius are skipped.
pub fn tangential_chord_search(
    domain: &DomainSpec,
    p: &BoundaryPoint,
    lengths: &[f64],
    phases: usize,
) -> Result<Option<ChordWitness>, DiscsError> {
    let basis = domain.complex_tangent_basis(p)?;
    let phases = phases.max(1);
    for &s in lengths {
        if !s.is_finite() || s <= 0.0 || s > domain.bounding_radius() {
            continue;
        }
        for k in 0..phases {
            let phi = std::f64::consts::PI * k as f64 / phases as f64;
            for v in &basis {
                let dir = v.normalized().rotated(phi);
                if let Some(margin) = chord_interior_margin(domain, &p.point, dir.vector(), s) {
                    return Ok(Some(ChordWitness {
                        boundary_point: p.point,
                        endpoint_a: p.point.add_scaled(s, dir.vector()),
                        endpoint_b: p.point.add_scaled(-s, dir.vector()),
                        interior_margin: margin,
                        half_length: s,
                        phase: phi,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// −max ρ over the punctured segment samples, when every sample is inside.
fn chord_interior_margin(
    domain: &DomainSpec,
    p: &CPoint,
    dir: &CPoint,
    half_length: f64,
) -> Option<f64> {
    let n = tol::SEGMENT_SAMPLES;
    let mut max_rho = f64::NEG_INFINITY;
    for k in 1..=n {
        let t = half_length * k as f64 / n as f64;
        for sign in [1.0, -1.0] {
            let rho = domain.rho_unchecked(&p.add_scaled(sign * t, dir));
            if rho >= 0.0 {
                return None;
            }
            max_rho = max_rho.max(rho);
        }
    }
    Some(-max_rho)
}

/// Default half-length ladder for the chord search.
pub fn default_chord_lengths(domain: &DomainSpec) -> Vec<f64> {
    [0.2, 0.1, 0.05, 0.02].iter().map(|s| s * domain.scale()).collect()
}

/// Real-convexity analogue: sample triangles (a, d, b) whose sides [a,d]
/// and [d,b] lie in D ∩ U, and require the midpoint of [a,b] to lie in D.
/// Trials that fail to produce an admissible triangle within the per-trial
/// attempt budget count as degenerate; total starvation is inconclusive.
pub fn midpoint_triangle_check(
    domain: &DomainSpec,
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> Result<CriterionReport, DiscsError> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(DiscsError::BadTolerance);
    }
    domain.rho(&domain.anchor())?;
    let dim = domain.dim();

    let outcome = run_chunked(trials, seed, false, |rng| {
        for _ in 0..200 {
            let Some((a, d, b)) = draw_triangle(domain, rng, dim) else { continue };
            let mid = a.midpoint(&b);
            let rho_mid = domain.rho_unchecked(&mid);
            return Trial::Margin(-rho_mid, (a, d, b, rho_mid));
        }
        Trial::Degenerate
    });

    if outcome.evaluated == 0 {
        return Ok(CriterionReport::inconclusive(
            "midpoint_triangle",
            0.0,
            None,
            0,
        ));
    }
    let (margin, (a, d, b, rho_mid)) = outcome.worst.expect("evaluated > 0");
    if margin <= tolerance {
        let witness = Witness::with_context(
            &a.midpoint(&b),
            json!({
                "a": a.to_vec(),
                "d": d.to_vec(),
                "b": b.to_vec(),
                "rho_midpoint": rho_mid,
            }),
        );
        Ok(CriterionReport::fail("midpoint_triangle", margin, witness, outcome.evaluated))
    } else {
        Ok(CriterionReport::pass("midpoint_triangle", margin, outcome.evaluated))
    }
}

/// Both sides in D ∩ U ⇒ Some(−ρ(midpoint of [a,b])); None when the sides
/// are not admissible.
pub fn evaluate_triangle(
    domain: &DomainSpec,
    a: &CPoint,
    d: &CPoint,
    b: &CPoint,
) -> Result<Option<f64>, DiscsError> {
    domain.rho(a)?;
    if segment_in_shell(domain, a, d) && segment_in_shell(domain, d, b) {
        Ok(Some(-domain.rho_unchecked(&a.midpoint(b))))
    } else {
        Ok(None)
    }
}

fn draw_triangle<R: Rng>(
    domain: &DomainSpec,
    rng: &mut R,
    dim: usize,
) -> Option<(CPoint, CPoint, CPoint)> {
    let dir_d = random_unit_direction(rng, dim);
    let d = shell_point_along(domain, &dir_d, rng)?;
    let dir_a = rotate_toward(&dir_d, rng, dim);
    let a = shell_point_along(domain, &dir_a, rng)?;
    let dir_b = rotate_toward(&dir_d, rng, dim);
    let b = shell_point_along(domain, &dir_b, rng)?;
    if segment_in_shell(domain, &a, &d) && segment_in_shell(domain, &d, &b) {
        Some((a, d, b))
    } else {
        None
    }
}

/// Boundary hit along `dir` from the anchor, pulled inward along the normal
/// to a uniform depth within the shell; rejected if it leaves D ∩ U.
fn shell_point_along<R: Rng>(
    domain: &DomainSpec,
    dir: &CDirection,
    rng: &mut R,
) -> Option<CPoint> {
    let anchor = domain.anchor();
    let t_max = domain.ray_span(&anchor);
    let t = domain.first_crossing(&anchor, dir.vector(), t_max, tol::RAY_SCAN_STEPS)?;
    let hit = anchor.add_scaled(t, dir.vector());
    let bp = domain.boundary_point_at(&hit).ok()?;
    let depth: f64 = rng.gen::<f64>() * 0.5 * domain.shell_width() * domain.scale();
    let q = bp.point.add_scaled(-depth, &bp.unit_normal);
    let rho = domain.rho_unchecked(&q);
    if rho < 0.0 && rho.abs() < domain.shell_width() * domain.scale() {
        Some(q)
    } else {
        None
    }
}

fn rotate_toward<R: Rng>(base: &CDirection, rng: &mut R, dim: usize) -> CDirection {
    let alpha: f64 = rng.gen::<f64>() * std::f64::consts::PI;
    // Orthonormalise a random direction against the base ray.
    for _ in 0..16 {
        let raw = random_unit_direction(rng, dim);
        let proj = raw.vector().dot(base.vector());
        let ortho = raw.vector().add_scaled(-proj, base.vector());
        let n = ortho.norm();
        if n > 1e-6 {
            let blended = base
                .vector()
                .scale(alpha.cos())
                .add(&ortho.scale(alpha.sin() / n));
            return CDirection::from_point(blended).expect("unit blend");
        }
    }
    *base
}

fn segment_in_shell(domain: &DomainSpec, from: &CPoint, to: &CPoint) -> bool {
    let shell = domain.shell_width() * domain.scale();
    let n = tol::SEGMENT_SAMPLES;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let p = from.add_scaled(t, &to.sub(from));
        let rho = domain.rho_unchecked(&p);
        if !(rho < 0.0 && rho.abs() < shell) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    fn pt(c: &[f64]) -> CPoint {
        CPoint::new(c).unwrap()
    }
    fn dir(c: &[f64]) -> CDirection {
        CDirection::new(c).unwrap()
    }

    #[test]
    fn counterexample_disc_geometry() {
        let (d1, d2) = construct_counterexample_discs(1.0, 0.05).unwrap();
        let mu = (2.0f64 * 0.05).sqrt();
        assert!((mu - 0.316_227_766_016_837_94).abs() < 1e-15);
        assert_eq!(d1.center.as_slice(), &[-0.05, 0.0, 0.0, 0.0]);
        assert_eq!(d2.center.as_slice(), d1.center.as_slice());
        // ζ = ±1 endpoints at (0, ±δ/μ) and their midpoint at the origin.
        let e1 = d1.point_at(Complex64::new(1.0, 0.0));
        let e2 = d2.point_at(Complex64::new(-1.0, 0.0));
        assert!(e1.sub(&pt(&[0.0, 0.0, 0.05 / mu, 0.0])).norm() < 1e-15);
        assert!(e2.sub(&pt(&[0.0, 0.0, -0.05 / mu, 0.0])).norm() < 1e-15);
        assert!(e1.midpoint(&e2).norm() < 1e-15);
    }

    #[test]
    fn counterexample_rejects_large_delta() {
        match construct_counterexample_discs(1.0, 0.5) {
            Err(DiscsError::DeltaTooLarge(disc)) => assert!((disc - 2.0).abs() < 1e-12),
            other => panic!("expected DeltaTooLarge, got {other:?}"),
        }
        assert!(construct_counterexample_discs(0.5, 0.01).is_err());
    }

    #[test]
    fn chord_margins_fixed_points() {
        let m = chord_inequality_margin(1.0, 0.05, 1024).unwrap();
        // Double-precision arithmetic on 4c²δ² + 4δ − 1/c.
        let expected = 4.0 * 0.05f64 * 0.05 + 4.0 * 0.05 - 1.0;
        assert_eq!(m.discriminant, expected);
        assert!((m.discriminant + 0.79).abs() < 1e-15);
        assert!(m.disc_margin < 0.0, "disc margin {}", m.disc_margin);
        assert!(m.quadratic_max < 0.0, "quadratic max {}", m.quadratic_max);

        let invalid = chord_inequality_margin(1.0, 0.5, 256).unwrap();
        assert!((invalid.discriminant - 2.0).abs() < 1e-12);
        assert!(invalid.quadratic_max > 0.0);
    }

    #[test]
    fn rho_at_top_endpoint_matches_closed_form() {
        // ρ_c at ζ = 1 on D₁ is −δ/(2c).
        let (d1, _) = construct_counterexample_discs(1.0, 0.05).unwrap();
        let top = d1.point_at(Complex64::new(1.0, 0.0));
        let rho = model_rho_c(1.0, &top);
        assert!((rho + 0.025).abs() < 1e-12, "{rho}");
    }

    #[test]
    fn disc_symmetry_under_zeta_negation() {
        let (d1, d2) = construct_counterexample_discs(1.25, 0.04).unwrap();
        for k in 0..64 {
            let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 64.0);
            let a = model_rho_c(1.25, &d2.point_at(zeta));
            let b = model_rho_c(1.25, &d1.point_at(-zeta));
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn disc_interior_negative_by_subharmonicity() {
        // Boundary phases are all negative, and so are interior rings.
        let (d1, d2) = construct_counterexample_discs(1.0, 0.05).unwrap();
        for disc in [&d1, &d2] {
            for ring in 1..=4 {
                let r = ring as f64 / 4.0;
                for k in 0..128 {
                    let zeta =
                        Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / 128.0);
                    assert!(model_rho_c(1.0, &disc.point_at(zeta)) < 0.0);
                }
            }
        }
    }

    #[test]
    fn hull_check_passes_on_ball_axis_discs() {
        let domain = DomainSpec::ball(1.0).unwrap();
        let d1 = Disc::new(CPoint::zero(2), dir(&[1.0, 0.0, 0.0, 0.0]), 0.9).unwrap();
        let d2 = Disc::new(CPoint::zero(2), dir(&[0.0, 0.0, 1.0, 0.0]), 0.9).unwrap();
        let r = disc_pair_hull_check(&domain, &d1, &d2, &HullGrid::default(), 1e-9).unwrap();
        assert!(r.passed(), "{r:?}");
        // Hull ⊂ {|z₁|+|z₂| ≤ 0.9}: worst ρ = 0.81 − 1.
        assert!((r.worst_margin - 0.19).abs() < 1e-12, "{}", r.worst_margin);
    }

    #[test]
    fn hull_check_fails_on_model_domain_with_constructed_discs() {
        let domain = DomainSpec::model_e(1.0, 0.5).unwrap();
        let (d1, d2) = construct_counterexample_discs(1.0, 0.05).unwrap();
        let r = disc_pair_hull_check(&domain, &d1, &d2, &HullGrid::default(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.expect("fail carries witness");
        let wp = CPoint::new(&w.point).unwrap();
        // Witness is the origin, where ρ_c = 0.
        assert!(wp.norm() < 1e-12, "witness {:?}", wp.as_slice());
        assert!(model_rho_c(1.0, &wp) >= -1e-12);
    }

    #[test]
    fn hull_check_is_symmetric_and_reflexive() {
        let domain = DomainSpec::ball(1.0).unwrap();
        let d1 = Disc::new(CPoint::zero(2), dir(&[0.8, 0.1, 0.2, 0.0]), 0.7).unwrap();
        let d2 = Disc::new(CPoint::zero(2), dir(&[0.0, 0.3, 0.9, 0.1]), 0.6).unwrap();
        let ab = disc_pair_hull_check(&domain, &d1, &d2, &HullGrid::default(), 1e-9).unwrap();
        let ba = disc_pair_hull_check(&domain, &d2, &d1, &HullGrid::default(), 1e-9).unwrap();
        assert_eq!(ab.verdict, ba.verdict);
        assert!((ab.worst_margin - ba.worst_margin).abs() < 1e-14);

        let selfpair = disc_pair_hull_check(&domain, &d1, &d1, &HullGrid::default(), 1e-9).unwrap();
        assert!(selfpair.passed());
    }

    #[test]
    fn hull_check_rejects_bad_inputs() {
        let domain = DomainSpec::ball(1.0).unwrap();
        let d1 = Disc::new(CPoint::zero(2), dir(&[1.0, 0.0, 0.0, 0.0]), 0.5).unwrap();
        let shifted =
            Disc::new(pt(&[0.1, 0.0, 0.0, 0.0]), dir(&[0.0, 0.0, 1.0, 0.0]), 0.5).unwrap();
        assert!(matches!(
            disc_pair_hull_check(&domain, &d1, &shifted, &HullGrid::default(), 1e-9),
            Err(DiscsError::CenterMismatch(_))
        ));

        // A disc poking outside the ball is a precondition violation, not a
        // hull failure.
        let big = Disc::new(CPoint::zero(2), dir(&[1.0, 0.0, 0.0, 0.0]), 1.5).unwrap();
        let r = disc_pair_hull_check(&domain, &big, &d1, &HullGrid::default(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn chord_search_finds_the_flat_direction_on_the_model_domain() {
        let domain = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = domain.boundary_point_at(&CPoint::zero(2)).unwrap();
        let w = tangential_chord_search(&domain, &p, &[0.1], 32)
            .unwrap()
            .expect("flat direction admits a chord");
        assert!(w.interior_margin > 0.0);
        assert!(w.boundary_point.norm() < 1e-15);
        // Midpoint invariant and tangency.
        let mid = w.endpoint_a.midpoint(&w.endpoint_b);
        assert!(mid.sub(&w.boundary_point).norm() < 1e-12);
        let hg = domain.holomorphic_gradient(&w.boundary_point).unwrap();
        let seg = w.endpoint_a.sub(&w.boundary_point);
        let pairing: Complex64 = (0..2).map(|j| hg[j] * seg.z(j)).sum();
        assert!(pairing.norm() < 1e-10 * seg.norm());
        // ρ_c(0, t) = −t² along the chord.
        let probe = pt(&[0.0, 0.0, 0.05, 0.0]);
        assert!((domain.rho(&probe).unwrap() + 0.0025).abs() < 1e-15);
    }

    #[test]
    fn chord_search_returns_none_on_the_ball() {
        let domain = DomainSpec::ball(1.0).unwrap();
        let p = domain.boundary_point_at(&pt(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        let lengths = default_chord_lengths(&domain);
        let w = tangential_chord_search(&domain, &p, &lengths, 32).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn chord_search_skips_oversized_half_lengths() {
        let domain = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = domain.boundary_point_at(&CPoint::zero(2)).unwrap();
        // 10 × bounding radius would leave the bounding box: skipped, and
        // with no other lengths the search is empty.
        let w = tangential_chord_search(&domain, &p, &[10.0 * domain.bounding_radius()], 8)
            .unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn triangle_check_passes_on_the_ball() {
        let domain = DomainSpec::ball(1.0).unwrap();
        let r = midpoint_triangle_check(&domain, 200, 5, domain.default_tol()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.samples_used > 0);
    }

    #[test]
    fn triangle_check_fails_on_the_crescent() {
        let domain = DomainSpec::custom(
            &["x1^2 + y1^2 - 1", "0.55 - (x1 - 0.6)^2 - y1^2"],
            &[-0.8, 0.0],
            1.0,
            0.3,
        )
        .unwrap();
        let r = midpoint_triangle_check(&domain, 500, 5, domain.default_tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail, "{r:?}");
        let w = r.witness.expect("fail carries witness");
        let wp = CPoint::new(&w.point).unwrap();
        assert!(domain.rho(&wp).unwrap() >= -domain.default_tol());
    }

    #[test]
    fn degenerate_triangle_midpoint_is_inside() {
        let domain = DomainSpec::ball(1.0).unwrap();
        let a = pt(&[0.9, 0.0, 0.0, 0.0]);
        let d = pt(&[0.85, 0.1, 0.0, 0.0]);
        let m = evaluate_triangle(&domain, &a, &d, &a).unwrap();
        assert!(m.expect("sides admissible") > 0.0);
    }

    #[test]
    fn triangle_check_starvation_is_inconclusive() {
        // A shell too thin for any segment to stay inside it starves the
        // sampler: no admissible triangle in the whole budget.
        let d = DomainSpec::from_json_str(
            r#"{"family":"ball","params":{"radius":1.0},"bounding_radius":1.5,
                "shell_width":1e-9,"anchor":[0,0,0,0]}"#,
        )
        .unwrap();
        let r = midpoint_triangle_check(&d, 10, 3, d.default_tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.samples_used, 0);
    }

    #[test]
    fn triangle_check_deterministic_across_threads() {
        let domain = DomainSpec::ball(1.0).unwrap();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| midpoint_triangle_check(&domain, 100, 7, 1e-9).unwrap())
        };
        assert_eq!(run(1), run(2));
    }
}
