//! Directional boundary distance and the Minkowski gauge of the indicatrix.
//!
//! For z ∈ D and a complex direction X, d_D(z,X) is the largest r such that
//! the affine disc z + λX, |λ| < r, stays inside D. Its reciprocal is the
//! Minkowski gauge of the maximal circular subset D_z of D around z; D is
//! (weakly) linearly convex exactly when that gauge is convex, i.e.
//! subadditive, at every base point. The checks here sample that
//! subadditivity directly and through midpoints of indicatrix points.

use crate::chunk::{run_chunked, Trial};
use crate::domains::{DomainError, DomainSpec};
use crate::geometry::{random_unit_direction, CDirection, CPoint};
use crate::report::{CriterionReport, Witness};
use crate::tolerances as tol;
use rand::Rng;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DirectionalError {
    #[error("base point is not strictly inside the domain (ρ = {0:.3e})")]
    NotInterior(f64),
    #[error("tolerance must be positive and finite")]
    BadTolerance,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// One gauge evaluation: base point, direction, exit distance and gauge.
/// `distance` is `f64::INFINITY` when the disc never leaves the domain, and
/// then (and only then) the gauge is 0.
#[derive(Debug, Clone, Copy)]
pub struct GaugeSample {
    pub base: CPoint,
    pub direction: CDirection,
    pub distance: f64,
    pub gauge: f64,
}

impl GaugeSample {
    pub fn compute(
        domain: &DomainSpec,
        z: &CPoint,
        x: &CDirection,
    ) -> Result<Self, DirectionalError> {
        let distance = directional_distance(domain, z, x)?;
        let gauge = if distance.is_infinite() { 0.0 } else { 1.0 / distance };
        Ok(GaugeSample { base: *z, direction: *x, distance, gauge })
    }
}

fn require_interior(domain: &DomainSpec, z: &CPoint) -> Result<(), DirectionalError> {
    let r = domain.rho(z)?;
    if r >= 0.0 {
        return Err(DirectionalError::NotInterior(r));
    }
    Ok(())
}

/// Smallest t > 0 with z + t·e^{iθ}X ∈ ∂D: coarse scan to the bounding
/// span, then bisection. `f64::INFINITY` when the ray never exits.
pub fn ray_exit_distance(
    domain: &DomainSpec,
    z: &CPoint,
    x: &CDirection,
    theta: f64,
) -> Result<f64, DirectionalError> {
    require_interior(domain, z)?;
    if z.dim() != x.dim() {
        return Err(DomainError::WrongDimension { expected: z.dim(), got: x.dim() }.into());
    }
    Ok(ray_exit_inner(domain, z, &x.rotated(theta)))
}

fn ray_exit_inner(domain: &DomainSpec, z: &CPoint, dir: &CDirection) -> f64 {
    let t_max = domain.ray_span(z) / dir.norm();
    domain
        .first_crossing(z, dir.vector(), t_max, tol::RAY_SCAN_STEPS)
        .unwrap_or(f64::INFINITY)
}

/// d_D(z, X): minimum of the per-phase exit distance over a 128-point
/// θ-grid, refined by golden-section search in the three best grid cells.
pub fn directional_distance(
    domain: &DomainSpec,
    z: &CPoint,
    x: &CDirection,
) -> Result<f64, DirectionalError> {
    Ok(directional_distance_with_phase(domain, z, x)?.0)
}

/// Same, also returning the minimising phase θ*.
pub fn directional_distance_with_phase(
    domain: &DomainSpec,
    z: &CPoint,
    x: &CDirection,
) -> Result<(f64, f64), DirectionalError> {
    require_interior(domain, z)?;
    if z.dim() != x.dim() {
        return Err(DomainError::WrongDimension { expected: z.dim(), got: x.dim() }.into());
    }
    Ok(distance_inner(domain, z, x))
}

fn distance_inner(domain: &DomainSpec, z: &CPoint, x: &CDirection) -> (f64, f64) {
    const N: usize = tol::THETA_GRID;
    let step = 2.0 * std::f64::consts::PI / N as f64;
    let mut vals = [f64::INFINITY; N];
    for (k, v) in vals.iter_mut().enumerate() {
        *v = ray_exit_inner(domain, z, &x.rotated(k as f64 * step));
    }
    // Indices of the three smallest grid values.
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|a, b| vals[*a].partial_cmp(&vals[*b]).unwrap());
    let (mut best, mut best_theta) = (vals[order[0]], order[0] as f64 * step);
    if best.is_infinite() {
        return (f64::INFINITY, best_theta);
    }
    for &k in order.iter().take(3) {
        if vals[k].is_infinite() {
            continue;
        }
        let center = k as f64 * step;
        let (t, v) = golden_min(
            |theta| ray_exit_inner(domain, z, &x.rotated(theta)),
            center - step,
            center + step,
            tol::GOLDEN_ITERS,
        );
        if v < best {
            best = v;
            best_theta = t;
        }
    }
    (best, best_theta)
}

/// Golden-section minimisation; returns (argmin, min) over all evaluations.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..iters {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        let (xc, fc) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
        if fc < best.1 {
            best = (xc, fc);
        }
    }
    best
}

/// Minkowski gauge of D_z − z: 1/d_D(z,X), or 0 for an infinite distance.
pub fn minkowski_gauge(
    domain: &DomainSpec,
    z: &CPoint,
    x: &CDirection,
) -> Result<f64, DirectionalError> {
    let d = directional_distance(domain, z, x)?;
    Ok(if d.is_infinite() { 0.0 } else { 1.0 / d })
}

fn gauge_inner(domain: &DomainSpec, z: &CPoint, v: &CPoint) -> f64 {
    match CDirection::from_point(*v) {
        Ok(dir) => {
            let d = distance_inner(domain, z, &dir).0;
            if d.is_infinite() {
                0.0
            } else {
                1.0 / d
            }
        }
        // Gauge of the zero vector.
        Err(_) => 0.0,
    }
}

fn check_args(domain: &DomainSpec, z: &CPoint, tolerance: f64) -> Result<(), DirectionalError> {
    require_interior(domain, z)?;
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(DirectionalError::BadTolerance);
    }
    Ok(())
}

type DirPair = (CDirection, CDirection);

/// Sampled subadditivity of the gauge at z: the margin of a pair (X, Y) is
/// gauge(X) + gauge(Y) − gauge(X+Y), which is ≥ 0 for every pair iff D_z is
/// convex. Fails when the worst margin drops below −tol.
pub fn gauge_subadditivity_check(
    domain: &DomainSpec,
    z: &CPoint,
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> Result<CriterionReport, DirectionalError> {
    gauge_subadditivity_check_with_pairs(domain, z, trials, seed, tolerance, &[])
}

/// Subadditivity check with explicitly supplied direction pairs evaluated
/// ahead of the random trials (used to drive the check straight at a
/// suspected violation).
pub fn gauge_subadditivity_check_with_pairs(
    domain: &DomainSpec,
    z: &CPoint,
    trials: u64,
    seed: u64,
    tolerance: f64,
    directed_pairs: &[DirPair],
) -> Result<CriterionReport, DirectionalError> {
    Ok(gauge_check_core(domain, z, trials, seed, tolerance, directed_pairs, false)?.0)
}

pub(crate) fn gauge_check_core(
    domain: &DomainSpec,
    z: &CPoint,
    trials: u64,
    seed: u64,
    tolerance: f64,
    directed_pairs: &[DirPair],
    collect_margins: bool,
) -> Result<(CriterionReport, Vec<f64>), DirectionalError> {
    check_args(domain, z, tolerance)?;
    let dim = domain.dim();

    let mut worst: Option<(f64, DirPair)> = None;
    let mut margins = Vec::new();
    for pair in directed_pairs {
        let m = pair_margin(domain, z, &pair.0, &pair.1);
        if collect_margins {
            margins.push(m);
        }
        if worst.as_ref().is_none_or(|(wm, _)| m < *wm) {
            worst = Some((m, *pair));
        }
    }

    let sampled = run_chunked(trials, seed, collect_margins, |rng| {
        let x = draw_direction(rng, dim);
        let y = draw_direction(rng, dim);
        Trial::Margin(pair_margin(domain, z, &x, &y), (x, y))
    });
    margins.extend(sampled.margins);
    if let Some((m, w)) = sampled.worst {
        if worst.as_ref().is_none_or(|(wm, _)| m < *wm) {
            worst = Some((m, w));
        }
    }

    let samples_used = trials + directed_pairs.len() as u64;
    let (margin, pair) = worst.expect("at least one trial or pair");
    let report = if margin < -tolerance {
        let witness = Witness::with_context(
            z,
            json!({
                "x": pair.0.vector().to_vec(),
                "y": pair.1.vector().to_vec(),
                "gauge_x": gauge_inner(domain, z, pair.0.vector()),
                "gauge_y": gauge_inner(domain, z, pair.1.vector()),
                "gauge_sum": gauge_inner(domain, z, &pair.0.add(&pair.1)),
            }),
        );
        CriterionReport::fail("gauge_subadditivity", margin, witness, samples_used)
    } else {
        CriterionReport::pass("gauge_subadditivity", margin, samples_used)
    };
    Ok((report, margins))
}

fn pair_margin(domain: &DomainSpec, z: &CPoint, x: &CDirection, y: &CDirection) -> f64 {
    let gx = gauge_inner(domain, z, x.vector());
    let gy = gauge_inner(domain, z, y.vector());
    let gsum = gauge_inner(domain, z, &x.add(y));
    gx + gy - gsum
}

fn draw_direction<R: Rng>(rng: &mut R, dim: usize) -> CDirection {
    let dir = random_unit_direction(rng, dim);
    let radius = loop {
        let r: f64 = rng.gen();
        if r > 1e-9 {
            break r;
        }
    };
    CDirection::from_point(dir.vector().scale(radius)).expect("nonzero")
}

type PointPair = (CPoint, CPoint);

/// Midpoint convexity of the indicatrix: samples w₁, w₂ ∈ D_z and requires
/// the midpoint to stay strictly inside D_z. The margin of a pair is
/// 1 − gauge(midpoint − z); a margin ≤ tol (midpoint on or beyond ∂D_z)
/// fails, since D_z is open.
pub fn indicatrix_midpoint_check(
    domain: &DomainSpec,
    z: &CPoint,
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> Result<CriterionReport, DirectionalError> {
    indicatrix_midpoint_check_with_pairs(domain, z, trials, seed, tolerance, &[])
}

pub fn indicatrix_midpoint_check_with_pairs(
    domain: &DomainSpec,
    z: &CPoint,
    trials: u64,
    seed: u64,
    tolerance: f64,
    directed_pairs: &[PointPair],
) -> Result<CriterionReport, DirectionalError> {
    check_args(domain, z, tolerance)?;
    let dim = domain.dim();
    let cap = 2.5 * domain.bounding_radius();

    let mut worst: Option<(f64, PointPair)> = None;
    let mut provided = 0u64;
    for (w1, w2) in directed_pairs {
        // Provided points must lie in D_z.
        let g1 = gauge_inner(domain, z, &w1.sub(z));
        let g2 = gauge_inner(domain, z, &w2.sub(z));
        if g1 >= 1.0 || g2 >= 1.0 {
            continue;
        }
        provided += 1;
        let m = midpoint_margin(domain, z, w1, w2);
        if worst.as_ref().is_none_or(|(wm, _)| m < *wm) {
            worst = Some((m, (*w1, *w2)));
        }
    }

    let sampled = run_chunked(trials, seed, false, |rng| {
        let w1 = draw_indicatrix_point(domain, z, rng, dim, cap);
        let w2 = draw_indicatrix_point(domain, z, rng, dim, cap);
        Trial::Margin(midpoint_margin(domain, z, &w1, &w2), (w1, w2))
    });
    if let Some((m, w)) = sampled.worst {
        if worst.as_ref().is_none_or(|(wm, _)| m < *wm) {
            worst = Some((m, w));
        }
    }

    let samples_used = trials + provided;
    let (margin, (w1, w2)) = worst.expect("at least one trial");
    if margin <= tolerance {
        let midpoint = w1.midpoint(&w2);
        let witness = Witness::with_context(
            &midpoint,
            json!({
                "w1": w1.to_vec(),
                "w2": w2.to_vec(),
                "gauge_midpoint": gauge_inner(domain, z, &midpoint.sub(z)),
                "base": z.to_vec(),
            }),
        );
        Ok(CriterionReport::fail("indicatrix_midpoint", margin, witness, samples_used))
    } else {
        Ok(CriterionReport::pass("indicatrix_midpoint", margin, samples_used))
    }
}

fn draw_indicatrix_point<R: Rng>(
    domain: &DomainSpec,
    z: &CPoint,
    rng: &mut R,
    dim: usize,
    cap: f64,
) -> CPoint {
    let dir = random_unit_direction(rng, dim);
    let u: f64 = rng.gen();
    let d = distance_inner(domain, z, &dir).0.min(cap);
    z.add_scaled(u * d, dir.vector())
}

fn midpoint_margin(domain: &DomainSpec, z: &CPoint, w1: &CPoint, w2: &CPoint) -> f64 {
    let mid = w1.midpoint(w2);
    1.0 - gauge_inner(domain, z, &mid.sub(z))
}
