//! Polar duality for unions of concentric complex discs in ℂ².
//!
//! A hyperplane missing 0 is identified with the coefficients a of
//! {a₁z₁ + a₂z₂ = 1}; the polar K* of a centred disc system K collects the
//! hyperplanes not meeting K, and the bipolar (K*)* — the linearly convex
//! hull — coincides with the plain convex hull for such systems. The
//! canonical two-axis system recovers K* = 𝔻² and
//! (K*)* = {|z₁| + |z₂| ≤ 1}.

use crate::chunk::{run_chunked, Trial};
use crate::geometry::{CDirection, CPoint, GeometryError};
use crate::report::{CriterionReport, Witness};
use crate::tolerances as tol;
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DualityError {
    #[error("disc system needs at least one disc")]
    EmptySystem,
    #[error("disc radius must be positive")]
    BadRadius,
    #[error("operation requires exactly two discs, system has {0}")]
    NeedTwoDiscs(usize),
    #[error("disc system must live in C^2, got C^{0}")]
    DimensionUnsupported(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Finite set of complex affine discs with a common center.
#[derive(Debug, Clone)]
pub struct CenteredDiscSystem {
    pub center: CPoint,
    pub discs: Vec<(CDirection, f64)>,
}

impl CenteredDiscSystem {
    pub fn new(center: CPoint, discs: Vec<(CDirection, f64)>) -> Result<Self, DualityError> {
        if center.dim() != 2 {
            return Err(DualityError::DimensionUnsupported(center.dim()));
        }
        if discs.is_empty() {
            return Err(DualityError::EmptySystem);
        }
        for (direction, radius) in &discs {
            if direction.dim() != 2 {
                return Err(DualityError::DimensionUnsupported(direction.dim()));
            }
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(DualityError::BadRadius);
            }
        }
        Ok(CenteredDiscSystem { center, discs })
    }

    /// K = (𝔻̄ × {0}) ∪ ({0} × 𝔻̄): unit discs along the two axes.
    pub fn canonical() -> Self {
        CenteredDiscSystem {
            center: CPoint::zero(2),
            discs: vec![
                (CDirection::new(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 1.0),
                (CDirection::new(&[0.0, 0.0, 1.0, 0.0]).unwrap(), 1.0),
            ],
        }
    }

    /// Image of the system under a complex-linear map (columns m₁, m₂).
    pub fn transformed(&self, m: &[[Complex64; 2]; 2]) -> Result<Self, DualityError> {
        let apply = |v: &CPoint| -> Result<CPoint, GeometryError> {
            let z = m[0][0] * v.z(0) + m[1][0] * v.z(1);
            let w = m[0][1] * v.z(0) + m[1][1] * v.z(1);
            CPoint::from_complex(&[z, w])
        };
        let center = apply(&self.center)?;
        let discs = self
            .discs
            .iter()
            .map(|(d, r)| Ok((CDirection::from_point(apply(d.vector())?)?, *r)))
            .collect::<Result<Vec<_>, DualityError>>()?;
        CenteredDiscSystem::new(center, discs)
    }

    /// Radius of a ball (around the center) certainly containing the hull.
    pub fn extent(&self) -> f64 {
        self.discs.iter().map(|(d, r)| r * d.norm()).fold(0.0, f64::max)
    }

    fn direction_matrix(&self) -> [[Complex64; 2]; 2] {
        let x1 = self.discs[0].0.vector();
        let x2 = self.discs[1].0.vector();
        // Columns are the disc directions.
        [[x1.z(0), x1.z(1)], [x2.z(0), x2.z(1)]]
    }
}

/// Gauge of the polar set: max over discs of radius·|a·X| with the bilinear
/// pairing a·X = a₁X₁ + a₂X₂. K* = {a : polar_gauge(a) < 1} after
/// translating the system to the origin.
pub fn polar_gauge(system: &CenteredDiscSystem, a: (Complex64, Complex64)) -> f64 {
    system
        .discs
        .iter()
        .map(|(d, r)| {
            let x = d.vector();
            r * (a.0 * x.z(0) + a.1 * x.z(1)).norm()
        })
        .fold(0.0, f64::max)
}

/// Bipolar membership result.
#[derive(Debug, Clone, Copy)]
pub struct BipolarMembership {
    pub inside: bool,
    /// sup{|⟨a, z−center⟩| : polar_gauge(a) ≤ 1}; membership is sup ≤ 1.
    /// Infinite when z leaves the complex span of a degenerate system.
    pub sup_value: f64,
}

/// Membership in (K*)*, the linearly convex hull, by evaluating the support
/// of z−center over the closed polar body. For independent directions this
/// reduces through the inverse direction matrix to Σ_j |(M⁻¹ζ)_j|/r_j; for
/// (near-)dependent directions the system collapses to one complex line.
pub fn double_polar_membership(
    system: &CenteredDiscSystem,
    z: &CPoint,
) -> Result<BipolarMembership, DualityError> {
    if z.dim() != 2 {
        return Err(DualityError::DimensionUnsupported(z.dim()));
    }
    let zeta = z.sub(&system.center);
    let sup = match system.discs.len() {
        1 => {
            let (d, r) = &system.discs[0];
            line_sup(zeta, d, *r)
        }
        2 => {
            let m = system.direction_matrix();
            if condition_number(&m) > tol::DIRECTION_CONDITION_MAX {
                dependent_sup(system, zeta)
            } else {
                let (u1, u2) = solve2(&m, (zeta.z(0), zeta.z(1)));
                u1.norm() / system.discs[0].1 + u2.norm() / system.discs[1].1
            }
        }
        n => return Err(DualityError::NeedTwoDiscs(n)),
    };
    Ok(BipolarMembership { inside: sup <= 1.0, sup_value: sup })
}

/// Support of ζ over the polar body when K spans a single complex line:
/// finite only for ζ in that line.
fn line_sup(zeta: CPoint, direction: &CDirection, effective_radius: f64) -> f64 {
    let x = direction.vector();
    let x2 = x.norm_sq();
    // Hermitian projection coefficient of ζ on X.
    let lambda = (zeta.z(0) * x.z(0).conj() + zeta.z(1) * x.z(1).conj()) / x2;
    let residual = zeta.sub(&x.mul_complex(lambda));
    if residual.norm() > 1e-9 * (zeta.norm() + x.norm()) {
        f64::INFINITY
    } else {
        lambda.norm() / effective_radius
    }
}

/// Two dependent directions collapse to the longer effective disc.
fn dependent_sup(system: &CenteredDiscSystem, zeta: CPoint) -> f64 {
    let (d1, r1) = &system.discs[0];
    let (d2, r2) = &system.discs[1];
    // |coeff| of X₂ along X₁ scales the second radius onto the first line.
    let x1 = d1.vector();
    let x2 = d2.vector();
    let coeff = (x2.z(0) * x1.z(0).conj() + x2.z(1) * x1.z(1).conj()) / x1.norm_sq();
    let effective = r1.max(r2 * coeff.norm());
    line_sup(zeta, d1, effective)
}

fn solve2(m: &[[Complex64; 2]; 2], b: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let det = m[0][0] * m[1][1] - m[1][0] * m[0][1];
    let u1 = (b.0 * m[1][1] - b.1 * m[1][0]) / det;
    let u2 = (m[0][0] * b.1 - m[0][1] * b.0) / det;
    (u1, u2)
}

/// 2-norm condition number of the complex 2×2 direction matrix, through the
/// eigenvalues of MᴴM.
fn condition_number(m: &[[Complex64; 2]; 2]) -> f64 {
    let col = |j: usize| (m[j][0], m[j][1]);
    let (a, b) = (col(0), col(1));
    let aa = a.0.norm_sqr() + a.1.norm_sqr();
    let bb = b.0.norm_sqr() + b.1.norm_sqr();
    let ab = (a.0.conj() * b.0 + a.1.conj() * b.1).norm_sqr();
    let tr = aa + bb;
    let det = aa * bb - ab;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let s_max = 0.5 * (tr + disc);
    let s_min = 0.5 * (tr - disc);
    if s_min <= 0.0 {
        f64::INFINITY
    } else {
        (s_max / s_min).sqrt()
    }
}

/// Brute-force support maximisation over the extreme hyperplanes of the
/// polar body, parametrised by a phase torus: a 64×64 grid with 3 local
/// refinement rounds. Exact-formula cross-check and near-singular fallback.
pub fn sup_over_polar_extremes_grid(
    system: &CenteredDiscSystem,
    z: &CPoint,
    grid: usize,
    rounds: usize,
) -> Result<f64, DualityError> {
    if system.discs.len() != 2 {
        return Err(DualityError::NeedTwoDiscs(system.discs.len()));
    }
    let zeta = z.sub(&system.center);
    let m = system.direction_matrix();
    let (r1, r2) = (system.discs[0].1, system.discs[1].1);
    // Extreme polar points satisfy r_j⟨a, X_j⟩ = e^{iθ_j}: pulling a back
    // through M makes the objective |Σ_j e^{iθ_j}(M⁻¹ζ)_j / r_j|.
    let (u1, u2) = solve2(&m, (zeta.z(0), zeta.z(1)));
    let (v1, v2) = (u1 / r1, u2 / r2);
    let objective = |t1: f64, t2: f64| -> f64 {
        (Complex64::from_polar(1.0, t1) * v1 + Complex64::from_polar(1.0, t2) * v2).norm()
    };

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut center = (0.0, 0.0);
    let mut span = two_pi;
    let mut best = 0.0f64;
    for _ in 0..=rounds {
        let mut arg = center;
        for k1 in 0..grid {
            let t1 = center.0 - 0.5 * span + span * k1 as f64 / (grid - 1) as f64;
            for k2 in 0..grid {
                let t2 = center.1 - 0.5 * span + span * k2 as f64 / (grid - 1) as f64;
                let v = objective(t1, t2);
                if v > best {
                    best = v;
                    arg = (t1, t2);
                }
            }
        }
        center = arg;
        span /= grid as f64 / 4.0;
    }
    Ok(best)
}

/// Direct convex-hull membership for a two-disc system: decide whether
/// t·r₁λ₁X₁ + (1−t)·r₂λ₂X₂ reaches z − center with t ∈ [0,1], |λᵢ| ≤ 1.
/// Inverting the direction matrix turns each fixed t into the exact
/// feasibility test |u₁| ≤ t·r₁ ∧ |u₂| ≤ (1−t)·r₂, scanned over a
/// 1025-point t-grid plus the two analytic switch points. Single-disc
/// systems and dependent directions reduce to one complex line.
pub fn convex_hull_membership(
    system: &CenteredDiscSystem,
    z: &CPoint,
) -> Result<bool, DualityError> {
    if z.dim() != 2 {
        return Err(DualityError::DimensionUnsupported(z.dim()));
    }
    if system.discs.len() == 1 {
        let zeta = z.sub(&system.center);
        let (d, r) = &system.discs[0];
        return Ok(line_sup(zeta, d, *r) <= 1.0);
    }
    if system.discs.len() != 2 {
        return Err(DualityError::NeedTwoDiscs(system.discs.len()));
    }
    let zeta = z.sub(&system.center);
    let m = system.direction_matrix();
    let (r1, r2) = (system.discs[0].1, system.discs[1].1);
    if condition_number(&m) > tol::DIRECTION_CONDITION_MAX {
        return Ok(dependent_sup(system, zeta) <= 1.0);
    }
    let (u1, u2) = solve2(&m, (zeta.z(0), zeta.z(1)));
    let (n1, n2) = (u1.norm(), u2.norm());

    let feasible = |t: f64| n1 <= t * r1 && n2 <= (1.0 - t) * r2;
    let grid = 1025;
    for k in 0..grid {
        if feasible(k as f64 / (grid - 1) as f64) {
            return Ok(true);
        }
    }
    // Analytic switch points close the grid-granularity gap.
    for t in [n1 / r1, 1.0 - n2 / r2] {
        if (0.0..=1.0).contains(&t) && feasible(t) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Coincidence of the convex hull and the linearly convex hull: samples z
/// in a box around the system and compares both membership answers outside
/// a thin boundary band |sup − 1| < 1e-6.
pub fn hulls_coincide_check(
    system: &CenteredDiscSystem,
    samples: u64,
    seed: u64,
) -> Result<CriterionReport, DualityError> {
    if system.discs.len() > 2 {
        return Err(DualityError::NeedTwoDiscs(system.discs.len()));
    }
    let half = 1.2 * system.extent();
    let center = system.center;
    let system_ref = &system;

    enum Outcome {
        Agree,
        Disagree { point: CPoint, sup: f64, hull: bool },
    }

    let run = run_chunked(samples, seed, false, move |rng| {
        let mut coords = [0.0f64; 4];
        for c in coords.iter_mut() {
            *c = (2.0 * rng.gen::<f64>() - 1.0) * half;
        }
        let z = center.add(&CPoint::new(&coords).expect("finite sample"));
        let bip = double_polar_membership(system_ref, &z).expect("two discs");
        let band = (bip.sup_value - 1.0).abs();
        if band < tol::BIPOLAR_BAND {
            return Trial::Skip;
        }
        let hull = convex_hull_membership(system_ref, &z).expect("one or two discs");
        if hull == bip.inside {
            // Positive margin: distance to the exclusion band (capped so
            // off-line points of degenerate systems stay finite).
            Trial::Margin((band - tol::BIPOLAR_BAND).min(1e6), Outcome::Agree)
        } else {
            Trial::Margin(-band, Outcome::Disagree { point: z, sup: bip.sup_value, hull })
        }
    });

    let (margin, outcome) = match run.worst {
        Some(w) => w,
        None => {
            return Ok(CriterionReport::inconclusive(
                "hulls_coincide",
                0.0,
                None,
                0,
            ))
        }
    };
    match outcome {
        Outcome::Agree => {
            Ok(CriterionReport::pass("hulls_coincide", margin, run.evaluated))
        }
        Outcome::Disagree { point, sup, hull } => {
            let witness = Witness::with_context(
                &point,
                json!({ "sup_value": sup, "convex_hull_member": hull }),
            );
            Ok(CriterionReport::fail("hulls_coincide", margin, witness, run.evaluated))
        }
    }
}
