//! Second-order boundary analysis.
//!
//! Three layers live here, all specialised to n = 2 where it matters:
//!
//! * tangential slice coefficients a₂₂ (holomorphic part) and b₂₂ (Levi
//!   part) of the normalised defining function, extracted by phase-Fourier
//!   sampling; their combination b₂₂ − |a₂₂| is the *tangential defect*,
//!   whose sign at a boundary point decides second-order linear convexity
//!   there;
//! * the affine normalization frame that maps a negative-defect boundary
//!   point onto the local model domain {Re z − (Re w)² + c|z|² + c(Im w)² < 0},
//!   fitting the constant c and a radius r on which the model majorises the
//!   pushed-forward defining function;
//! * the squared boundary distance h(z) = inf_{w∈∂D} |z−w|² with nearest
//!   points, gradients, and the two-point/second-order concavity margins
//!   equivalent to linear convexity.

use crate::discs::Disc;
use crate::domains::{BoundaryPoint, DomainError, DomainSpec};
use crate::geometry::{CDirection, CPoint, GeometryError};
use crate::tolerances as tol;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::RwLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("direction is not tangent: pairing residual {0:.3e}")]
    NotTangent(f64),
    #[error("slice step too large: extrapolation disagreement {0:.3e}")]
    StepTooLarge(f64),
    #[error("step must be positive and finite")]
    BadStep,
    #[error("curvature analysis requires a domain in C^2, got C^{0}")]
    DimensionUnsupported(usize),
    #[error("tangential defect {0:.3e} is nonnegative: nothing to normalize")]
    DefectNonNegative(f64),
    #[error("model containment failed down to the smallest radius")]
    ContainmentFailed,
    #[error("nearest boundary point is not unique")]
    NonUniqueNearest,
    #[error("h vanishes: the base point sits on the boundary")]
    BoundaryBasePoint,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

// ---------------------------------------------------------------- slices

/// Second-order tangential data of ρ̃ = ρ/|∇ρ(p)| along a complex tangent
/// direction: ρ̃(p + ε e^{iθ} v) = ε²(Re(a₂₂ e^{2iθ}) + b₂₂) + O(ε³).
#[derive(Debug, Clone, Copy)]
pub struct SliceCoefficients {
    pub a22: Complex64,
    pub b22: f64,
    /// b₂₂ − |a₂₂|.
    pub defect: f64,
    /// Gradient norm used to normalise ρ.
    pub normalization: f64,
}

/// Extract a₂₂/b₂₂ by sampling 8 phases at two radii (step, step/2) and
/// Richardson-extrapolating the parabolic Fourier modes. Odd-order error
/// terms fall into odd frequency bins, so the extrapolation cancels the
/// leading quartic contamination.
pub fn slice_second_order(
    domain: &DomainSpec,
    p: &BoundaryPoint,
    w_dir: &CDirection,
    step: f64,
) -> Result<SliceCoefficients, CurvatureError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CurvatureError::BadStep);
    }
    let hg = domain.holomorphic_gradient(&p.point)?;
    let hg_norm: f64 = hg.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let v = w_dir.normalized();
    let pairing: Complex64 = (0..domain.dim()).map(|j| hg[j] * v.vector().z(j)).sum();
    if pairing.norm() > tol::SLICE_TANGENCY * hg_norm.max(f64::MIN_POSITIVE) {
        return Err(CurvatureError::NotTangent(pairing.norm() / hg_norm));
    }
    let grad_norm = domain.gradient(&p.point)?.norm();

    let modes = |eps: f64| -> (Complex64, f64) {
        let mut a = Complex64::new(0.0, 0.0);
        let mut b = 0.0;
        for k in 0..8 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
            let q = p.point.add(&v.rotated(theta).vector().scale(eps));
            let g = domain.rho_unchecked(&q) / (grad_norm * eps * eps);
            a += g * Complex64::from_polar(1.0, -2.0 * theta);
            b += g;
        }
        (a / 4.0, b / 8.0)
    };

    let (a_full, b_full) = modes(step);
    let (a_half, b_half) = modes(0.5 * step);
    let disagreement = (a_half - a_full).norm() + (b_half - b_full).abs();
    if disagreement > tol::SLICE_EXTRAPOLATION * (1.0 + a_full.norm() + b_full.abs()) {
        return Err(CurvatureError::StepTooLarge(disagreement));
    }
    let a22 = (4.0 * a_half - a_full) / 3.0;
    let b22 = (4.0 * b_half - b_full) / 3.0;
    Ok(SliceCoefficients { a22, b22, defect: b22 - a22.norm(), normalization: grad_norm })
}

/// Tangential defect b₂₂ − |a₂₂| along the (phase-unique) complex tangent
/// direction; negative values certify a second-order violation of linear
/// convexity at p.
pub fn tangential_defect(domain: &DomainSpec, p: &BoundaryPoint) -> Result<f64, CurvatureError> {
    if domain.dim() != 2 {
        return Err(CurvatureError::DimensionUnsupported(domain.dim()));
    }
    let basis = domain.complex_tangent_basis(p)?;
    let step = tol::SECOND_ORDER_STEP * domain.scale();
    Ok(slice_second_order(domain, p, &basis[0], step)?.defect)
}

// ----------------------------------------------------------------- frame

/// Affine complex frame (translation + unitary + per-coordinate complex
/// scaling) mapping model coordinates (z, w) into the original space:
/// the boundary point goes to (0,0), the gradient to (1,0), the tangential
/// a₂₂ becomes real ≤ 0, and on 𝔹(0, r) the pushed-forward ρ is majorised
/// by ρ_c.
#[derive(Debug, Clone)]
pub struct NormalizationFrame {
    origin: CPoint,
    // Columns of the linear part: images of the model z- and w-axes.
    col_z: (Complex64, Complex64),
    col_w: (Complex64, Complex64),
    /// ℓ = |a₂₂| − b₂₂ of the unnormalised slice (defect × |∇ρ|, negated).
    pub ell: f64,
    /// Fitted model constant (≥ 1).
    pub c: f64,
    /// Radius of validity in model coordinates.
    pub r: f64,
}

impl NormalizationFrame {
    pub fn origin(&self) -> CPoint {
        self.origin
    }

    /// Map a model-coordinate point into the original space.
    pub fn push_point(&self, z: Complex64, w: Complex64) -> CPoint {
        self.origin.add(&self.push_direction(z, w))
    }

    /// Linear part only (directions transform without the translation).
    pub fn push_direction(&self, z: Complex64, w: Complex64) -> CPoint {
        let c1 = self.col_z.0 * z + self.col_w.0 * w;
        let c2 = self.col_z.1 * z + self.col_w.1 * w;
        CPoint::from_complex(&[c1, c2]).expect("finite frame image")
    }

    /// Pushed-forward defining function g = ρ ∘ frame in model coordinates.
    pub fn pushed_rho(&self, domain: &DomainSpec, z: Complex64, w: Complex64) -> f64 {
        domain.rho_unchecked(&self.push_point(z, w))
    }

    /// Map a disc given in model coordinates into the original space.
    pub fn map_disc(&self, disc: &Disc) -> Result<Disc, CurvatureError> {
        let c = disc.center;
        let x = disc.direction.vector();
        let center = self.push_point(c.z(0), c.z(1));
        let direction =
            CDirection::from_point(self.push_direction(x.z(0), x.z(1)))?;
        Ok(Disc { center, direction, radius: disc.radius })
    }
}

/// Build the normalization frame at a boundary point with negative defect.
///
/// The constant c is fitted from second-order residual ratios on a sample
/// of 𝔹(0, r) and verified on an independent sample; on verification
/// failure r is halved, up to 8 times.
pub fn normalization_frame(
    domain: &DomainSpec,
    p: &BoundaryPoint,
) -> Result<NormalizationFrame, CurvatureError> {
    if domain.dim() != 2 {
        return Err(CurvatureError::DimensionUnsupported(domain.dim()));
    }
    let hg = domain.holomorphic_gradient(&p.point)?;
    // Complex representation G of the real gradient: ∇ρ·η = Re⟨G, η⟩.
    let g_vec = [2.0 * hg[0].conj(), 2.0 * hg[1].conj()];
    let g_norm = (g_vec[0].norm_sqr() + g_vec[1].norm_sqr()).sqrt();
    if g_norm < tol::GRADIENT_DEGENERATE {
        return Err(DomainError::DegenerateBoundary(g_norm).into());
    }
    let u1 = [g_vec[0] / g_norm, g_vec[1] / g_norm];
    let u2 = [-u1[1].conj(), u1[0].conj()];

    // Slice along u2, rescaled from ρ̃ to ρ itself.
    let u2_dir = CDirection::from_complex(&u2)?;
    let step = tol::SECOND_ORDER_STEP * domain.scale();
    let slice = slice_second_order(domain, p, &u2_dir, step)?;
    let a22 = slice.a22 * slice.normalization;
    let b22 = slice.b22 * slice.normalization;
    let ell = a22.norm() - b22;
    if !ell.is_finite() || ell <= 0.0 {
        return Err(CurvatureError::DefectNonNegative(-ell));
    }

    // Rotate w so a₂₂ lands on the negative real axis, then scale w by
    // 1/√(ℓ/3) so the flat direction carries coefficient −3 ≤ −1.
    let phi = 0.5 * (std::f64::consts::PI - a22.arg());
    let sigma = Complex64::from_polar((3.0 / ell).sqrt(), phi);
    let col_z = (u1[0] / g_norm, u1[1] / g_norm);
    let col_w = (sigma * u2[0], sigma * u2[1]);

    let sigma_max = (1.0 / g_norm).max(sigma.norm());
    let r0 = 0.4 * domain.scale() / sigma_max;

    let mut frame = NormalizationFrame {
        origin: p.point,
        col_z,
        col_w,
        ell,
        c: 1.0,
        r: r0,
    };

    for halving in 0..=8 {
        let r = r0 / (1u32 << halving) as f64;
        frame.r = r;
        if let Some(c) = fit_model_constant(domain, &frame, r) {
            if verify_containment(domain, &frame, r, c) {
                frame.c = c;
                return Ok(frame);
            }
        }
    }
    Err(CurvatureError::ContainmentFailed)
}

/// Least c ≥ 1 with g ≤ Re z − (Re w)² + c(|z|² + (Im w)²) on the fit
/// sample, plus a 0.1 safety pad. `None` when no finite c can work (the
/// inequality already fails where the c-terms vanish).
fn fit_model_constant(domain: &DomainSpec, frame: &NormalizationFrame, r: f64) -> Option<f64> {
    let mut qmax = 1.0f64;
    let scale = domain.scale();
    let mut consider = |z: Complex64, w: Complex64| -> bool {
        let g = frame.pushed_rho(domain, z, w);
        let num = g - z.re + w.re * w.re;
        let den = z.norm_sqr() + w.im * w.im;
        if den <= 1e-12 * r * r {
            num <= 1e-10 * scale
        } else {
            qmax = qmax.max(num / den);
            true
        }
    };
    for (z, w) in model_ball_grid(r, 7) {
        if !consider(z, w) {
            return None;
        }
    }
    for (z, w) in model_ball_random(r, 2048, 0x4652414d) {
        if !consider(z, w) {
            return None;
        }
    }
    Some(qmax + 0.1)
}

fn verify_containment(domain: &DomainSpec, frame: &NormalizationFrame, r: f64, c: f64) -> bool {
    let slack = 1e-10 * domain.scale();
    for (z, w) in model_ball_random(r, 4096, 0x434f4e54) {
        let g = frame.pushed_rho(domain, z, w);
        let model = model_point_rho(c, z, w);
        if g > model + slack {
            return false;
        }
    }
    true
}

#[inline]
fn model_point_rho(c: f64, z: Complex64, w: Complex64) -> f64 {
    z.re - w.re * w.re + c * z.norm_sqr() + c * w.im * w.im
}

fn model_ball_grid(r: f64, n: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::new();
    let lin: Vec<f64> = (0..n).map(|k| -r + 2.0 * r * k as f64 / (n - 1) as f64).collect();
    for &x1 in &lin {
        for &y1 in &lin {
            for &x2 in &lin {
                for &y2 in &lin {
                    if x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2 <= r * r {
                        out.push((Complex64::new(x1, y1), Complex64::new(x2, y2)));
                    }
                }
            }
        }
    }
    out
}

fn model_ball_random(r: f64, count: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c: [f64; 4] = std::array::from_fn(|_| (2.0 * rng.gen::<f64>() - 1.0) * r);
        if c.iter().map(|x| x * x).sum::<f64>() <= r * r {
            out.push((Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3])));
        }
    }
    out
}

// --------------------------------------------------------------- h-field

/// Result of one squared-distance evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HEval {
    pub h: f64,
    pub nearest: CPoint,
    pub unique: bool,
}

/// The squared boundary distance h(z) = inf_{w ∈ ∂D} |z − w|², evaluated by
/// multi-start projected descent from 64 precomputed boundary seeds, with a
/// point-keyed cache behind a read/write lock (single-writer contract).
pub struct SquaredDistanceField<'a> {
    domain: &'a DomainSpec,
    seeds: Vec<CPoint>,
    cache: RwLock<HashMap<[u64; 8], HEval>>,
}

impl<'a> SquaredDistanceField<'a> {
    pub fn new(domain: &'a DomainSpec) -> Result<Self, CurvatureError> {
        let seeds = domain
            .boundary_sample(tol::H_MULTISTART, 0x48464c44)?
            .into_iter()
            .map(|bp| bp.point)
            .collect();
        Ok(SquaredDistanceField { domain, seeds, cache: RwLock::new(HashMap::new()) })
    }

    pub fn domain(&self) -> &DomainSpec {
        self.domain
    }

    fn cache_key(z: &CPoint) -> [u64; 8] {
        let mut key = [0u64; 8];
        for (k, c) in z.as_slice().iter().enumerate() {
            key[k] = c.to_bits();
        }
        key[7] ^= z.dim() as u64;
        key
    }

    /// h(z), its nearest boundary point, and whether that point is unique.
    /// Non-uniqueness is declared when two descent minima agree in value to
    /// 1e-8·scale² but sit further apart than 1e-3·scale.
    pub fn h_eval(&self, z: &CPoint) -> Result<HEval, CurvatureError> {
        self.domain.rho(z)?;
        let key = Self::cache_key(z);
        if let Some(hit) = self.cache.read().expect("h cache poisoned").get(&key) {
            return Ok(*hit);
        }
        let eval = self.compute(z);
        self.cache.write().expect("h cache poisoned").insert(key, eval);
        Ok(eval)
    }

    fn compute(&self, z: &CPoint) -> HEval {
        let scale = self.domain.scale();
        let mut minima: Vec<(f64, CPoint)> = Vec::with_capacity(self.seeds.len());
        for seed in &self.seeds {
            let w = self.descend(z, seed);
            minima.push((z.sub(&w).norm_sq(), w));
        }
        let (mut best_h, mut nearest) = minima[0];
        for (h, w) in minima.iter().skip(1) {
            if *h < best_h {
                best_h = *h;
                nearest = *w;
            }
        }
        let tie = tol::H_VALUE_TIE * scale * scale;
        let split = tol::H_POSITION_SPLIT * scale;
        let mut unique = true;
        for (h, w) in &minima {
            if *h <= best_h + tie && w.dist(&nearest) > split {
                unique = false;
                break;
            }
        }
        HEval { h: best_h, nearest, unique }
    }

    /// Projected descent of |z − w|² over ∂D: alternate boundary Newton
    /// projection with a damped tangential pull toward z.
    fn descend(&self, z: &CPoint, seed: &CPoint) -> CPoint {
        let domain = self.domain;
        let stop = 1e-9 * domain.scale();
        let mut w = *seed;
        for _ in 0..80 {
            w = self.project(w);
            let g = domain.gradient_unchecked(&w);
            let gn = g.norm();
            if gn < tol::GRADIENT_DEGENERATE {
                break;
            }
            let normal = g.scale(1.0 / gn);
            let v = z.sub(&w);
            let tangential = v.add_scaled(-v.dot(&normal), &normal);
            if tangential.norm() <= stop {
                break;
            }
            w = w.add_scaled(0.8, &tangential);
        }
        self.project(w)
    }

    fn project(&self, mut w: CPoint) -> CPoint {
        for _ in 0..3 {
            let r = self.domain.rho_unchecked(&w);
            let g = self.domain.gradient_unchecked(&w);
            let gn2 = g.norm_sq();
            if gn2 < tol::GRADIENT_DEGENERATE * tol::GRADIENT_DEGENERATE {
                break;
            }
            w = w.add_scaled(-r / gn2, &g);
        }
        w
    }
}

/// Real gradient ∇h(z) = 2(z − π(z)).
pub fn h_real_gradient(z: &CPoint, eval: &HEval) -> CPoint {
    z.sub(&eval.nearest).scale(2.0)
}

/// Holomorphic gradient h'_z(z) = conj(z − π(z)) componentwise, paired
/// bilinearly: 2Re Σ u_j (h'_z)_j reproduces the real first-order term.
/// Cross-validated against finite differences in the tests.
pub fn h_holomorphic_gradient(
    field: &SquaredDistanceField,
    z: &CPoint,
) -> Result<Vec<Complex64>, CurvatureError> {
    let eval = field.h_eval(z)?;
    if !eval.unique {
        return Err(CurvatureError::NonUniqueNearest);
    }
    let d = z.sub(&eval.nearest);
    Ok((0..z.dim()).map(|j| d.z(j).conj()).collect())
}

fn positive_h(field: &SquaredDistanceField, z: &CPoint) -> Result<HEval, CurvatureError> {
    let eval = field.h_eval(z)?;
    // Descent pins nearest points to ~1e-9·scale, so an on-boundary base
    // point shows up as h ≲ 1e-18·scale²; anything below 1e-16·scale² is
    // boundary to working precision.
    let floor = 1e-16 * field.domain().scale().powi(2);
    if eval.h <= floor {
        return Err(CurvatureError::BoundaryBasePoint);
    }
    Ok(eval)
}

/// Margin of the two-point holomorphic bound
/// h(w) ≤ h(z) + 2Re⟨w−z, h'_z⟩ + |⟨w−z, h'_z⟩|²/h(z)
/// with the bilinear pairing ⟨u,v⟩ = Σ u_j v_j. Nonnegative for every pair
/// iff the domain is linearly convex.
pub fn two_point_margin(
    field: &SquaredDistanceField,
    z: &CPoint,
    w: &CPoint,
) -> Result<f64, CurvatureError> {
    let hz = positive_h(field, z)?;
    if !hz.unique {
        return Err(CurvatureError::NonUniqueNearest);
    }
    let hw = field.h_eval(w)?;
    let hp = h_holomorphic_gradient(field, z)?;
    let diff = w.sub(z);
    let pairing: Complex64 = (0..z.dim()).map(|j| diff.z(j) * hp[j]).sum();
    Ok(hz.h + 2.0 * pairing.re + pairing.norm_sqr() / hz.h - hw.h)
}

/// Shrinking-radius probe of the same bound: for each radius, the maximum
/// over a fixed symmetric direction set of
/// (h(z+w) − h(z) − 2Re⟨w,h'_z⟩ − |⟨w,h'_z⟩|²/h(z)) / |w|².
/// A nonpositive trend as the radius shrinks is consistent with linear
/// convexity at π(z); stubbornly positive values witness its failure.
pub fn expansion_probe(
    field: &SquaredDistanceField,
    z: &CPoint,
    radii: &[f64],
) -> Result<Vec<f64>, CurvatureError> {
    let hz = positive_h(field, z)?;
    let hp = h_holomorphic_gradient(field, z)?;
    let dim = z.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x50524f42);
    let dirs: Vec<CPoint> = (0..128)
        .map(|_| *crate::geometry::random_unit_direction(&mut rng, dim).vector())
        .collect();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst = f64::NEG_INFINITY;
        for u in &dirs {
            for sign in [1.0, -1.0] {
                let w = u.scale(sign * r);
                let hzpw = field.h_eval(&z.add(&w))?;
                let pairing: Complex64 = (0..dim).map(|j| w.z(j) * hp[j]).sum();
                let bracket =
                    hzpw.h - hz.h - 2.0 * pairing.re - pairing.norm_sqr() / hz.h;
                worst = worst.max(bracket / (r * r));
            }
        }
        out.push(worst);
    }
    Ok(out)
}

/// Margin of the real quadratic-concavity bound
/// g(y) ≤ g(x) + ⟨y−x, g'(x)⟩ + ¼|y−x|²|g'(x)|²/g(x)
/// for g = h, with the real inner product and g' = 2(x − π(x)).
pub fn quadratic_concavity_margin(
    field: &SquaredDistanceField,
    x: &CPoint,
    y: &CPoint,
) -> Result<f64, CurvatureError> {
    let gx = positive_h(field, x)?;
    if !gx.unique {
        return Err(CurvatureError::NonUniqueNearest);
    }
    let gy = field.h_eval(y)?;
    let grad = h_real_gradient(x, &gx);
    let diff = y.sub(x);
    Ok(gx.h + diff.dot(&grad) + 0.25 * diff.norm_sq() * grad.norm_sq() / gx.h - gy.h)
}

/// Margin of the directional second-order bound
/// ⟨g''(z) v, v⟩ ≤ ½|v|²|g'(z)|²/g(z),
/// with ⟨g''v,v⟩ from a Richardson-extrapolated central second difference
/// at steps (step, step/2). Zero margin for v = 0.
pub fn second_difference_margin(
    field: &SquaredDistanceField,
    z: &CPoint,
    v: &CPoint,
    step: f64,
) -> Result<f64, CurvatureError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CurvatureError::BadStep);
    }
    if v.norm_sq() == 0.0 {
        return Ok(0.0);
    }
    let gz = positive_h(field, z)?;
    if !gz.unique {
        return Err(CurvatureError::NonUniqueNearest);
    }
    let grad = h_real_gradient(z, &gz);

    let second = |s: f64| -> Result<f64, CurvatureError> {
        let plus = positive_h(field, &z.add_scaled(s, v))?;
        let minus = positive_h(field, &z.add_scaled(-s, v))?;
        Ok((plus.h - 2.0 * gz.h + minus.h) / (s * s))
    };
    let d_full = second(step)?;
    let d_half = second(0.5 * step)?;
    let d2 = (4.0 * d_half - d_full) / 3.0;
    Ok(0.5 * v.norm_sq() * grad.norm_sq() / gz.h - d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discs::{construct_counterexample_discs, disc_pair_hull_check, HullGrid};
    use crate::report::Verdict;

    fn pt(c: &[f64]) -> CPoint {
        CPoint::new(c).unwrap()
    }

    fn boundary(domain: &DomainSpec, c: &[f64]) -> BoundaryPoint {
        domain.boundary_point_at(&pt(c)).unwrap()
    }

    #[test]
    fn slice_on_the_sphere_pole() {
        let d = DomainSpec::ball(1.0).unwrap();
        let p = boundary(&d, &[1.0, 0.0, 0.0, 0.0]);
        let w = CDirection::new(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        let s = slice_second_order(&d, &p, &w, 1e-2).unwrap();
        assert!(s.a22.norm() < 1e-10, "a22 = {}", s.a22);
        assert!((s.b22 - 0.5).abs() < 1e-10, "b22 = {}", s.b22);
        assert!((s.defect - 0.5).abs() < 1e-10);
    }

    #[test]
    fn slice_on_the_model_flat_point() {
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = boundary(&d, &[0.0, 0.0, 0.0, 0.0]);
        let w = CDirection::new(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        let s = slice_second_order(&d, &p, &w, 1e-2).unwrap();
        assert!((s.a22 - Complex64::new(-1.0, 0.0)).norm() < 1e-10, "a22 = {}", s.a22);
        assert!(s.b22.abs() < 1e-10, "b22 = {}", s.b22);
        assert!((s.defect + 1.0).abs() < 1e-10);
    }

    #[test]
    fn slice_is_phase_covariant() {
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = boundary(&d, &[0.0, 0.0, 0.0, 0.0]);
        let w = CDirection::new(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        let base = slice_second_order(&d, &p, &w, 1e-2).unwrap();
        for phi in [0.3, 1.1, 2.7] {
            let s = slice_second_order(&d, &p, &w.rotated(phi), 1e-2).unwrap();
            assert!((s.a22.norm() - base.a22.norm()).abs() < 1e-8);
            assert!((s.b22 - base.b22).abs() < 1e-8);
        }
    }

    #[test]
    fn slice_rejects_non_tangent_directions() {
        let d = DomainSpec::ball(1.0).unwrap();
        let p = boundary(&d, &[1.0, 0.0, 0.0, 0.0]);
        let w = CDirection::new(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            slice_second_order(&d, &p, &w, 1e-2),
            Err(CurvatureError::NotTangent(_))
        ));
    }

    #[test]
    fn defect_values_on_reference_domains() {
        let ball = DomainSpec::ball(1.0).unwrap();
        let p = boundary(&ball, &[1.0, 0.0, 0.0, 0.0]);
        assert!((tangential_defect(&ball, &p).unwrap() - 0.5).abs() < 1e-9);

        let model = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p0 = boundary(&model, &[0.0, 0.0, 0.0, 0.0]);
        assert!((tangential_defect(&model, &p0).unwrap() + 1.0).abs() < 1e-3);

        // Normalised sphere defect scales like 1/(2R): positive at every R.
        for radius in [0.5, 1.0, 2.0, 4.0] {
            let b = DomainSpec::ball(radius).unwrap();
            let p = boundary(&b, &[radius, 0.0, 0.0, 0.0]);
            let defect = tangential_defect(&b, &p).unwrap();
            assert!(defect > 0.0);
            assert!((defect - 0.5 / radius).abs() < 1e-6 * (1.0 + 1.0 / radius));
        }
    }

    #[test]
    fn defect_sign_on_linearly_convex_builtins() {
        for domain in [
            DomainSpec::ball(1.0).unwrap(),
            DomainSpec::ellipsoid(&[1.0, 1.2, 0.8, 1.5]).unwrap(),
        ] {
            let pts = domain.boundary_sample(200, 31).unwrap();
            let mut worst = f64::INFINITY;
            for p in &pts {
                worst = worst.min(tangential_defect(&domain, p).unwrap());
            }
            assert!(worst >= -1e-6, "{} worst defect {worst}", domain.family_name());
        }
    }

    #[test]
    fn frame_on_the_model_domain() {
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = boundary(&d, &[0.0, 0.0, 0.0, 0.0]);
        let f = normalization_frame(&d, &p).unwrap();
        assert!((f.ell - 1.0).abs() < 1e-6, "ell = {}", f.ell);
        assert!(f.c >= 1.0 && f.c < 10.0, "c = {}", f.c);
        assert!(f.r > 0.0);
        // Maps the model origin back to p.
        assert!(f.push_point(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
            .sub(&p.point)
            .norm()
            < 1e-15);
    }

    #[test]
    fn frame_normalizes_the_gradient() {
        // In model coordinates the pushed-forward ρ has gradient (1, 0, 0, 0)
        // at the origin, measured by central differences of g = ρ ∘ frame.
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = boundary(&d, &[0.0, 0.0, 0.0, 0.0]);
        let f = normalization_frame(&d, &p).unwrap();
        let h = 1e-6;
        let g = |z: Complex64, w: Complex64| f.pushed_rho(&d, z, w);
        let grad = [
            (g(Complex64::new(h, 0.0), Complex64::new(0.0, 0.0))
                - g(Complex64::new(-h, 0.0), Complex64::new(0.0, 0.0))) / (2.0 * h),
            (g(Complex64::new(0.0, h), Complex64::new(0.0, 0.0))
                - g(Complex64::new(0.0, -h), Complex64::new(0.0, 0.0))) / (2.0 * h),
            (g(Complex64::new(0.0, 0.0), Complex64::new(h, 0.0))
                - g(Complex64::new(0.0, 0.0), Complex64::new(-h, 0.0))) / (2.0 * h),
            (g(Complex64::new(0.0, 0.0), Complex64::new(0.0, h))
                - g(Complex64::new(0.0, 0.0), Complex64::new(0.0, -h))) / (2.0 * h),
        ];
        assert!((grad[0] - 1.0).abs() < 1e-6, "{grad:?}");
        for component in &grad[1..] {
            assert!(component.abs() < 1e-6, "{grad:?}");
        }
    }

    #[test]
    fn frame_containment_on_a_large_sample() {
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = boundary(&d, &[0.0, 0.0, 0.0, 0.0]);
        let f = normalization_frame(&d, &p).unwrap();
        for (z, w) in model_ball_random(f.r, 32 * 32 * 32, 0xBEEF) {
            let g = f.pushed_rho(&d, z, w);
            let model = model_point_rho(f.c, z, w);
            assert!(g <= model + 1e-8, "g = {g}, model = {model} at {z} {w}");
        }
    }

    #[test]
    fn frame_pushed_a22_is_real_nonpositive() {
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = boundary(&d, &[0.0, 0.0, 0.0, 0.0]);
        let f = normalization_frame(&d, &p).unwrap();
        // Fourier-extract a₂₂ of g(0, w) directly in model coordinates.
        let eps = 1e-3;
        let mut a = Complex64::new(0.0, 0.0);
        for k in 0..8 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
            let w = Complex64::from_polar(eps, theta);
            let g = f.pushed_rho(&d, Complex64::new(0.0, 0.0), w) / (eps * eps);
            a += g * Complex64::from_polar(1.0, -2.0 * theta);
        }
        a /= 4.0;
        assert!(a.im.abs() < 1e-8, "pushed a22 = {a}");
        assert!(a.re < 0.0);
    }

    #[test]
    fn frame_rejects_convex_boundary_points() {
        let d = DomainSpec::ball(1.0).unwrap();
        let p = boundary(&d, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            normalization_frame(&d, &p),
            Err(CurvatureError::DefectNonNegative(_))
        ));
    }

    #[test]
    fn frame_discs_break_hull_containment_end_to_end() {
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let p = boundary(&d, &[0.0, 0.0, 0.0, 0.0]);
        let f = normalization_frame(&d, &p).unwrap();
        // Walk δ down until the construction is valid and inside 𝔹(0, r).
        let mut delta = 0.1 / f.c;
        let discs = loop {
            assert!(delta > 1e-6);
            if let Ok((d1, d2)) = construct_counterexample_discs(f.c, delta) {
                if d1.extent() + d1.center.norm() < f.r {
                    break (f.map_disc(&d1).unwrap(), f.map_disc(&d2).unwrap());
                }
            }
            delta *= 0.5;
        };
        let report =
            disc_pair_hull_check(&d, &discs.0, &discs.1, &HullGrid::default(), 1e-12).unwrap();
        assert_eq!(report.verdict, Verdict::Fail, "{report:?}");
        let witness = pt(&report.witness.unwrap().point);
        assert!(witness.sub(&p.point).norm() < 1e-9, "witness {:?}", witness.as_slice());
    }

    #[test]
    fn h_on_the_ball() {
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let e = field.h_eval(&pt(&[0.5, 0.0, 0.0, 0.0])).unwrap();
        assert!((e.h - 0.25).abs() < 1e-10, "h = {}", e.h);
        assert!(e.nearest.sub(&pt(&[1.0, 0.0, 0.0, 0.0])).norm() < 1e-6);
        assert!(e.unique);

        // Center: a whole sphere of minimizers.
        let c = field.h_eval(&CPoint::zero(2)).unwrap();
        assert!((c.h - 1.0).abs() < 1e-10);
        assert!(!c.unique);
    }

    #[test]
    fn h_near_the_flat_model_point() {
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let e = field.h_eval(&pt(&[-1e-3, 0.0, 0.0, 0.0])).unwrap();
        assert!((e.h - 1e-6).abs() < 1e-9, "h = {}", e.h);
        assert!(e.nearest.norm() < 1e-4);
    }

    #[test]
    fn h_gradient_identity_and_fd_cross_check() {
        use rand::SeedableRng;
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();

        let hp = h_holomorphic_gradient(&field, &pt(&[0.5, 0.0, 0.0, 0.0])).unwrap();
        assert!((hp[0] - Complex64::new(-0.5, 0.0)).norm() < 1e-6);
        assert!(hp[1].norm() < 1e-6);

        // On the boundary the gradient vanishes.
        let bp = field.h_eval(&pt(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(h_real_gradient(&pt(&[1.0, 0.0, 0.0, 0.0]), &bp).norm() < 1e-6);

        // ∇h = 2(z − π(z)) against central differences of h.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let fd_step = 1e-4;
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let dir = crate::geometry::random_unit_direction(&mut rng, 2);
            let radius = 0.35 + 0.55 * rng.gen::<f64>();
            let z = dir.vector().scale(radius);
            let eval = field.h_eval(&z).unwrap();
            let grad = h_real_gradient(&z, &eval);
            for j in 0..4 {
                let mut e = [0.0; 4];
                e[j] = 1.0;
                let e = pt(&e);
                let hp = field.h_eval(&z.add_scaled(fd_step, &e)).unwrap().h;
                let hm = field.h_eval(&z.add_scaled(-fd_step, &e)).unwrap().h;
                worst = worst.max(((hp - hm) / (2.0 * fd_step) - grad.as_slice()[j]).abs());
            }
        }
        assert!(worst < 1e-5, "worst gradient deviation {worst}");
    }

    #[test]
    fn two_point_margin_closed_form_case() {
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let z = pt(&[0.5, 0.0, 0.0, 0.0]);
        let w = pt(&[0.0, 0.0, 0.5, 0.0]);
        let m = two_point_margin(&field, &z, &w).unwrap();
        assert!((m - 0.75).abs() < 1e-6, "margin = {m}");
        let self_margin = two_point_margin(&field, &z, &z).unwrap();
        assert!(self_margin.abs() < 1e-10);
    }

    #[test]
    fn quadratic_concavity_closed_form_case() {
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let x = pt(&[0.5, 0.0, 0.0, 0.0]);
        let y = pt(&[0.0, 0.0, 0.5, 0.0]);
        let m = quadratic_concavity_margin(&field, &x, &y).unwrap();
        assert!((m - 1.0).abs() < 1e-6, "margin = {m}");
        assert!(quadratic_concavity_margin(&field, &x, &x).unwrap().abs() < 1e-10);
    }

    #[test]
    fn both_two_point_bounds_hold_on_ball_samples() {
        use rand::SeedableRng;
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..200 {
            let dz = crate::geometry::random_unit_direction(&mut rng, 2);
            let z = dz.vector().scale(0.75 + 0.2 * rng.gen::<f64>());
            let dw = crate::geometry::random_unit_direction(&mut rng, 2);
            let w = dw.vector().scale(rng.gen::<f64>() * 0.95);
            let m16 = two_point_margin(&field, &z, &w).unwrap();
            assert!(m16 >= -1e-9, "two-point margin {m16}");
            let dy = crate::geometry::random_unit_direction(&mut rng, 2);
            let y = dy.vector().scale(0.75 + 0.2 * rng.gen::<f64>());
            let m22 = quadratic_concavity_margin(&field, &z, &y).unwrap();
            assert!(m22 >= -1e-9, "concavity margin {m22}");
        }
    }

    #[test]
    fn expansion_probe_trends() {
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let vals = expansion_probe(&field, &pt(&[0.5, 0.0, 0.0, 0.0]), &[0.1, 0.05, 0.025])
            .unwrap();
        for pair in vals.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{vals:?}");
        }
        assert!(vals.iter().all(|v| *v <= 1e-3), "{vals:?}");
        // Sample set is symmetric under w → −w by construction; the probe
        // of an even bracket at radius r is reproducible.
        let again = expansion_probe(&field, &pt(&[0.5, 0.0, 0.0, 0.0]), &[0.1]).unwrap();
        assert_eq!(vals[0], again[0]);
    }

    #[test]
    fn expansion_probe_stays_positive_against_the_flat_point() {
        // Base point on the inward normal of the flat model point: the
        // second-order violation at its nearest boundary point keeps the
        // probe positive at every radius.
        let d = DomainSpec::model_e(1.0, 0.5).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let z = pt(&[-0.01, 0.0, 0.0, 0.0]);
        let vals = expansion_probe(&field, &z, &[0.02, 0.01, 0.005]).unwrap();
        for v in &vals {
            assert!(*v > 1e-3, "{vals:?}");
        }
    }

    #[test]
    fn second_difference_margin_sphere_sharpness() {
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let z = pt(&[0.5, 0.0, 0.0, 0.0]);
        // Radial direction: equality case of the second-order bound.
        let radial = pt(&[1.0, 0.0, 0.0, 0.0]);
        let m = second_difference_margin(&field, &z, &radial, 1e-2).unwrap();
        assert!(m.abs() < 1e-5, "radial margin {m}");
        // Tangential: h curves down at −2, the bound sits at +2.
        let tangential = pt(&[0.0, 0.0, 1.0, 0.0]);
        let mt = second_difference_margin(&field, &z, &tangential, 1e-2).unwrap();
        assert!((mt - 4.0).abs() < 1e-4, "tangential margin {mt}");
        // Zero direction.
        assert_eq!(second_difference_margin(&field, &z, &CPoint::zero(2), 1e-2).unwrap(), 0.0);
    }

    #[test]
    fn second_difference_radial_equality_at_many_radii() {
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let radial = pt(&[1.0, 0.0, 0.0, 0.0]);
        for k in 1..=20 {
            let t = 0.30 + 0.025 * k as f64;
            let z = pt(&[t, 0.0, 0.0, 0.0]);
            let m = second_difference_margin(&field, &z, &radial, 5e-3).unwrap();
            assert!(m.abs() < 1e-5, "radius {t}: margin {m}");
        }
    }

    #[test]
    fn h_errors_on_boundary_and_non_unique_points() {
        let d = DomainSpec::ball(1.0).unwrap();
        let field = SquaredDistanceField::new(&d).unwrap();
        let on_boundary = pt(&[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            two_point_margin(&field, &on_boundary, &CPoint::zero(2)),
            Err(CurvatureError::BoundaryBasePoint)
        ));
        assert!(matches!(
            h_holomorphic_gradient(&field, &CPoint::zero(2)),
            Err(CurvatureError::NonUniqueNearest)
        ));
    }
}
