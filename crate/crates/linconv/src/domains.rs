//! Domains under test, represented by defining functions.
//!
//! A domain is D = {ρ < 0}. Builtin families have closed-form ρ and ∇ρ;
//! custom domains evaluate a list of constraint expressions and take their
//! maximum (so a custom domain is an intersection of sublevel sets, and its
//! gradient falls back to central finite differences).
//!
//! All tolerances scale with `scale() = bounding_radius`; the criteria the
//! toolkit evaluates are dilation-covariant, so this keeps verdicts
//! independent of the units a domain is expressed in.

mod expr;

pub use expr::{Expr, ExprError};

use crate::geometry::{CDirection, CPoint, GeometryError, MAX_DIM};
use crate::tolerances as tol;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("wrong dimension: domain lives in C^{expected}, point in C^{got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("degenerate boundary: gradient norm {0:.3e} below threshold")]
    DegenerateBoundary(f64),
    #[error("boundary sampling failed: {0}")]
    SamplingFailed(String),
    #[error("invalid domain spec: {0}")]
    BadSpec(String),
    #[error("tolerance must be positive and finite")]
    BadTolerance,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Classification of a point relative to D = {ρ < 0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone)]
enum Family {
    /// ρ = |ζ|² − R²
    Ball { radius: f64 },
    /// ρ = Σ (c_j / a_j)² − 1 over the 2n real coordinates
    Ellipsoid { axes: [f64; 2 * MAX_DIM] },
    /// ρ = max(Re z − (Re w)² + c|z|² + c(Im w)², |ζ|² − r²), n = 2
    ModelE { c: f64, clip_radius: f64 },
    /// ρ = |ζ|² − 1 + eps·(x₁² − y₁²)
    PerturbedBall { eps: f64 },
    /// ρ = max over parsed constraint expressions
    Custom { constraints: Vec<Expr> },
}

/// A named defining-function family with parameters; the object under test.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    family: Family,
    dim: usize,
    bounding_radius: f64,
    shell_width: f64,
    anchor: CPoint,
}

/// The model defining function ρ_c(z,w) = Re z − (Re w)² + c|z|² + c(Im w)²
/// on ℂ², before intersecting with a ball.
#[inline]
pub fn model_rho_c(c: f64, p: &CPoint) -> f64 {
    let s = p.as_slice();
    let (x1, y1, x2, y2) = (s[0], s[1], s[2], s[3]);
    x1 - x2 * x2 + c * (x1 * x1 + y1 * y1) + c * y2 * y2
}

/// Gradient of ρ_c as a real 4-vector.
#[inline]
pub fn model_rho_c_gradient(c: f64, p: &CPoint) -> CPoint {
    let s = p.as_slice();
    CPoint::new(&[
        1.0 + 2.0 * c * s[0],
        2.0 * c * s[1],
        -2.0 * s[2],
        2.0 * c * s[3],
    ])
    .expect("finite gradient")
}

/// A sampled point of ∂D with its outward unit normal.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub point: CPoint,
    pub unit_normal: CPoint,
    pub residual: f64,
}

impl DomainSpec {
    // ---------------------------------------------------------------- ctors

    /// Ball of the given radius in ℂ², centred at the origin.
    pub fn ball(radius: f64) -> Result<Self, DomainError> {
        Self::ball_dim(radius, 2)
    }

    pub fn ball_dim(radius: f64, dim: usize) -> Result<Self, DomainError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DomainError::BadSpec("ball radius must be positive".into()));
        }
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(DomainError::BadSpec(format!("dimension {dim} unsupported")));
        }
        Ok(DomainSpec {
            family: Family::Ball { radius },
            dim,
            bounding_radius: 1.5 * radius,
            shell_width: 0.2,
            anchor: CPoint::zero(dim),
        })
    }

    /// Ellipsoid with one semi-axis per real coordinate (length 2n).
    pub fn ellipsoid(axes: &[f64]) -> Result<Self, DomainError> {
        if axes.is_empty() || !axes.len().is_multiple_of(2) || axes.len() > 2 * MAX_DIM {
            return Err(DomainError::BadSpec("need 2n semi-axes".into()));
        }
        if axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(DomainError::BadSpec("semi-axes must be positive".into()));
        }
        let dim = axes.len() / 2;
        let mut buf = [1.0; 2 * MAX_DIM];
        buf[..axes.len()].copy_from_slice(axes);
        let max_axis = axes.iter().cloned().fold(0.0, f64::max);
        Ok(DomainSpec {
            family: Family::Ellipsoid { axes: buf },
            dim,
            bounding_radius: 1.5 * max_axis,
            shell_width: 0.2,
            anchor: CPoint::zero(dim),
        })
    }

    /// The local model domain E = {ρ_c < 0} ∩ 𝔹(0, r) in ℂ².
    pub fn model_e(c: f64, clip_radius: f64) -> Result<Self, DomainError> {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(DomainError::BadSpec("model constant c must be ≥ 1".into()));
        }
        if !(clip_radius > 0.0 && clip_radius.is_finite()) {
            return Err(DomainError::BadSpec("clip radius must be positive".into()));
        }
        let a = (0.2 * clip_radius).min(0.5 / c);
        Ok(DomainSpec {
            family: Family::ModelE { c, clip_radius },
            dim: 2,
            bounding_radius: clip_radius,
            shell_width: 0.2,
            anchor: CPoint::new(&[-a, 0.0, 0.0, 0.0])?,
        })
    }

    /// Unit ball of ℂ² squeezed along x₁ and stretched along y₁:
    /// ρ = |ζ|² − 1 + eps·(x₁² − y₁²). Convex (hence linearly convex) for
    /// |eps| < 1.
    pub fn perturbed_ball(eps: f64) -> Result<Self, DomainError> {
        if !(eps.abs() < 1.0 && eps.is_finite()) {
            return Err(DomainError::BadSpec("|eps| must be < 1".into()));
        }
        Ok(DomainSpec {
            family: Family::PerturbedBall { eps },
            dim: 2,
            bounding_radius: 1.5 / (1.0 - eps.abs()).sqrt(),
            shell_width: 0.2,
            anchor: CPoint::zero(2),
        })
    }

    /// Custom domain: intersection of {expr < 0} over the given constraint
    /// expressions in the variables x1,y1,…  Dimension comes from the
    /// anchor length.
    pub fn custom(
        constraints: &[&str],
        anchor: &[f64],
        bounding_radius: f64,
        shell_width: f64,
    ) -> Result<Self, DomainError> {
        let parsed: Result<Vec<Expr>, ExprError> =
            constraints.iter().map(|s| Expr::parse(s)).collect();
        Self::custom_parsed(parsed?, anchor, bounding_radius, shell_width)
    }

    fn custom_parsed(
        constraints: Vec<Expr>,
        anchor: &[f64],
        bounding_radius: f64,
        shell_width: f64,
    ) -> Result<Self, DomainError> {
        if constraints.is_empty() {
            return Err(DomainError::BadSpec("custom domain needs ≥ 1 constraint".into()));
        }
        let anchor = CPoint::new(anchor)?;
        let dim = anchor.dim();
        for e in &constraints {
            if e.var_count() > 2 * dim {
                return Err(DomainError::BadSpec(format!(
                    "constraint `{}` uses coordinates beyond C^{dim}",
                    e.source()
                )));
            }
        }
        let spec = DomainSpec {
            family: Family::Custom { constraints },
            dim,
            bounding_radius,
            shell_width,
            anchor,
        };
        spec.validate_shape()?;
        Ok(spec)
    }

    fn validate_shape(&self) -> Result<(), DomainError> {
        if !(self.bounding_radius > 0.0 && self.bounding_radius.is_finite()) {
            return Err(DomainError::BadSpec("bounding radius must be positive".into()));
        }
        if !(self.shell_width > 0.0 && self.shell_width.is_finite()) {
            return Err(DomainError::BadSpec("shell width must be positive".into()));
        }
        let at_anchor = self.rho(&self.anchor)?;
        if !at_anchor.is_finite() || at_anchor >= 0.0 {
            return Err(DomainError::BadSpec(format!(
                "anchor is not interior: ρ(anchor) = {at_anchor}"
            )));
        }
        Ok(())
    }

    // ------------------------------------------------------------ accessors

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Length scale all relative tolerances multiply.
    #[inline]
    pub fn scale(&self) -> f64 {
        self.bounding_radius
    }

    #[inline]
    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    /// Half-width of the boundary shell U = {|ρ| < shell_width · scale}.
    #[inline]
    pub fn shell_width(&self) -> f64 {
        self.shell_width
    }

    #[inline]
    pub fn anchor(&self) -> CPoint {
        self.anchor
    }

    /// Default criterion tolerance for this domain.
    pub fn default_tol(&self) -> f64 {
        tol::CRITERION_TOL * self.scale()
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Ball { .. } => "ball",
            Family::Ellipsoid { .. } => "ellipsoid",
            Family::ModelE { .. } => "modelE",
            Family::PerturbedBall { .. } => "perturbed_ball",
            Family::Custom { .. } => "custom",
        }
    }

    // ----------------------------------------------------------- evaluation

    fn check_dim(&self, z: &CPoint) -> Result<(), DomainError> {
        if z.dim() != self.dim {
            Err(DomainError::WrongDimension { expected: self.dim, got: z.dim() })
        } else {
            Ok(())
        }
    }

    /// Defining function value; negative inside, positive outside.
    pub fn rho(&self, z: &CPoint) -> Result<f64, DomainError> {
        self.check_dim(z)?;
        Ok(self.rho_unchecked(z))
    }

    #[inline]
    pub(crate) fn rho_unchecked(&self, z: &CPoint) -> f64 {
        debug_assert_eq!(z.dim(), self.dim);
        match &self.family {
            Family::Ball { radius } => z.norm_sq() - radius * radius,
            Family::Ellipsoid { axes } => {
                let mut s = -1.0;
                for (c, a) in z.as_slice().iter().zip(axes.iter()) {
                    let t = c / a;
                    s += t * t;
                }
                s
            }
            Family::ModelE { c, clip_radius } => {
                let clip = z.norm_sq() - clip_radius * clip_radius;
                model_rho_c(*c, z).max(clip)
            }
            Family::PerturbedBall { eps } => {
                let s = z.as_slice();
                z.norm_sq() - 1.0 + eps * (s[0] * s[0] - s[1] * s[1])
            }
            Family::Custom { constraints } => {
                let coords = z.as_slice();
                constraints
                    .iter()
                    .map(|e| e.eval(coords))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    /// Values of the individual constraints making up ρ (one entry for
    /// single-surface families). Used to reject corner points where two
    /// constraint surfaces meet.
    pub fn constraint_values(&self, z: &CPoint) -> Result<Vec<f64>, DomainError> {
        self.check_dim(z)?;
        Ok(match &self.family {
            Family::ModelE { c, clip_radius } => vec![
                model_rho_c(*c, z),
                z.norm_sq() - clip_radius * clip_radius,
            ],
            Family::Custom { constraints } => {
                constraints.iter().map(|e| e.eval(z.as_slice())).collect()
            }
            _ => vec![self.rho_unchecked(z)],
        })
    }

    /// True near a C^{1,1} breakdown where two constraint surfaces cross.
    pub fn near_constraint_corner(&self, z: &CPoint) -> Result<bool, DomainError> {
        let vals = self.constraint_values(z)?;
        let band = 1e-4 * self.scale();
        Ok(vals.iter().filter(|v| v.abs() < band).count() >= 2)
    }

    /// Real gradient ∇ρ as a 2n-vector: closed form for builtin families,
    /// central finite differences for custom domains.
    pub fn gradient(&self, z: &CPoint) -> Result<CPoint, DomainError> {
        self.check_dim(z)?;
        Ok(self.gradient_unchecked(z))
    }

    pub(crate) fn gradient_unchecked(&self, z: &CPoint) -> CPoint {
        match &self.family {
            Family::Ball { .. } => z.scale(2.0),
            Family::Ellipsoid { axes } => {
                let mut buf = [0.0; 2 * MAX_DIM];
                for (j, (c, a)) in z.as_slice().iter().zip(axes.iter()).enumerate() {
                    buf[j] = 2.0 * c / (a * a);
                }
                CPoint::new(&buf[..2 * self.dim]).expect("finite")
            }
            Family::ModelE { c, clip_radius } => {
                let clip = z.norm_sq() - clip_radius * clip_radius;
                if model_rho_c(*c, z) >= clip {
                    model_rho_c_gradient(*c, z)
                } else {
                    z.scale(2.0)
                }
            }
            Family::PerturbedBall { eps } => {
                let s = z.as_slice();
                let mut buf = [0.0; 2 * MAX_DIM];
                buf[..2 * self.dim].copy_from_slice(s);
                for b in buf.iter_mut() {
                    *b *= 2.0;
                }
                buf[0] += 2.0 * eps * s[0];
                buf[1] -= 2.0 * eps * s[1];
                CPoint::new(&buf[..2 * self.dim]).expect("finite")
            }
            Family::Custom { .. } => self.gradient_fd_unchecked(z),
        }
    }

    /// Central finite-difference gradient, step 1e-5 · scale. Available for
    /// every family as an independent cross-check of the closed forms.
    pub fn gradient_fd(&self, z: &CPoint) -> Result<CPoint, DomainError> {
        self.check_dim(z)?;
        Ok(self.gradient_fd_unchecked(z))
    }

    fn gradient_fd_unchecked(&self, z: &CPoint) -> CPoint {
        let h = tol::FD_GRADIENT_STEP * self.scale();
        let mut buf = [0.0; 2 * MAX_DIM];
        for j in 0..2 * self.dim {
            let mut coords = [0.0; 2 * MAX_DIM];
            coords[j] = 1.0;
            let e = CPoint::new(&coords[..2 * self.dim]).expect("finite");
            let fp = self.rho_unchecked(&z.add_scaled(h, &e));
            let fm = self.rho_unchecked(&z.add_scaled(-h, &e));
            buf[j] = (fp - fm) / (2.0 * h);
        }
        CPoint::new(&buf[..2 * self.dim]).expect("finite")
    }

    /// Holomorphic gradient (∂ρ/∂z₁, …, ∂ρ/∂zₙ).
    pub fn holomorphic_gradient(&self, z: &CPoint) -> Result<Vec<Complex64>, DomainError> {
        let g = self.gradient(z)?;
        let s = g.as_slice();
        Ok((0..self.dim)
            .map(|j| Complex64::new(s[2 * j], -s[2 * j + 1]) * 0.5)
            .collect())
    }

    /// Membership test: inside iff ρ < −tol, boundary iff |ρ| ≤ tol.
    pub fn membership(&self, z: &CPoint, tolerance: f64) -> Result<Membership, DomainError> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(DomainError::BadTolerance);
        }
        let r = self.rho(z)?;
        Ok(if r < -tolerance {
            Membership::Inside
        } else if r <= tolerance {
            Membership::Boundary
        } else {
            Membership::Outside
        })
    }

    // ------------------------------------------------------------- sampling

    /// Conservative ray-parameter span: from any interior start, every exit
    /// of a domain contained in the bounding ball happens within this t for
    /// a unit direction.
    pub(crate) fn ray_span(&self, start: &CPoint) -> f64 {
        2.5 * self.bounding_radius + start.norm()
    }

    /// First boundary crossing along `start + t·dir` (dir need not be unit):
    /// coarse scan to `t_max`, then 60 bisection halvings on the first
    /// sign-change interval. `None` when ρ never becomes ≥ 0 up to t_max.
    pub(crate) fn first_crossing(
        &self,
        start: &CPoint,
        dir: &CPoint,
        t_max: f64,
        scan_steps: usize,
    ) -> Option<f64> {
        debug_assert!(self.rho_unchecked(start) < 0.0);
        let dt = t_max / scan_steps as f64;
        let mut t_lo = 0.0;
        let mut t_hi = None;
        for k in 1..=scan_steps {
            let t = k as f64 * dt;
            if self.rho_unchecked(&start.add_scaled(t, dir)) >= 0.0 {
                t_hi = Some(t);
                break;
            }
            t_lo = t;
        }
        let mut hi = t_hi?;
        let mut lo = t_lo;
        for _ in 0..tol::BISECTION_ITERS {
            let mid = 0.5 * (lo + hi);
            if self.rho_unchecked(&start.add_scaled(mid, dir)) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Build a [`BoundaryPoint`] at the given location, rejecting
    /// off-boundary, corner, and degenerate-gradient points.
    pub fn boundary_point_at(&self, p: &CPoint) -> Result<BoundaryPoint, DomainError> {
        let residual = self.rho(p)?.abs();
        if residual > 1e-8 * self.scale() {
            return Err(DomainError::SamplingFailed(format!(
                "point is off the boundary: |ρ| = {residual:.3e}"
            )));
        }
        if self.near_constraint_corner(p)? {
            return Err(DomainError::SamplingFailed(
                "point sits where two constraint surfaces cross".into(),
            ));
        }
        let g = self.gradient_unchecked(p);
        let gn = g.norm();
        if gn < tol::GRADIENT_DEGENERATE {
            return Err(DomainError::DegenerateBoundary(gn));
        }
        Ok(BoundaryPoint { point: *p, unit_normal: g.scale(1.0 / gn), residual })
    }

    /// One random boundary point: random ray from the anchor, bisected.
    pub(crate) fn sample_boundary_point<R: Rng>(
        &self,
        rng: &mut R,
    ) -> Result<BoundaryPoint, DomainError> {
        let res_tol = tol::BOUNDARY_RESIDUAL * self.scale();
        for _ in 0..256 {
            let dir = crate::geometry::random_unit_direction(rng, self.dim);
            let t_max = self.ray_span(&self.anchor);
            let Some(t) = self.first_crossing(&self.anchor, dir.vector(), t_max, tol::RAY_SCAN_STEPS)
            else {
                continue;
            };
            let p = self.anchor.add_scaled(t, dir.vector());
            if self.rho_unchecked(&p).abs() > res_tol {
                continue;
            }
            match self.boundary_point_at(&p) {
                Ok(bp) => return Ok(bp),
                // Corner or degenerate-gradient hit: redraw the ray.
                Err(DomainError::DegenerateBoundary(_) | DomainError::SamplingFailed(_)) => {
                    continue
                }
                Err(e) => return Err(e),
            }
        }
        Err(DomainError::SamplingFailed(
            "no admissible boundary point in 256 ray attempts".into(),
        ))
    }

    /// Deterministic sample of n boundary points (random rays from the
    /// anchor + bisection). Points with residual above 1e-10·scale, corner
    /// points, and degenerate-gradient points are rejected and redrawn.
    pub fn boundary_sample(&self, n: usize, seed: u64) -> Result<Vec<BoundaryPoint>, DomainError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample_boundary_point(&mut rng)).collect()
    }

    /// Newton projection of a near-boundary point onto ∂D.
    pub fn project_to_boundary(&self, z: &CPoint) -> Result<BoundaryPoint, DomainError> {
        self.check_dim(z)?;
        let mut w = *z;
        let res_tol = tol::BOUNDARY_RESIDUAL * self.scale();
        for _ in 0..100 {
            let r = self.rho_unchecked(&w);
            if r.abs() <= res_tol {
                return self.boundary_point_at(&w);
            }
            let g = self.gradient_unchecked(&w);
            let gn2 = g.norm_sq();
            if gn2.sqrt() < tol::GRADIENT_DEGENERATE {
                return Err(DomainError::DegenerateBoundary(gn2.sqrt()));
            }
            w = w.add_scaled(-r / gn2, &g);
        }
        Err(DomainError::SamplingFailed("boundary projection did not converge".into()))
    }

    // -------------------------------------------------------------- tangent

    /// Orthonormal basis of the complex tangent space T^ℂ(p): the n−1
    /// complex directions v with Σ_j (∂ρ/∂z_j) v_j = 0.
    pub fn complex_tangent_basis(
        &self,
        p: &BoundaryPoint,
    ) -> Result<Vec<CDirection>, DomainError> {
        let hg = self.holomorphic_gradient(&p.point)?;
        let hg_norm: f64 = hg.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if hg_norm < 0.5 * tol::GRADIENT_DEGENERATE {
            return Err(DomainError::DegenerateBoundary(2.0 * hg_norm));
        }
        let n = self.dim;
        if n == 1 {
            return Ok(Vec::new());
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n - 1);
        if n == 2 {
            let v = vec![-hg[1], hg[0]];
            basis.push(normalize_c(&v));
        } else {
            // Gram–Schmidt against conj(hg): bilinear orthogonality to hg is
            // Hermitian orthogonality to its conjugate.
            let u: Vec<Complex64> = hg.iter().map(|c| c.conj() / hg_norm).collect();
            for k in 0..n {
                let mut cand: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
                cand[k] = Complex64::new(1.0, 0.0);
                let proj = herm_dot(&cand, &u);
                for j in 0..n {
                    cand[j] -= proj * u[j];
                }
                for b in &basis {
                    let proj = herm_dot(&cand, b);
                    for j in 0..n {
                        cand[j] -= proj * b[j];
                    }
                }
                let norm: f64 = cand.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    basis.push(cand.iter().map(|c| c / norm).collect());
                    if basis.len() == n - 1 {
                        break;
                    }
                }
            }
            if basis.len() != n - 1 {
                return Err(DomainError::DegenerateBoundary(hg_norm));
            }
        }
        let out: Result<Vec<CDirection>, GeometryError> =
            basis.iter().map(|v| CDirection::from_complex(v)).collect();
        let out = out?;
        for v in &out {
            let pairing: Complex64 = (0..n).map(|j| hg[j] * v.vector().z(j)).sum();
            if pairing.norm() > tol::TANGENT_RESIDUAL * hg_norm {
                return Err(DomainError::DegenerateBoundary(pairing.norm()));
            }
        }
        Ok(out)
    }

    // ------------------------------------------------------------ spec file

    /// Parse a domain spec from its JSON file format. Unknown keys are
    /// rejected; `constraints` is required for (and exclusive to) the
    /// `custom` family.
    pub fn from_json_str(text: &str) -> Result<Self, DomainError> {
        let file: SpecFile = serde_json::from_str(text)
            .map_err(|e| DomainError::BadSpec(format!("JSON: {e}")))?;
        Self::from_spec_file(file)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self, DomainError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DomainError::BadSpec(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    fn from_spec_file(file: SpecFile) -> Result<Self, DomainError> {
        let mut params = file.params.clone();
        let mut take = |key: &str, default: f64| params.remove(key).unwrap_or(default);
        if file.family != "custom" && !file.constraints.is_empty() {
            return Err(DomainError::BadSpec(
                "constraints are only valid for the custom family".into(),
            ));
        }
        let anchor = CPoint::new(&file.anchor)?;
        let mut spec = match file.family.as_str() {
            "ball" => {
                let radius = take("radius", 1.0);
                Self::ball_dim(radius, anchor.dim())?
            }
            "ellipsoid" => {
                let names = ["ax1", "ay1", "ax2", "ay2", "ax3", "ay3", "ax4", "ay4"];
                let axes: Vec<f64> = names[..2 * anchor.dim()]
                    .iter()
                    .map(|k| take(k, 1.0))
                    .collect();
                Self::ellipsoid(&axes)?
            }
            "modelE" => {
                let c = take("c", 1.0);
                let r = take("r", 0.5);
                Self::model_e(c, r)?
            }
            "perturbed_ball" => Self::perturbed_ball(take("eps", 0.1))?,
            "custom" => {
                let parsed: Result<Vec<Expr>, ExprError> =
                    file.constraints.iter().map(|s| Expr::parse(s)).collect();
                Self::custom_parsed(
                    parsed?,
                    &file.anchor,
                    file.bounding_radius,
                    file.shell_width,
                )?
            }
            other => return Err(DomainError::UnknownFamily(other.to_string())),
        };
        if !params.is_empty() {
            let keys: Vec<&str> = params.keys().map(|s| s.as_str()).collect();
            return Err(DomainError::BadSpec(format!(
                "unknown params for family `{}`: {}",
                file.family,
                keys.join(", ")
            )));
        }
        spec.bounding_radius = file.bounding_radius;
        spec.shell_width = file.shell_width;
        spec.anchor = anchor;
        if anchor.dim() != spec.dim {
            return Err(DomainError::WrongDimension { expected: spec.dim, got: anchor.dim() });
        }
        spec.validate_shape()?;
        Ok(spec)
    }
}

fn herm_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

fn normalize_c(v: &[Complex64]) -> Vec<Complex64> {
    let n: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|c| c / n).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    bounding_radius: f64,
    shell_width: f64,
    anchor: Vec<f64>,
    #[serde(default)]
    constraints: Vec<String>,
}
