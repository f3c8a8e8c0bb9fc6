//! Points and directions in ℂⁿ stored as 2n reals.
//!
//! Everything downstream hammers on these in tight loops (ray marching,
//! hull grids, descent iterations), so both types are `Copy` with a fixed
//! inline buffer — no heap traffic per evaluation.

use num_complex::Complex64;
use thiserror::Error;

/// Largest supported complex dimension.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate count must be even, positive and ≤ {}, got {0}", 2 * MAX_DIM)]
    BadLength(usize),
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// A point of ℂⁿ as (x₁, y₁, …, xₙ, yₙ), with z_j = x_j + i·y_j.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CPoint {
    coords: [f64; 2 * MAX_DIM],
    dim: usize,
}

impl CPoint {
    pub fn new(coords: &[f64]) -> Result<Self, GeometryError> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) || coords.len() > 2 * MAX_DIM {
            return Err(GeometryError::BadLength(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let mut buf = [0.0; 2 * MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(CPoint { coords: buf, dim: coords.len() / 2 })
    }

    /// Origin of ℂⁿ.
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        CPoint { coords: [0.0; 2 * MAX_DIM], dim }
    }

    pub fn from_complex(z: &[Complex64]) -> Result<Self, GeometryError> {
        let mut buf = [0.0; 2 * MAX_DIM];
        if z.is_empty() || z.len() > MAX_DIM {
            return Err(GeometryError::BadLength(2 * z.len()));
        }
        for (j, zj) in z.iter().enumerate() {
            buf[2 * j] = zj.re;
            buf[2 * j + 1] = zj.im;
        }
        let p = CPoint { coords: buf, dim: z.len() };
        if p.as_slice().iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(p)
    }

    /// Complex dimension n.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..2 * self.dim]
    }

    /// j-th complex coordinate, 0-based.
    #[inline]
    pub fn z(&self, j: usize) -> Complex64 {
        Complex64::new(self.coords[2 * j], self.coords[2 * j + 1])
    }

    #[inline]
    pub fn set_z(&mut self, j: usize, v: Complex64) {
        self.coords[2 * j] = v.re;
        self.coords[2 * j + 1] = v.im;
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.as_slice().iter().map(|c| c * c).sum()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist(&self, other: &CPoint) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for j in 0..2 * self.dim {
            let d = self.coords[j] - other.coords[j];
            s += d * d;
        }
        s.sqrt()
    }

    #[inline]
    pub fn add(&self, other: &CPoint) -> CPoint {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for j in 0..2 * self.dim {
            out.coords[j] += other.coords[j];
        }
        out
    }

    #[inline]
    pub fn sub(&self, other: &CPoint) -> CPoint {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for j in 0..2 * self.dim {
            out.coords[j] -= other.coords[j];
        }
        out
    }

    #[inline]
    pub fn scale(&self, s: f64) -> CPoint {
        let mut out = *self;
        for j in 0..2 * self.dim {
            out.coords[j] *= s;
        }
        out
    }

    /// self + t · dir, the workhorse of every ray march.
    #[inline]
    pub fn add_scaled(&self, t: f64, dir: &CPoint) -> CPoint {
        debug_assert_eq!(self.dim, dir.dim);
        let mut out = *self;
        for j in 0..2 * self.dim {
            out.coords[j] += t * dir.coords[j];
        }
        out
    }

    /// Coordinatewise multiplication by a complex scalar: z_j ↦ λ·z_j.
    #[inline]
    pub fn mul_complex(&self, lambda: Complex64) -> CPoint {
        let mut out = *self;
        for j in 0..self.dim {
            let zj = self.z(j);
            out.set_z(j, lambda * zj);
        }
        out
    }

    /// Real Euclidean inner product on ℝ^{2n}.
    #[inline]
    pub fn dot(&self, other: &CPoint) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for j in 0..2 * self.dim {
            s += self.coords[j] * other.coords[j];
        }
        s
    }

    pub fn midpoint(&self, other: &CPoint) -> CPoint {
        self.add(other).scale(0.5)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.as_slice().to_vec()
    }
}

/// A nonzero complex direction, same layout as [`CPoint`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CDirection(CPoint);

impl CDirection {
    pub fn new(coords: &[f64]) -> Result<Self, GeometryError> {
        let p = CPoint::new(coords)?;
        if p.norm_sq() == 0.0 {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(CDirection(p))
    }

    pub fn from_point(p: CPoint) -> Result<Self, GeometryError> {
        if p.norm_sq() == 0.0 {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(CDirection(p))
    }

    pub fn from_complex(z: &[Complex64]) -> Result<Self, GeometryError> {
        Self::from_point(CPoint::from_complex(z)?)
    }

    #[inline]
    pub fn vector(&self) -> &CPoint {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn normalized(&self) -> CDirection {
        CDirection(self.0.scale(1.0 / self.0.norm()))
    }

    /// Rotate by a unimodular factor e^{iθ}.
    pub fn rotated(&self, theta: f64) -> CDirection {
        CDirection(self.0.mul_complex(Complex64::from_polar(1.0, theta)))
    }

    pub fn mul_complex(&self, lambda: Complex64) -> Result<CDirection, GeometryError> {
        if lambda == Complex64::new(0.0, 0.0) {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(CDirection(self.0.mul_complex(lambda)))
    }

    pub fn add(&self, other: &CDirection) -> CPoint {
        self.0.add(&other.0)
    }
}

/// Uniform point on the unit sphere of ℝ^{2n} (Gaussian normalisation).
pub fn random_unit_direction<R: rand::Rng>(rng: &mut R, dim: usize) -> CDirection {
    loop {
        let mut coords = [0.0; 2 * MAX_DIM];
        for c in coords.iter_mut().take(2 * dim) {
            *c = standard_normal(rng);
        }
        let p = CPoint { coords, dim };
        let n = p.norm();
        if n > 1e-6 {
            return CDirection(p.scale(1.0 / n));
        }
    }
}

// Box–Muller; keeps the stream a pure function of the rng without pulling
// in rand_distr.
fn standard_normal<R: rand::Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        if u > f64::MIN_POSITIVE {
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}
