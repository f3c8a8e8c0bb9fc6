//! Central numeric tolerances.
//!
//! All boundary/criterion tolerances are *relative*: they multiply the
//! per-domain `scale` (= bounding radius), because every inequality the
//! toolkit evaluates is covariant under dilations. Constants that act on
//! dimensionless quantities (Fourier coefficients of the normalised
//! defining function, gauge values) are absolute.

/// Residual |ρ| accepted for a sampled boundary point, × scale.
pub const BOUNDARY_RESIDUAL: f64 = 1e-10;

/// Bisection depth for every 1-D boundary root solve. 60 halvings pin the
/// exit parameter to ~1e-18 relative, far below any criterion tolerance.
pub const BISECTION_ITERS: u32 = 60;

/// Default pass/fail tolerance for criterion margins, × scale.
pub const CRITERION_TOL: f64 = 1e-9;

/// Gradient norms below this (× scale) count as a degenerate boundary.
pub const GRADIENT_DEGENERATE: f64 = 1e-6;

/// Step for central finite-difference gradients of custom domains, × scale.
pub const FD_GRADIENT_STEP: f64 = 1e-5;

/// Orthogonality residual accepted for complex tangent directions.
pub const TANGENT_RESIDUAL: f64 = 1e-10;

/// Tangency residual above which a slice direction is rejected.
pub const SLICE_TANGENCY: f64 = 1e-8;

/// Richardson disagreement above which a slice step is rejected.
pub const SLICE_EXTRAPOLATION: f64 = 1e-3;

/// |defect| below this counts as "flat to working precision": the sign of
/// the tangential defect is then inconclusive.
pub const DEFECT_SIGN_TOL: f64 = 1e-6;

/// Two h-minimizers closer in value than this (× scale²) ...
pub const H_VALUE_TIE: f64 = 1e-8;

/// ... but further apart than this (× scale) make the nearest point
/// non-unique.
pub const H_POSITION_SPLIT: f64 = 1e-3;

/// Multi-start count for squared-distance minimisation.
pub const H_MULTISTART: usize = 64;

/// Default step (× scale) for slice extraction and h second differences.
pub const SECOND_ORDER_STEP: f64 = 1e-2;

/// θ-grid size for the directional distance minimisation over phases.
pub const THETA_GRID: usize = 128;

/// Golden-section iterations refining the θ minimum.
pub const GOLDEN_ITERS: usize = 25;

/// Coarse scan count for the first boundary crossing along a ray.
pub const RAY_SCAN_STEPS: usize = 64;

/// Boundary band |sup_value − 1| excluded by the hull coincidence check.
pub const BIPOLAR_BAND: f64 = 1e-6;

/// Condition number above which disc directions are treated as dependent.
pub const DIRECTION_CONDITION_MAX: f64 = 1e8;

/// Segment sample count per triangle side / chord half.
pub const SEGMENT_SAMPLES: usize = 64;

/// Trials per deterministic work chunk; checks split trials into chunks
/// seeded `seed + chunk_index`, so parallel and serial runs merge to the
/// same result.
pub const CHUNK_TRIALS: u64 = 64;
