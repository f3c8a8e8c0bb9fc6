//! Numerical verification of linear convexity for domains in ℂⁿ (n ≤ 4,
//! with the curvature machinery specialised to ℂ²).
//!
//! A domain is *linearly convex* when its complement is a union of affine
//! complex hyperplanes. For bounded C^{1,1} domains this is equivalent to a
//! family of checkable conditions, each of which gets a module here:
//!
//! * [`directional`] — the directional boundary distance d_D(z,X), the
//!   Minkowski gauge of the indicatrix, and sampled convexity checks of the
//!   gauge (subadditivity, midpoints).
//! * [`discs`] — containment of the convex hull of two concentric complex
//!   discs, explicit counterexample discs for domains that fail, the
//!   tangential chord search, and the real midpoint-of-triangle analogue.
//! * [`curvature`] — second-order boundary analysis: tangential slice
//!   coefficients, the tangential defect, the affine normalization frame
//!   onto the local model domain, and concavity-type inequalities for the
//!   squared boundary distance.
//! * [`duality`] — polar duality for unions of concentric discs: polar
//!   gauge, bipolar (linearly convex hull) membership, and the coincidence
//!   check against the direct convex hull.
//! * [`domains`] — defining-function representations of the domains under
//!   test, boundary sampling and complex tangent frames.
//! * [`suite`] — criterion orchestration, the counterexample pipeline and
//!   deterministic JSON/CSV reporting used by the CLI.

mod chunk;
pub mod curvature;
pub mod directional;
pub mod discs;
pub mod domains;
pub mod duality;
pub mod geometry;
pub mod report;
pub mod suite;
pub mod tolerances;

pub use domains::{BoundaryPoint, DomainSpec, Membership};
pub use geometry::{CDirection, CPoint};
pub use report::{CriterionReport, Verdict};
