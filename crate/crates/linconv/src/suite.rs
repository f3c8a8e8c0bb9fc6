//! Criterion orchestration, the counterexample pipeline, and report I/O.
//!
//! Each [`Criterion`] runs a sampled check against one domain with a seed
//! derived as `seed + criterion index`, so a fixed config always produces
//! the same reports regardless of criterion subsets or worker counts.

use crate::curvature::{
    normalization_frame, quadratic_concavity_margin, second_difference_margin,
    tangential_defect, two_point_margin, SquaredDistanceField,
};
use crate::chunk::{run_chunked, Trial};
use crate::directional::gauge_check_core;
use crate::discs::{
    construct_counterexample_discs, default_chord_lengths, disc_pair_hull_check,
    chord_inequality_margin, tangential_chord_search, Disc, HullGrid,
};
use crate::domains::{BoundaryPoint, DomainError, DomainSpec};
use crate::duality::{hulls_coincide_check, CenteredDiscSystem};
use crate::geometry::{random_unit_direction, CDirection, CPoint};
use crate::report::{CriterionReport, Verdict, Witness};
use crate::tolerances as tol;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("criteria list must not be empty")]
    NoCriteria,
    #[error("sample count must be positive")]
    BadSamples,
    #[error("tolerance must be positive and finite")]
    BadTolerance,
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("criterion `{name}`: {message}")]
    CriterionFailed { name: &'static str, message: String },
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// The criteria the CLI can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Gauge,
    Hull,
    Defect,
    Chord,
    Hor16,
    Hor22,
    Hor26,
    Bipolar,
}

impl Criterion {
    pub const ALL: [Criterion; 8] = [
        Criterion::Gauge,
        Criterion::Hull,
        Criterion::Defect,
        Criterion::Chord,
        Criterion::Hor16,
        Criterion::Hor22,
        Criterion::Hor26,
        Criterion::Bipolar,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            Criterion::Gauge => "gauge",
            Criterion::Hull => "hull",
            Criterion::Defect => "defect",
            Criterion::Chord => "chord",
            Criterion::Hor16 => "hor16",
            Criterion::Hor22 => "hor22",
            Criterion::Hor26 => "hor26",
            Criterion::Bipolar => "bipolar",
        }
    }

    fn index(&self) -> u64 {
        Criterion::ALL.iter().position(|c| c == self).expect("listed") as u64
    }
}

impl FromStr for Criterion {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, SuiteError> {
        Criterion::ALL
            .iter()
            .find(|c| c.token() == s)
            .copied()
            .ok_or_else(|| SuiteError::UnknownCriterion(s.to_string()))
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Validated suite parameters.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub criteria: Vec<Criterion>,
    pub samples: u64,
    pub seed: u64,
    /// `None` uses the domain default (1e-9 · scale).
    pub tol: Option<f64>,
    /// Record wall-clock times in the reports (off keeps output
    /// byte-identical across reruns).
    pub timings: bool,
    /// Keep per-sample margins for CSV emission.
    pub collect_margins: bool,
}

impl SuiteConfig {
    pub fn new(criteria: Vec<Criterion>, samples: u64, seed: u64) -> Result<Self, SuiteError> {
        if criteria.is_empty() {
            return Err(SuiteError::NoCriteria);
        }
        if samples == 0 {
            return Err(SuiteError::BadSamples);
        }
        Ok(SuiteConfig {
            criteria,
            samples,
            seed,
            tol: None,
            timings: false,
            collect_margins: false,
        })
    }

    pub fn with_tol(mut self, tolerance: f64) -> Result<Self, SuiteError> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(SuiteError::BadTolerance);
        }
        self.tol = Some(tolerance);
        Ok(self)
    }
}

/// One executed criterion: its report plus (optionally) per-sample margins.
#[derive(Debug, Clone)]
pub struct CriterionRun {
    pub criterion: Criterion,
    pub report: CriterionReport,
    pub margins: Vec<f64>,
}

/// Run the configured criteria against one domain.
pub fn run_suite(domain: &DomainSpec, config: &SuiteConfig) -> Result<Vec<CriterionRun>, SuiteError> {
    if config.criteria.is_empty() {
        return Err(SuiteError::NoCriteria);
    }
    if config.samples == 0 {
        return Err(SuiteError::BadSamples);
    }
    let tolerance = match config.tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => return Err(SuiteError::BadTolerance),
        Some(t) => t,
        None => domain.default_tol(),
    };
    let mut runs = Vec::with_capacity(config.criteria.len());
    for criterion in &config.criteria {
        let seed = config.seed.wrapping_add(criterion.index());
        let start = std::time::Instant::now();
        let (report, margins) = run_criterion(domain, *criterion, config, seed, tolerance)?;
        let mut report = report;
        report.name = criterion.token().to_string();
        if config.timings {
            report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        }
        runs.push(CriterionRun { criterion: *criterion, report, margins });
    }
    Ok(runs)
}

fn run_criterion(
    domain: &DomainSpec,
    criterion: Criterion,
    config: &SuiteConfig,
    seed: u64,
    tolerance: f64,
) -> Result<(CriterionReport, Vec<f64>), SuiteError> {
    let samples = config.samples;
    let collect = config.collect_margins;
    match criterion {
        Criterion::Gauge => {
            let anchor = domain.anchor();
            gauge_check_core(domain, &anchor, samples, seed, tolerance, &[], collect)
                .map_err(|e| SuiteError::CriterionFailed { name: "gauge", message: e.to_string() })
        }
        Criterion::Hull => hull_criterion(domain, samples, seed, tolerance, collect),
        Criterion::Defect => defect_criterion(domain, samples, seed, collect),
        Criterion::Chord => chord_criterion(domain, samples, seed),
        Criterion::Hor16 => h_pair_criterion(domain, samples, seed, tolerance, collect, false),
        Criterion::Hor22 => h_pair_criterion(domain, samples, seed, tolerance, collect, true),
        Criterion::Hor26 => h_second_order_criterion(domain, samples, seed, tolerance, collect),
        Criterion::Bipolar => {
            let system = CenteredDiscSystem::canonical();
            let report = hulls_coincide_check(&system, samples, seed).map_err(|e| {
                SuiteError::CriterionFailed { name: "bipolar", message: e.to_string() }
            })?;
            Ok((report, Vec::new()))
        }
    }
}

fn defect_points(samples: u64) -> usize {
    (samples / 50).clamp(20, 400) as usize
}

/// Boundary defect scan: sign of the worst tangential defect over sampled
/// boundary points.
fn defect_criterion(
    domain: &DomainSpec,
    samples: u64,
    seed: u64,
    collect: bool,
) -> Result<(CriterionReport, Vec<f64>), SuiteError> {
    let scan = defect_scan(domain, defect_points(samples), seed)?;
    let mut margins = Vec::new();
    if collect {
        margins = scan.defects.clone();
    }
    let Some((worst, point)) = scan.worst else {
        return Ok((
            CriterionReport::inconclusive("defect", 0.0, None, scan.defects.len() as u64),
            margins,
        ));
    };
    let used = scan.defects.len() as u64;
    let report = match classify_defect(worst, tol::DEFECT_SIGN_TOL) {
        Verdict::Fail => {
            let witness =
                Witness::with_context(&point.point, json!({ "defect": worst }));
            CriterionReport::fail("defect", worst, witness, used)
        }
        Verdict::Inconclusive => CriterionReport::inconclusive(
            "defect",
            worst,
            Some(Witness::with_context(&point.point, json!({ "defect": worst }))),
            used,
        ),
        Verdict::Pass => CriterionReport::pass("defect", worst, used),
    };
    Ok((report, margins))
}

/// Sign classification of the worst defect with a flatness band.
pub fn classify_defect(worst_defect: f64, band: f64) -> Verdict {
    if worst_defect < -band {
        Verdict::Fail
    } else if worst_defect <= band {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

struct DefectScan {
    defects: Vec<f64>,
    worst: Option<(f64, BoundaryPoint)>,
    degenerate: u64,
}

fn defect_scan(domain: &DomainSpec, points: usize, seed: u64) -> Result<DefectScan, SuiteError> {
    let boundary = domain.boundary_sample(points, seed)?;
    let mut scan = DefectScan { defects: Vec::with_capacity(points), worst: None, degenerate: 0 };
    for bp in boundary {
        match tangential_defect(domain, &bp) {
            Ok(defect) => {
                scan.defects.push(defect);
                if scan.worst.is_none_or(|(w, _)| defect < w) {
                    scan.worst = Some((defect, bp));
                }
            }
            Err(_) => scan.degenerate += 1,
        }
    }
    Ok(scan)
}

/// Chord criterion: search for a tangential chord at the worst-defect
/// boundary point. Finding one is a linear-convexity failure.
fn chord_criterion(
    domain: &DomainSpec,
    samples: u64,
    seed: u64,
) -> Result<(CriterionReport, Vec<f64>), SuiteError> {
    let scan = defect_scan(domain, defect_points(samples), seed)?;
    let Some((worst_defect, point)) = scan.worst else {
        return Ok((CriterionReport::inconclusive("chord", 0.0, None, 0), Vec::new()));
    };
    let lengths = default_chord_lengths(domain);
    let witness = tangential_chord_search(domain, &point, &lengths, 32)
        .map_err(|e| SuiteError::CriterionFailed { name: "chord", message: e.to_string() })?;
    let used = scan.defects.len() as u64;
    let report = match witness {
        Some(w) => {
            let context = json!({
                "endpoint_a": w.endpoint_a.to_vec(),
                "endpoint_b": w.endpoint_b.to_vec(),
                "interior_margin": w.interior_margin,
                "half_length": w.half_length,
                "defect": worst_defect,
            });
            CriterionReport::fail(
                "chord",
                -w.interior_margin,
                Witness::with_context(&w.boundary_point, context),
                used,
            )
        }
        None => CriterionReport::pass("chord", worst_defect, used),
    };
    Ok((report, Vec::new()))
}

/// Hull criterion: random concentric disc pairs strictly inside D, plus a
/// curvature-guided pair through the normalization frame whenever the
/// boundary scan exposes a negative defect.
fn hull_criterion(
    domain: &DomainSpec,
    samples: u64,
    seed: u64,
    tolerance: f64,
    collect: bool,
) -> Result<(CriterionReport, Vec<f64>), SuiteError> {
    let pairs = (samples / 10).max(1);
    let grid = HullGrid::default();

    struct HullState {
        worst: Option<CriterionReport>,
        margins: Vec<f64>,
        skipped: u64,
        grid_samples: u64,
    }
    impl HullState {
        fn consider(&mut self, report: CriterionReport, collect: bool) {
            self.grid_samples += report.samples_used;
            if collect {
                self.margins.push(report.worst_margin);
            }
            if report.verdict == Verdict::Inconclusive {
                self.skipped += 1;
                return;
            }
            if self.worst.as_ref().is_none_or(|w| report.worst_margin < w.worst_margin) {
                self.worst = Some(report);
            }
        }
    }
    let mut state =
        HullState { worst: None, margins: Vec::new(), skipped: 0, grid_samples: 0 };

    // Guided pair first: defect scan → frame → counterexample discs.
    if let Some(guided) = guided_disc_pair(domain, seed, tolerance)? {
        let report = disc_pair_hull_check(domain, &guided.0, &guided.1, &grid, tolerance)
            .map_err(|e| SuiteError::CriterionFailed { name: "hull", message: e.to_string() })?;
        state.consider(report, collect);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let Some((d1, d2)) = random_disc_pair(domain, &mut rng) else {
            state.skipped += 1;
            continue;
        };
        let report = disc_pair_hull_check(domain, &d1, &d2, &grid, tolerance)
            .map_err(|e| SuiteError::CriterionFailed { name: "hull", message: e.to_string() })?;
        state.consider(report, collect);
    }

    let report = match state.worst {
        Some(mut r) => {
            r.samples_used = state.grid_samples;
            r.name = "hull".into();
            r
        }
        None => CriterionReport::inconclusive("hull", 0.0, None, 0),
    };
    Ok((report, state.margins))
}

/// Two discs with common random interior center, directions uniform on the
/// sphere and radii safely below the directional distance.
fn random_disc_pair<R: Rng>(domain: &DomainSpec, rng: &mut R) -> Option<(Disc, Disc)> {
    let dim = domain.dim();
    let center = (0..64).find_map(|_| {
        let dir = random_unit_direction(rng, dim);
        let radius = domain.bounding_radius() * 0.9 * rng.gen::<f64>();
        let z = domain.anchor().add_scaled(radius, dir.vector());
        (domain.rho_unchecked(&z) < -1e-3 * domain.scale()).then_some(z)
    })?;
    let d1 = random_disc_at(domain, &center, rng)?;
    let d2 = random_disc_at(domain, &center, rng)?;
    Some((d1, d2))
}

fn random_disc_at<R: Rng>(domain: &DomainSpec, center: &CPoint, rng: &mut R) -> Option<Disc> {
    let x = random_unit_direction(rng, domain.dim());
    let d = crate::directional::directional_distance(domain, center, &x).ok()?;
    let reach = d.min(2.5 * domain.bounding_radius());
    let radius = 0.9 * reach * rng.gen::<f64>().max(1e-3);
    Disc::new(*center, x, radius).ok()
}

/// Counterexample pair mapped through the normalization frame at the worst
/// sampled boundary defect, when that defect is negative.
fn guided_disc_pair(
    domain: &DomainSpec,
    seed: u64,
    tolerance: f64,
) -> Result<Option<(Disc, Disc)>, SuiteError> {
    if domain.dim() != 2 {
        return Ok(None);
    }
    let scan = defect_scan(domain, 64, seed ^ 0x6775)?;
    let Some((worst, point)) = scan.worst else { return Ok(None) };
    if classify_defect(worst, tol::DEFECT_SIGN_TOL) != Verdict::Fail {
        return Ok(None);
    }
    let Ok(frame) = normalization_frame(domain, &point) else { return Ok(None) };
    Ok(fit_counterexample_delta(domain, &frame, tolerance).map(|(_, discs)| discs))
}

/// Walk δ down from 0.1/c until the construction is valid, the discs fit in
/// the frame ball, and both mapped discs sit strictly inside the domain.
pub fn fit_counterexample_delta(
    domain: &DomainSpec,
    frame: &crate::curvature::NormalizationFrame,
    tolerance: f64,
) -> Option<(f64, (Disc, Disc))> {
    let mut delta = 0.1 / frame.c;
    for _ in 0..40 {
        if let Ok((m1, m2)) = construct_counterexample_discs(frame.c, delta) {
            let fits = m1.center.norm() + m1.extent() <= frame.r;
            if fits {
                if let (Ok(d1), Ok(d2)) = (frame.map_disc(&m1), frame.map_disc(&m2)) {
                    if disc_strictly_inside(domain, &d1, tolerance)
                        && disc_strictly_inside(domain, &d2, tolerance)
                    {
                        return Some((delta, (d1, d2)));
                    }
                }
            }
        }
        delta *= 0.5;
        if delta < 1e-12 {
            break;
        }
    }
    None
}

fn disc_strictly_inside(domain: &DomainSpec, disc: &Disc, tolerance: f64) -> bool {
    let n = 256;
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let lambda = num_complex::Complex64::from_polar(disc.radius, theta);
        if domain.rho_unchecked(&disc.point_at(lambda)) >= -tolerance {
            return false;
        }
    }
    true
}

/// Shared sampler: point in the boundary shell D ∩ U with unique nearest
/// boundary point, for the h-inequality criteria.
fn shell_point_unique<R: Rng>(
    domain: &DomainSpec,
    field: &SquaredDistanceField,
    rng: &mut R,
    min_depth: f64,
) -> Option<CPoint> {
    let dim = domain.dim();
    for _ in 0..16 {
        let dir = random_unit_direction(rng, dim);
        let anchor = domain.anchor();
        let t_max = domain.ray_span(&anchor);
        let Some(t) = domain.first_crossing(&anchor, dir.vector(), t_max, tol::RAY_SCAN_STEPS)
        else {
            continue;
        };
        let hit = anchor.add_scaled(t, dir.vector());
        let Ok(bp) = domain.boundary_point_at(&hit) else { continue };
        let max_depth = 0.5 * domain.shell_width() * domain.scale();
        if min_depth >= max_depth {
            return None;
        }
        let depth = min_depth + (max_depth - min_depth) * rng.gen::<f64>();
        let q = bp.point.add_scaled(-depth, &bp.unit_normal);
        let rho = domain.rho_unchecked(&q);
        if !(rho < 0.0 && rho.abs() < domain.shell_width() * domain.scale()) {
            continue;
        }
        match field.h_eval(&q) {
            Ok(e) if e.unique && e.h > 0.0 => return Some(q),
            _ => continue,
        }
    }
    None
}

fn interior_point<R: Rng>(domain: &DomainSpec, rng: &mut R) -> Option<CPoint> {
    let dim = domain.dim();
    for _ in 0..16 {
        let dir = random_unit_direction(rng, dim);
        let anchor = domain.anchor();
        let t_max = domain.ray_span(&anchor);
        let Some(t) = domain.first_crossing(&anchor, dir.vector(), t_max, tol::RAY_SCAN_STEPS)
        else {
            continue;
        };
        let u: f64 = rng.gen();
        return Some(anchor.add_scaled(0.999 * u * t, dir.vector()));
    }
    None
}

/// hor16 (complex two-point bound) and hor22 (real quadratic concavity)
/// share the sampling scheme: base points in the shell, partners in D.
fn h_pair_criterion(
    domain: &DomainSpec,
    samples: u64,
    seed: u64,
    tolerance: f64,
    collect: bool,
    real_form: bool,
) -> Result<(CriterionReport, Vec<f64>), SuiteError> {
    let name = if real_form { "hor22" } else { "hor16" };
    let field = SquaredDistanceField::new(domain)
        .map_err(|e| SuiteError::CriterionFailed { name: "hor", message: e.to_string() })?;
    let field_ref = &field;

    let outcome = run_chunked(samples, seed, collect, move |rng| {
        let Some(z) = shell_point_unique(domain, field_ref, rng, 0.0) else {
            return Trial::Degenerate;
        };
        let partner = if real_form {
            match shell_point_unique(domain, field_ref, rng, 0.0) {
                Some(p) => p,
                None => return Trial::Degenerate,
            }
        } else {
            match interior_point(domain, rng) {
                Some(p) => p,
                None => return Trial::Degenerate,
            }
        };
        let margin = if real_form {
            quadratic_concavity_margin(field_ref, &z, &partner)
        } else {
            two_point_margin(field_ref, &z, &partner)
        };
        match margin {
            Ok(m) => Trial::Margin(m, (z, partner)),
            Err(_) => Trial::Degenerate,
        }
    });

    finish_h_criterion(name, outcome, samples, tolerance)
}

fn h_second_order_criterion(
    domain: &DomainSpec,
    samples: u64,
    seed: u64,
    tolerance: f64,
    collect: bool,
) -> Result<(CriterionReport, Vec<f64>), SuiteError> {
    let field = SquaredDistanceField::new(domain)
        .map_err(|e| SuiteError::CriterionFailed { name: "hor26", message: e.to_string() })?;
    let field_ref = &field;
    let step = tol::SECOND_ORDER_STEP * domain.scale();
    let dim = domain.dim();

    let outcome = run_chunked(samples, seed, collect, move |rng| {
        // Stencil points must keep h > 0: stay deeper than the stencil.
        let Some(z) = shell_point_unique(domain, field_ref, rng, 1.5 * step) else {
            return Trial::Degenerate;
        };
        let v = random_unit_direction(rng, dim);
        match second_difference_margin(field_ref, &z, v.vector(), step) {
            Ok(m) => Trial::Margin(m, (z, *v.vector())),
            Err(_) => Trial::Degenerate,
        }
    });

    finish_h_criterion("hor26", outcome, samples, tolerance)
}

fn finish_h_criterion(
    name: &str,
    outcome: crate::chunk::ChunkedOutcome<(CPoint, CPoint)>,
    samples: u64,
    tolerance: f64,
) -> Result<(CriterionReport, Vec<f64>), SuiteError> {
    if outcome.evaluated < samples / 2 {
        // Numerical degeneracy dominated the sampling.
        return Ok((
            CriterionReport::inconclusive(name, 0.0, None, outcome.evaluated),
            outcome.margins,
        ));
    }
    let (margin, (z, partner)) = outcome.worst.expect("evaluated > 0");
    let report = if margin < -tolerance {
        let witness =
            Witness::with_context(&z, json!({ "partner": partner.to_vec(), "margin": margin }));
        CriterionReport::fail(name, margin, witness, outcome.evaluated)
    } else {
        CriterionReport::pass(name, margin, outcome.evaluated)
    };
    Ok((report, outcome.margins))
}

// ----------------------------------------------------------------- pipeline

/// Wire format for disc literals: complex entries as [re, im] pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DiscLiteral {
    pub center: Vec<[f64; 2]>,
    pub direction: Vec<[f64; 2]>,
    pub radius: f64,
}

impl From<&Disc> for DiscLiteral {
    fn from(d: &Disc) -> Self {
        let pairs = |p: &CPoint| (0..p.dim()).map(|j| [p.z(j).re, p.z(j).im]).collect();
        DiscLiteral {
            center: pairs(&d.center),
            direction: pairs(d.direction.vector()),
            radius: d.radius,
        }
    }
}

impl TryFrom<&DiscLiteral> for Disc {
    type Error = crate::discs::DiscsError;
    fn try_from(lit: &DiscLiteral) -> Result<Disc, Self::Error> {
        let flat = |pairs: &[[f64; 2]]| -> Vec<f64> {
            pairs.iter().flat_map(|p| [p[0], p[1]]).collect()
        };
        let center = CPoint::new(&flat(&lit.center))?;
        let direction = CDirection::new(&flat(&lit.direction))?;
        Disc::new(center, direction, lit.radius)
    }
}

/// Wire format for a centred disc system.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemLiteral {
    pub center: Vec<[f64; 2]>,
    pub discs: Vec<SystemDiscLiteral>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDiscLiteral {
    pub direction: Vec<[f64; 2]>,
    pub radius: f64,
}

impl TryFrom<&SystemLiteral> for CenteredDiscSystem {
    type Error = crate::duality::DualityError;
    fn try_from(lit: &SystemLiteral) -> Result<Self, Self::Error> {
        let flat = |pairs: &[[f64; 2]]| -> Vec<f64> {
            pairs.iter().flat_map(|p| [p[0], p[1]]).collect()
        };
        let center = CPoint::new(&flat(&lit.center))
            .map_err(crate::duality::DualityError::Geometry)?;
        let discs = lit
            .discs
            .iter()
            .map(|d| {
                Ok((
                    CDirection::new(&flat(&d.direction))
                        .map_err(crate::duality::DualityError::Geometry)?,
                    d.radius,
                ))
            })
            .collect::<Result<Vec<_>, crate::duality::DualityError>>()?;
        CenteredDiscSystem::new(center, discs)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameSummary {
    pub origin: Vec<f64>,
    pub ell: f64,
    pub c: f64,
    pub r: f64,
}

/// Full witness chain of the counterexample pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub verdict: Verdict,
    pub message: String,
    pub boundary_samples: u64,
    pub degenerate_points: u64,
    pub worst_defect: Option<f64>,
    pub defect_point: Option<Vec<f64>>,
    pub frame: Option<FrameSummary>,
    pub delta: Option<f64>,
    pub discs: Option<Vec<DiscLiteral>>,
    pub hull_report: Option<CriterionReport>,
}

impl PipelineReport {
    fn bail(verdict: Verdict, message: String, scanned: u64, degenerate: u64) -> Self {
        PipelineReport {
            verdict,
            message,
            boundary_samples: scanned,
            degenerate_points: degenerate,
            worst_defect: None,
            defect_point: None,
            frame: None,
            delta: None,
            discs: None,
            hull_report: None,
        }
    }
}

/// Scan the boundary for negative tangential defect; at the worst point,
/// build the normalization frame, shrink δ until the counterexample discs
/// embed strictly inside the domain, and run the hull containment check on
/// them. A failing hull check completes the witness chain.
pub fn counterexample_pipeline(
    domain: &DomainSpec,
    samples: u64,
    seed: u64,
) -> Result<PipelineReport, SuiteError> {
    let tolerance = domain.default_tol();
    let points = samples.clamp(16, 4096) as usize;
    let scan = defect_scan(domain, points, seed)?;
    let scanned = scan.defects.len() as u64;
    let Some((worst, point)) = scan.worst else {
        return Ok(PipelineReport::bail(
            Verdict::Inconclusive,
            "no boundary point admitted a defect evaluation".into(),
            scanned,
            scan.degenerate,
        ));
    };

    let mut report = PipelineReport {
        verdict: Verdict::Pass,
        message: String::new(),
        boundary_samples: scanned,
        degenerate_points: scan.degenerate,
        worst_defect: Some(worst),
        defect_point: Some(point.point.to_vec()),
        frame: None,
        delta: None,
        discs: None,
        hull_report: None,
    };

    match classify_defect(worst, tol::DEFECT_SIGN_TOL) {
        Verdict::Pass => {
            report.message =
                format!("no violation found at this sampling depth ({scanned} boundary points)");
            return Ok(report);
        }
        Verdict::Inconclusive => {
            report.verdict = Verdict::Inconclusive;
            report.message = format!(
                "worst defect {worst:.3e} sits inside the flatness band ±{:.0e}",
                tol::DEFECT_SIGN_TOL
            );
            return Ok(report);
        }
        Verdict::Fail => {}
    }

    let frame = match normalization_frame(domain, &point) {
        Ok(f) => f,
        Err(e) => {
            report.verdict = Verdict::Inconclusive;
            report.message = format!("negative defect {worst:.3e} but no frame: {e}");
            return Ok(report);
        }
    };
    report.frame = Some(FrameSummary {
        origin: frame.origin().to_vec(),
        ell: frame.ell,
        c: frame.c,
        r: frame.r,
    });

    let Some((delta, (d1, d2))) = fit_counterexample_delta(domain, &frame, tolerance) else {
        report.verdict = Verdict::Inconclusive;
        report.message = "counterexample discs did not embed at any delta".into();
        return Ok(report);
    };
    report.delta = Some(delta);
    report.discs = Some(vec![DiscLiteral::from(&d1), DiscLiteral::from(&d2)]);

    let hull = disc_pair_hull_check(domain, &d1, &d2, &HullGrid::default(), tolerance)
        .map_err(|e| SuiteError::CriterionFailed { name: "hull", message: e.to_string() })?;
    let failed = hull.verdict == Verdict::Fail;
    report.hull_report = Some(hull);
    if failed {
        report.verdict = Verdict::Fail;
        report.message = format!(
            "linear convexity violated: defect {worst:.4} at the scanned boundary point, \
             hull containment broken by the constructed disc pair (delta {delta:.4e})"
        );
    } else {
        report.verdict = Verdict::Inconclusive;
        report.message = "constructed discs did not break hull containment".into();
    }
    Ok(report)
}

// ------------------------------------------------------------------- output

/// Everything the JSON report carries besides the criterion reports.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub spec: String,
    pub criteria: Vec<String>,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutput {
    pub tool_version: String,
    pub config: ConfigEcho,
    pub reports: Vec<CriterionReport>,
}

pub fn suite_output(config: ConfigEcho, runs: &[CriterionRun]) -> SuiteOutput {
    SuiteOutput {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        reports: runs.iter().map(|r| r.report.clone()).collect(),
    }
}

/// Serialize any report payload to pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

pub fn emit_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<(), SuiteError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(to_json_string(value).as_bytes())?;
    Ok(())
}

/// Per-sample margins, one row per (criterion, sample index).
pub fn emit_margins_csv(path: &std::path::Path, runs: &[CriterionRun]) -> Result<(), SuiteError> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "criterion,sample,margin")?;
    for run in runs {
        if run.margins.is_empty() {
            writeln!(f, "{},worst,{}", run.report.name, run.report.worst_margin)?;
        }
        for (k, m) in run.margins.iter().enumerate() {
            writeln!(f, "{},{k},{m}", run.report.name)?;
        }
    }
    Ok(())
}

/// θ-profile of the model defining function on ∂D₁ together with the
/// equivalent x-quadratic, for plotting the chord inequality.
pub fn chord_profile_csv(c: f64, delta: f64, samples: usize) -> Result<String, SuiteError> {
    let ineq = chord_inequality_margin(c, delta, samples)
        .map_err(|e| SuiteError::CriterionFailed { name: "discs", message: e.to_string() })?;
    let mu = (2.0 * c * delta).sqrt();
    let center = CPoint::new(&[-delta, 0.0, 0.0, 0.0]).expect("finite");
    let dir = CDirection::new(&[delta, 0.0, delta / mu, 0.0]).expect("nonzero");
    let disc = Disc::new(center, dir, 1.0)
        .map_err(|e| SuiteError::CriterionFailed { name: "discs", message: e.to_string() })?;
    let mut out = String::from("theta,x,rho_c_over_delta,quadratic\n");
    let n = samples.max(4);
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let x = theta.cos();
        let p = disc.point_at(num_complex::Complex64::from_polar(1.0, theta));
        let rho = crate::domains::model_rho_c(c, &p) / delta;
        let quad = -1.0 + 4.0 * c * delta + 2.0 * (1.0 - 2.0 * c * delta) * x
            - (1.0 + 1.0 / c) * x * x;
        out.push_str(&format!("{theta},{x},{rho},{quad}\n"));
    }
    let _ = ineq;
    Ok(out)
}
