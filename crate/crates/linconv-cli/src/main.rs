//! Command-line driver for the linconv toolkit.
//!
//! Exit codes: 0 all criteria pass, 1 any criterion fails, 2 usage or spec
//! error, 3 any criterion inconclusive (and none failing), 4 I/O failure
//! while writing reports.

use clap::{Args, Parser, Subcommand};
use linconv::curvature::tangential_defect;
use linconv::discs::chord_inequality_margin;
use linconv::domains::DomainSpec;
use linconv::duality::{convex_hull_membership, double_polar_membership, CenteredDiscSystem};
use linconv::geometry::CPoint;
use linconv::report::{exit_code, Verdict};
use linconv::suite::{
    chord_profile_csv, classify_defect, counterexample_pipeline, emit_json, emit_margins_csv,
    run_suite, suite_output, ConfigEcho, Criterion, CriterionRun, SuiteConfig, SystemLiteral,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "linconv", version, about = "Numerical linear-convexity checks for domains in C^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run criterion suites against a domain spec file.
    Check(CheckArgs),
    /// Tangential defect at a boundary point of a domain.
    Defect(DefectArgs),
    /// Counterexample disc construction and chord-inequality margins.
    Discs(DiscsArgs),
    /// Hull membership queries against a centred disc system.
    Hull(HullArgs),
    /// Full counterexample pipeline: defect scan, frame, discs, hull check.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Domain spec JSON file.
    spec: PathBuf,
    /// Comma-separated criteria (gauge,hull,defect,chord,hor16,hor22,hor26,bipolar).
    #[arg(long, default_value = "gauge,hull,defect,chord,hor16,hor22,hor26,bipolar")]
    criteria: String,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Criterion tolerance; defaults to 1e-9 × the domain scale.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write per-sample margins here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads (fixed default of 1 keeps runs environment-independent).
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Record wall-clock timings in the JSON report (off by default so
    /// reruns are byte-identical).
    #[arg(long, default_value_t = false)]
    timings: bool,
}

#[derive(Args)]
struct DefectArgs {
    spec: PathBuf,
    /// Boundary point as comma-separated reals x1,y1,x2,y2.
    #[arg(long)]
    point: String,
}

#[derive(Args)]
struct DiscsArgs {
    #[arg(long)]
    c: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    /// Write the θ-profile of ρ_c/δ on the first disc boundary here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct HullArgs {
    /// Disc system JSON file: {"center": [[re,im],...], "discs":
    /// [{"direction": [[re,im],...], "radius": r}, ...]}.
    #[arg(long)]
    system: PathBuf,
    /// Query point as comma-separated reals x1,y1,x2,y2.
    #[arg(long)]
    query: String,
}

#[derive(Args)]
struct PipelineArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 400)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

/// Error-to-exit-code carrier for everything past argument parsing.
enum CliError {
    /// Bad spec / bad values → 2.
    Spec(String),
    /// Failed to write an output file → 4.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Io(_) => 4,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Spec(m) | CliError::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check(args) => with_pool(args.workers, || check(&args)),
        Command::Defect(args) => defect(&args),
        Command::Discs(args) => discs(&args),
        Command::Hull(args) => hull(&args),
        Command::Pipeline(args) => with_pool(args.workers, || pipeline(&args)),
    }
}

fn with_pool<T>(workers: usize, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(f)
}

fn load_domain(path: &Path) -> Result<DomainSpec, CliError> {
    DomainSpec::from_json_file(path).map_err(|e| CliError::Spec(e.to_string()))
}

fn parse_point(text: &str) -> Result<CPoint, CliError> {
    let coords: Result<Vec<f64>, _> =
        text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| CliError::Spec(format!("bad point `{text}`: {e}")))?;
    CPoint::new(&coords).map_err(|e| CliError::Spec(format!("bad point `{text}`: {e}")))
}

fn check(args: &CheckArgs) -> Result<u8, CliError> {
    let domain = load_domain(&args.spec)?;
    let criteria: Result<Vec<Criterion>, _> = args
        .criteria
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| Criterion::from_str(t.trim()))
        .collect();
    let criteria = criteria.map_err(|e| CliError::Spec(e.to_string()))?;

    let mut config = SuiteConfig::new(criteria, args.samples, args.seed)
        .map_err(|e| CliError::Spec(e.to_string()))?;
    if let Some(t) = args.tol {
        config = config.with_tol(t).map_err(|e| CliError::Spec(e.to_string()))?;
    }
    config.timings = args.timings;
    config.collect_margins = args.csv.is_some();

    let runs = run_suite(&domain, &config).map_err(|e| CliError::Spec(e.to_string()))?;
    print_runs(&domain, &runs);

    let echo = ConfigEcho {
        spec: args.spec.display().to_string(),
        criteria: config.criteria.iter().map(|c| c.token().to_string()).collect(),
        samples: config.samples,
        seed: config.seed,
        tol: config.tol.unwrap_or_else(|| domain.default_tol()),
        workers: args.workers,
    };
    if let Some(path) = &args.json {
        emit_json(path, &suite_output(echo, &runs)).map_err(|e| CliError::Io(e.to_string()))?;
    }
    if let Some(path) = &args.csv {
        emit_margins_csv(path, &runs).map_err(|e| CliError::Io(e.to_string()))?;
    }

    let verdicts: Vec<Verdict> = runs.iter().map(|r| r.report.verdict).collect();
    Ok(exit_code(&verdicts) as u8)
}

fn print_runs(domain: &DomainSpec, runs: &[CriterionRun]) {
    println!(
        "domain: {} (scale {}, shell {})",
        domain.family_name(),
        domain.scale(),
        domain.shell_width()
    );
    for run in runs {
        let r = &run.report;
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "inconclusive",
        };
        let timing = match r.elapsed_ms {
            Some(ms) => format!(", {ms} ms"),
            None => String::new(),
        };
        println!(
            "criterion {:<8} {:<12} worst margin {:+.6e} ({} samples{timing})",
            r.name, verdict, r.worst_margin, r.samples_used
        );
        if let Some(w) = &r.witness {
            println!("  witness at {:?}", w.point);
        }
    }
}

fn defect(args: &DefectArgs) -> Result<u8, CliError> {
    let domain = load_domain(&args.spec)?;
    let point = parse_point(&args.point)?;
    let bp = domain
        .project_to_boundary(&point)
        .map_err(|e| CliError::Spec(format!("not a boundary point: {e}")))?;
    let value = tangential_defect(&domain, &bp)
        .map_err(|e| CliError::Spec(format!("defect evaluation failed: {e}")))?;
    let verdict = classify_defect(value, linconv::tolerances::DEFECT_SIGN_TOL);
    println!(
        "boundary point {:?} (residual {:.2e})",
        bp.point.as_slice(),
        bp.residual
    );
    println!("tangential defect: {value:+.9e} → {verdict:?}");
    Ok(exit_code(&[verdict]) as u8)
}

fn discs(args: &DiscsArgs) -> Result<u8, CliError> {
    let m = chord_inequality_margin(args.c, args.delta, args.samples)
        .map_err(|e| CliError::Spec(e.to_string()))?;
    println!("c = {}, delta = {}", args.c, args.delta);
    println!("discriminant 4c²δ² + 4δ − 1/c = {:+.12}", m.discriminant);
    println!("max ρ_c/δ over ∂D₁ samples    = {:+.12}", m.disc_margin);
    println!("max of the x-quadratic        = {:+.12}", m.quadratic_max);
    let valid = m.discriminant < 0.0 && m.disc_margin < 0.0;
    println!("construction {}", if valid { "valid" } else { "INVALID" });
    if let Some(path) = &args.csv {
        let csv = chord_profile_csv(args.c, args.delta, args.samples)
            .map_err(|e| CliError::Spec(e.to_string()))?;
        std::fs::write(path, csv).map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(if valid { 0 } else { 1 })
}

fn hull(args: &HullArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.system)
        .map_err(|e| CliError::Spec(format!("{}: {e}", args.system.display())))?;
    let literal: SystemLiteral =
        serde_json::from_str(&text).map_err(|e| CliError::Spec(format!("system JSON: {e}")))?;
    let system =
        CenteredDiscSystem::try_from(&literal).map_err(|e| CliError::Spec(e.to_string()))?;
    let query = parse_point(&args.query)?;
    let hull =
        convex_hull_membership(&system, &query).map_err(|e| CliError::Spec(e.to_string()))?;
    let bipolar =
        double_polar_membership(&system, &query).map_err(|e| CliError::Spec(e.to_string()))?;
    println!("query {:?}", query.as_slice());
    println!("convex hull member:   {hull}");
    println!(
        "bipolar hull member:  {} (sup_value {})",
        bipolar.inside, bipolar.sup_value
    );
    Ok(0)
}

fn pipeline(args: &PipelineArgs) -> Result<u8, CliError> {
    let domain = load_domain(&args.spec)?;
    let report = counterexample_pipeline(&domain, args.samples, args.seed)
        .map_err(|e| CliError::Spec(e.to_string()))?;
    println!("pipeline verdict: {:?}", report.verdict);
    println!("{}", report.message);
    if let Some(defect) = report.worst_defect {
        println!(
            "worst defect {defect:+.6e} over {} boundary points",
            report.boundary_samples
        );
    }
    if let Some(frame) = &report.frame {
        println!("frame: ell {:.6e}, c {:.4}, r {:.4e}", frame.ell, frame.c, frame.r);
    }
    if let Some(delta) = report.delta {
        println!("delta {delta:.6e}");
    }
    if let Some(hull) = &report.hull_report {
        println!(
            "hull check: {:?} (worst margin {:+.3e})",
            hull.verdict, hull.worst_margin
        );
    }
    if let Some(path) = &args.json {
        emit_json(path, &report).map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(exit_code(&[report.verdict]) as u8)
}
