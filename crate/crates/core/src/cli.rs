//! Command-line front end. Every command writes one JSON report to stdout or
//! `--output` and exits with 0 (certified), 2 (inconclusive) or 1 (error).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{self, extract_trs, face_dimension, DualCertificate, FaceReport, Verdict};
use crate::error::{Error, Result};
use crate::geometry::Factor;
use crate::instances;
use crate::io::{self, FactorFile};
use crate::linalg::{self, SeededRng};
use crate::model::{self, build_family, family_from_tag, pataki_bound, FamilyTag, ProblemFamily, SdpProblem, SmoothnessReport};
use crate::oracle::{self, OracleResult};
use crate::solver::{self, PSchedule, SolveReport, SolverOptions};
use crate::sym::SymMatrix;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "bmsdp", version, about = "Burer-Monteiro SDP solver with optimality certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve by the rank staircase (or at one fixed rank) and certify the result.
    Solve(SolveArgs),
    /// Certify a given factor.
    Certify(CertifyArgs),
    /// Constraint rank, smoothness sampling and a recommended starting rank.
    Diagnose(DiagnoseArgs),
    /// Reference optimum from the independent oracles.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Maxcut,
    Orthocut,
    Trs,
    Geneig,
    Spheres,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Graph {
    #[default]
    Cycle,
    Complete,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    #[default]
    Random,
    /// TRS with `b` orthogonal to the bottom eigenspace of `A`.
    Hard,
    /// Two-dimensional TRS with a suboptimal local minimizer.
    Suboptimal,
}

/// Problem source: a file, or a built-in generator.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct ProblemSpec {
    /// Problem file (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Built-in family, used when no input file is given.
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Dimension of the matrix variable (TRS and GenEig: of the vector).
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Block size for orthocut.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = Graph::Cycle)]
    pub graph: Graph,
    #[arg(long, value_enum, default_value_t = InstanceKind::Random)]
    pub instance: InstanceKind,
    /// Sphere block sizes for `spheres`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Use `‖y_k‖² = 1` for every block instead of a trace split.
    #[arg(long)]
    pub homogeneous: bool,
}

#[derive(Args, Clone, Debug)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    eps_g: Option<f64>,
    #[arg(long)]
    eps_h: Option<f64>,
    /// Accept a gap bound at or below this value when the point is not certified.
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemSpec,
    #[command(flatten)]
    common: Common,
    /// `auto`, a rank, or an increasing comma-separated list of ranks.
    #[arg(long, default_value = "auto")]
    p: String,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Starting factor (JSON `{n, p, data}`), padded or truncated to the first rank.
    #[arg(long)]
    init: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    problem: ProblemSpec,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    factor: PathBuf,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[command(flatten)]
    problem: ProblemSpec,
    #[command(flatten)]
    common: Common,
    /// Feasible point to sample at; required for problems without a built-in family.
    #[arg(long)]
    factor: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    samples: usize,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    problem: ProblemSpec,
    #[command(flatten)]
    common: Common,
    /// Always use the trust-region solve at `p = n + 1`.
    #[arg(long)]
    escalation: bool,
}

/// Everything needed to rerun a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub input: Option<PathBuf>,
    pub problem: ProblemSpec,
    pub factor: Option<PathBuf>,
    pub options: SolverOptions,
    pub seed: u64,
    pub gap_tol: Option<f64>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub n: usize,
    pub m: usize,
    /// Rank of the span of the constraint matrices.
    pub span_rank: usize,
    pub smoothness: SmoothnessReport,
    pub pataki_bound: usize,
    pub recommended_p: usize,
    pub nondegenerate: Option<bool>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub verdict: Option<Verdict>,
    pub solve: Option<SolveReport>,
    pub certificate: Option<DualCertificate>,
    pub face: Option<FaceReport>,
    pub factor: Option<FactorFile>,
    /// TRS minimizer recovered from the factor.
    pub trs_solution: Option<Vec<f64>>,
    pub diagnosis: Option<Diagnosis>,
    pub oracle: Option<OracleResult>,
}

impl Report {
    fn new(manifest: RunManifest) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            manifest,
            verdict: None,
            solve: None,
            certificate: None,
            face: None,
            factor: None,
            trs_solution: None,
            diagnosis: None,
            oracle: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match &self.verdict {
            Some(Verdict::Inconclusive) => EXIT_INCONCLUSIVE,
            _ => EXIT_OK,
        }
    }
}

/// Runs the CLI on raw arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    let (report, output) = match command {
        Command::Solve(a) => {
            let out = a.common.output.clone();
            (cmd_solve(a)?, out)
        }
        Command::Certify(a) => {
            let out = a.common.output.clone();
            (cmd_certify(a)?, out)
        }
        Command::Diagnose(a) => {
            let out = a.common.output.clone();
            (cmd_diagnose(a)?, out)
        }
        Command::Oracle(a) => {
            let out = a.common.output.clone();
            (cmd_oracle(a)?, out)
        }
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Extraction(e.to_string()))?;
    match output {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(report.exit_code())
}

/// Parses `--p`.
pub fn parse_schedule(text: &str) -> Result<PSchedule> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(PSchedule::Auto);
    }
    let ranks = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::InvalidOptions(format!("--p expects `auto` or ranks, got `{text}`")))?;
    Ok(PSchedule::Ranks(ranks))
}

fn options(common: &Common, schedule: PSchedule, max_iter: Option<usize>) -> SolverOptions {
    let mut opts = SolverOptions {
        eps_g: common.eps_g,
        eps_h: common.eps_h,
        seed: common.seed,
        p_schedule: schedule,
        ..Default::default()
    };
    if let Some(k) = max_iter {
        opts.max_outer = k;
    }
    opts
}

fn manifest(command: &str, spec: &ProblemSpec, factor: Option<PathBuf>, opts: &SolverOptions, common: &Common) -> RunManifest {
    RunManifest {
        command: command.into(),
        input: spec.input.clone(),
        problem: spec.clone(),
        factor,
        options: opts.clone(),
        seed: common.seed,
        gap_tol: common.gap_tol,
        output: common.output.clone(),
    }
}

/// Generator stream for built-in instances, separate from the solver's stream.
fn instance_rng(seed: u64) -> SeededRng {
    let mut rng = linalg::rng_from_seed(seed);
    rng.set_stream(1);
    rng
}

/// Loads the problem from `--input` or builds the requested family.
pub fn load_problem(spec: &ProblemSpec, seed: u64) -> Result<SdpProblem> {
    if let Some(path) = &spec.input {
        return io::read_problem(path);
    }
    let family = spec
        .family
        .ok_or_else(|| Error::InvalidOptions("either --input or --family is required".into()))?;
    let mut rng = instance_rng(seed);
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidOptions("--n must be positive".into()));
    }
    let graph_cost = |rng: &mut SeededRng| -> SymMatrix {
        match spec.graph {
            Graph::Cycle => instances::cycle_laplacian(n).scaled(-0.25),
            Graph::Complete => instances::complete_laplacian(n).scaled(-0.25),
            Graph::Gaussian => instances::gaussian_symmetric(rng, n),
        }
    };
    match family {
        FamilyKind::Maxcut => Ok(match spec.graph {
            Graph::Cycle => instances::maxcut_cycle(n),
            Graph::Complete => instances::maxcut_from_laplacian(&instances::complete_laplacian(n)),
            Graph::Gaussian => instances::maxcut_gaussian(&mut rng, n),
        }),
        FamilyKind::Orthocut => {
            if spec.d == 0 || !n.is_multiple_of(spec.d) {
                return Err(Error::InvalidOptions(format!("--n = {n} is not a multiple of --d = {}", spec.d)));
            }
            let cost = graph_cost(&mut rng);
            build_family(ProblemFamily::OrthoCut { d: spec.d, cost })
        }
        FamilyKind::Trs => match spec.instance {
            InstanceKind::Random => Ok(instances::trs_random(&mut rng, n)),
            InstanceKind::Hard => Ok(instances::trs_hard(&mut rng, n, 1)),
            InstanceKind::Suboptimal => Ok(instances::trs_suboptimal()),
        },
        FamilyKind::Geneig => Ok(instances::geneig_random(&mut rng, n)),
        FamilyKind::Spheres => {
            let sizes = if spec.sizes.is_empty() { vec![n] } else { spec.sizes.clone() };
            Ok(instances::spheres_random(&mut rng, &sizes, spec.homogeneous))
        }
    }
}

fn read_factor(problem: &SdpProblem, path: &Path) -> Result<DMatrix<f64>> {
    let y = io::read_factor(path)?;
    if y.nrows() != problem.n() {
        return Err(Error::DimensionMismatch {
            what: "factor rows",
            expected: problem.n(),
            got: y.nrows(),
        });
    }
    Ok(y)
}

fn resize(y: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(y.nrows(), p);
    let keep = y.ncols().min(p);
    out.columns_mut(0, keep).copy_from(&y.columns(0, keep));
    out
}

/// The crafted TRS start: its local minimizer, nudged by a seeded tangent
/// perturbation of size `1e-2` and renormalized.
fn suboptimal_trs_start(seed: u64, p: usize) -> DMatrix<f64> {
    let mut rng = instance_rng(seed);
    let mut y = resize(&instances::trs_suboptimal_point(), p);
    let n = y.nrows() - 1;
    let angle: f64 = rng.random_range(-1e-2..1e-2);
    let (c, s) = (angle.cos(), angle.sin());
    let top = y.view((0, 0), (n, p)).into_owned();
    let rotated = DMatrix::from_fn(n, p, |i, k| match i {
        0 => c * top[(0, k)] - s * top[(1, k)],
        1 => s * top[(0, k)] + c * top[(1, k)],
        _ => top[(i, k)],
    });
    y.view_mut((0, 0), (n, p)).copy_from(&rotated);
    y
}

fn first_rank(problem: &SdpProblem, schedule: &PSchedule) -> usize {
    match schedule {
        PSchedule::Auto => solver::auto_start_rank(problem),
        PSchedule::Ranks(r) => r[0],
    }
}

fn cmd_solve(args: SolveArgs) -> Result<Report> {
    let schedule = parse_schedule(&args.p)?;
    let opts = options(&args.common, schedule, args.max_iter);
    opts.validate()?;
    let problem = load_problem(&args.problem, args.common.seed)?;
    let mut report = Report::new(manifest("solve", &args.problem, args.init.clone(), &opts, &args.common));
    let p0 = first_rank(&problem, &opts.p_schedule);
    let crafted = args.problem.input.is_none()
        && args.problem.family == Some(FamilyKind::Trs)
        && args.problem.instance == InstanceKind::Suboptimal;
    let y0 = if let Some(path) = &args.init {
        resize(&read_factor(&problem, path)?, p0)
    } else if crafted {
        suboptimal_trs_start(args.common.seed, p0)
    } else {
        problem.feasible_point(p0, &mut linalg::rng_from_seed(opts.seed))?
    };
    let (y, mut solve) = solver::staircase_from(&problem, Factor::new(&problem, y0)?, &opts)?;
    let mut cert = solve.certificate.take();
    if let Some(c) = cert.as_mut() {
        let (tol_g, tol_h) = (c.tol_g, c.tol_h);
        c.retolerance(tol_g, tol_h, args.common.gap_tol);
    }
    report.verdict = cert.as_ref().map(|c| c.verdict.clone());
    report.face = solve.face.take();
    report.certificate = cert;
    if matches!(problem.family(), Some(FamilyTag::Trs)) {
        report.trs_solution = extract_trs(&problem, &y).ok().map(|x| x.iter().copied().collect());
    }
    report.factor = Some(FactorFile::from_matrix(y.y()));
    report.solve = Some(solve);
    Ok(report)
}

fn cmd_certify(args: CertifyArgs) -> Result<Report> {
    let opts = options(&args.common, PSchedule::Auto, None);
    opts.validate()?;
    let problem = load_problem(&args.problem, args.common.seed)?;
    let mut report = Report::new(manifest("certify", &args.problem, Some(args.factor.clone()), &opts, &args.common));
    let factor = Factor::new(&problem, read_factor(&problem, &args.factor)?)?;
    let cert = solver::stage_certificate(&problem, &factor, opts.eps_g_for(&problem), opts.eps_h_for(&problem));
    let mut cert = cert;
    let (tol_g, tol_h) = (cert.tol_g, cert.tol_h);
    cert.retolerance(tol_g, tol_h, args.common.gap_tol);
    report.verdict = Some(cert.verdict.clone());
    report.face = face_dimension(&problem, &factor).ok();
    report.certificate = Some(cert);
    if matches!(problem.family(), Some(FamilyTag::Trs)) {
        report.trs_solution = extract_trs(&problem, &factor).ok().map(|x| x.iter().copied().collect());
    }
    Ok(report)
}

/// Rank diagnostics. Sampling happens at the recommended rank, or at the
/// supplied factor.
pub fn diagnose(problem: &SdpProblem, factor: Option<DMatrix<f64>>, samples: usize, seed: u64) -> Result<Diagnosis> {
    let span_rank = problem.constraint_span_rank();
    let mut warnings = Vec::new();
    if span_rank < problem.m() {
        let combo = problem.dependent_combination().unwrap_or_default();
        warnings.push(format!(
            "constraint matrices span only {span_rank} of {} dimensions: {combo}",
            problem.m()
        ));
    }
    let start_p = solver::auto_start_rank(problem);
    let (smoothness, nondegenerate) = match factor {
        Some(y) => {
            let f = Factor::new(problem, y)?;
            let mut rng = linalg::rng_from_seed(seed);
            let rep = model::check_smoothness_at(problem, &[f.y().clone()], None, &mut rng);
            let nondeg = certify::check_nondegeneracy(problem, &f).ok();
            (rep, nondeg)
        }
        None => (model::check_smoothness(problem, start_p, samples, seed)?, None),
    };
    if !smoothness.constant_rank {
        warnings.push(format!(
            "rank of {{A_i Y}} varies across samples: {:?}",
            smoothness.observed_ranks
        ));
    }
    let m_prime = smoothness.m_prime.unwrap_or(span_rank);
    if m_prime < problem.m() {
        warnings.push(format!("m' = {m_prime} < m = {}", problem.m()));
    }
    let pataki = pataki_bound(m_prime);
    let mut recommended = (pataki + 1).min(problem.n() + 1);
    if let Some(FamilyTag::OrthoCut { d }) = problem.family() {
        recommended = recommended.max(*d);
    }
    Ok(Diagnosis {
        n: problem.n(),
        m: problem.m(),
        span_rank,
        smoothness,
        pataki_bound: pataki,
        recommended_p: recommended,
        nondegenerate,
        warnings,
    })
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<Report> {
    let opts = options(&args.common, PSchedule::Auto, None);
    let problem = load_problem(&args.problem, args.common.seed)?;
    let mut report = Report::new(manifest("diagnose", &args.problem, args.factor.clone(), &opts, &args.common));
    let factor = match &args.factor {
        Some(path) => Some(read_factor(&problem, path)?),
        None => None,
    };
    let diag = diagnose(&problem, factor, args.samples, args.common.seed)?;
    for w in &diag.warnings {
        eprintln!("warning: {w}");
    }
    report.diagnosis = Some(diag);
    Ok(report)
}

/// Picks the closed-form oracle when the family has one, else escalation.
pub fn run_oracle(problem: &SdpProblem, force_escalation: bool, seed: u64) -> Result<OracleResult> {
    if !force_escalation {
        if let Some(tag @ (FamilyTag::GenEig | FamilyTag::Trs)) = problem.family() {
            match family_from_tag(tag, problem.cost_matrix().clone(), problem.constraints())? {
                ProblemFamily::GenEig { c, b } => return oracle::oracle_geneig(&c, &b),
                ProblemFamily::Trs { a, b, c } => return oracle::oracle_trs(&a, &b, c),
                _ => {}
            }
        }
    }
    oracle::oracle_sdp_via_escalation(problem, None, seed)
}

fn cmd_oracle(args: OracleArgs) -> Result<Report> {
    let opts = options(&args.common, PSchedule::Auto, None);
    let problem = load_problem(&args.problem, args.common.seed)?;
    let mut report = Report::new(manifest("oracle", &args.problem, None, &opts, &args.common));
    report.oracle = Some(run_oracle(&problem, args.escalation, args.common.seed)?);
    Ok(report)
}
