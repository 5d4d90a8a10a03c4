//! The work behind each subcommand, separated from argument parsing so
//! integration tests can drive commands in-process.
//!
//! Exit-status contract, shared by every command:
//! `0` — success / everything verified; `1` — a verification or
//! convergence failure (the run itself was well-formed); `2` — malformed
//! input or a violated lemma hypothesis. Commands return `Err` only for
//! the exit-2 class; verdict failures come back as ordinary outcomes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qpgames::games::{
    classify, imitation_backward, imitation_forward, verify_wsne, MixedProfile,
};
use qpgames::generators::{self, GameShape};
use qpgames::numerics::{Rational, Scalar, Vector};
use qpgames::pipeline::{solve_box_via_reduction, PipelineBudget, PipelineOutcome};
use qpgames::qp::{
    homogenize, normalize_scale, verify_box_kkt, verify_simplex_kkt, BoxQp,
};
use qpgames::reductions::{
    audit_theorem_invariants, box_to_simplex, game_to_simplex_qp, simplex_qp_to_game,
    ReductionCertificate,
};
use qpgames::solvers::{
    certify_box, certify_simplex, frank_wolfe, pgd_box, pgd_simplex, SolveResult, SolverParams,
    StepRule,
};
use qpgames::{Error, Result};
use rayon::prelude::*;

use crate::format::{
    digest, parse_json, to_canonical_json, CertificateFile, InstanceFile, InstanceKind, PointFile,
    RunReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// What a command hands back: an exit status, the report, and — for
/// `gen` without an output path — raw payload text that replaces the
/// report on stdout.
#[derive(Debug, Clone)]
pub struct CmdOutcome {
    pub exit: i32,
    pub report: RunReport,
    pub payload: Option<String>,
}

impl CmdOutcome {
    fn new(exit: i32, report: RunReport) -> Self {
        CmdOutcome {
            exit,
            report,
            payload: None,
        }
    }
}

/// The global flags, already parsed. `eps` is exact; float paths convert
/// at the point of use.
#[derive(Debug, Clone)]
pub struct GlobalOpts {
    pub eps: Rational,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub float: bool,
    pub trace: bool,
}

impl GlobalOpts {
    fn eps_f64(&self) -> f64 {
        Scalar::to_f64(&self.eps)
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<(InstanceFile, String)> {
    let text = read_text(path)?;
    let file = parse_json::<InstanceFile>(&text, "instance")?;
    Ok((file, digest(text.as_bytes())))
}

fn load_point(path: &Path) -> Result<PointFile> {
    parse_json(&read_text(path)?, "point")
}

/// Serialize canonically, write, and record `path → digest` in the report.
fn write_artifact<T: serde::Serialize>(
    path: &Path,
    value: &T,
    report: &mut RunReport,
) -> Result<()> {
    let text = to_canonical_json(value);
    fs::write(path, &text)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
    report
        .outputs
        .insert(path.display().to_string(), digest(text.as_bytes()));
    Ok(())
}

/// Sibling path `<stem>.<suffix>.json` next to `input`.
fn derived_path(input: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    input.with_file_name(format!("{stem}.{suffix}.json"))
}

fn finish(report: &mut RunReport, started: Instant) {
    report.wall_time_ms = started.elapsed().as_millis() as u64;
}

// ---------------------------------------------------------------- gen --

#[derive(Debug, Clone)]
pub struct GenArgs {
    pub kind: InstanceKind,
    pub n: usize,
    pub m: Option<usize>,
    pub symmetric: bool,
    pub common_payoff: bool,
    pub imitation: bool,
    pub out: Option<PathBuf>,
}

impl GenArgs {
    fn shape(&self) -> Result<Option<GameShape>> {
        if self.kind != InstanceKind::BimatrixGame {
            if self.symmetric || self.common_payoff || self.imitation {
                return Err(Error::InvalidParams(format!(
                    "shape flags only apply to bimatrix_game, not {}",
                    self.kind
                )));
            }
            return Ok(None);
        }
        let shape = match (self.symmetric, self.common_payoff, self.imitation) {
            (false, false, false) => GameShape::General,
            (true, false, false) => GameShape::Symmetric,
            (false, true, false) => GameShape::CommonPayoff,
            (true, true, false) => GameShape::SymmetricCommonPayoff,
            (false, false, true) => GameShape::Imitation,
            _ => {
                return Err(Error::InvalidParams(
                    "--imitation cannot be combined with other shape flags".into(),
                ))
            }
        };
        Ok(Some(shape))
    }
}

/// Generate a seeded random instance. Artifacts are always written with
/// exact rational payloads, whatever the arithmetic flags say.
pub fn cmd_gen(opts: &GlobalOpts, args: &GenArgs) -> Result<CmdOutcome> {
    let started = Instant::now();
    let mut rng = generators::rng(opts.seed);
    let shape = args.shape()?;
    let mut file = match args.kind {
        InstanceKind::BoxQp => InstanceFile::from_box_qp(&generators::box_qp(&mut rng, args.n)?),
        InstanceKind::SimplexQp => {
            InstanceFile::from_simplex_qp(&generators::simplex_qp(&mut rng, args.n)?)
        }
        InstanceKind::BimatrixGame => {
            let m = args.m.unwrap_or(args.n);
            let shape = shape.expect("game kind always has a shape");
            InstanceFile::from_game(&generators::game(&mut rng, args.n, m, shape)?)
        }
    };
    file.metadata.insert("seed".into(), opts.seed.to_string());
    if let Some(shape) = shape {
        file.metadata
            .insert("shape".into(), format!("{shape:?}").to_lowercase());
    }

    let text = to_canonical_json(&file);
    let mut report = RunReport::new("gen");
    report.set_parameter("kind", args.kind);
    report.set_parameter("n", args.n);
    if let Some(m) = args.m {
        report.set_parameter("m", m);
    }
    report.set_parameter("seed", opts.seed);
    report.instance_digest = Some(digest(text.as_bytes()));

    let payload = match &args.out {
        Some(path) => {
            write_artifact(path, &file, &mut report)?;
            None
        }
        None => Some(text),
    };
    finish(&mut report, started);
    Ok(CmdOutcome {
        exit: EXIT_OK,
        report,
        payload,
    })
}

// ------------------------------------------------------------- verify --

#[derive(Debug, Clone)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    pub point: PathBuf,
}

fn verify_instance<S: Scalar>(
    file: &InstanceFile,
    point: &PointFile,
    eps: &S,
    report: &mut RunReport,
) -> Result<bool> {
    match file.kind {
        InstanceKind::BoxQp => {
            let qp = file.to_box_qp::<S>()?;
            let x = point.parse_point::<S>()?;
            let kkt = verify_box_kkt(&qp, &x, eps)?;
            report.absorb_kkt("kkt", &kkt);
            Ok(kkt.verdict)
        }
        InstanceKind::SimplexQp => {
            let qp = file.to_simplex_qp::<S>()?;
            let x = point.parse_point::<S>()?;
            let kkt = verify_simplex_kkt(&qp, &x, eps)?;
            report.absorb_kkt("kkt", &kkt);
            Ok(kkt.verdict)
        }
        InstanceKind::BimatrixGame => {
            let game = file.to_game::<S>()?;
            let (x, y) = point.parse_pair::<S>()?;
            let profile = MixedProfile::new(x, y)?;
            let verdict = verify_wsne(&game, &profile, eps)?;
            report.verdicts.insert("wsne".into(), verdict);
            Ok(verdict)
        }
    }
}

/// Check a point (or profile) against an instance; exit 0 iff it passes.
pub fn cmd_verify(opts: &GlobalOpts, args: &VerifyArgs) -> Result<CmdOutcome> {
    let started = Instant::now();
    let (file, instance_digest) = load_instance(&args.instance)?;
    let point = load_point(&args.point)?;

    let mut report = RunReport::new("verify");
    report.instance_digest = Some(instance_digest);
    report.set_parameter("instance", args.instance.display());
    report.set_parameter("point", args.point.display());
    report.set_parameter("eps", opts.eps.render());
    report.set_parameter("arithmetic", if opts.float { "float" } else { "exact" });

    let verdict = if opts.float {
        verify_instance(&file, &point, &opts.eps_f64(), &mut report)?
    } else {
        verify_instance(&file, &point, &opts.eps, &mut report)?
    };
    finish(&mut report, started);
    Ok(CmdOutcome::new(
        if verdict { EXIT_OK } else { EXIT_FAIL },
        report,
    ))
}

// ------------------------------------------------------------- reduce --

#[derive(Debug, Clone)]
pub struct ReduceArgs {
    pub instance: PathBuf,
    pub out_instance: Option<PathBuf>,
    pub out_cert: Option<PathBuf>,
}

/// Construct the penalized simplex program and its certificate from a
/// box program. Always exact: the certificate's δ is a derived rational,
/// never a float and never user-supplied.
pub fn cmd_reduce(opts: &GlobalOpts, args: &ReduceArgs) -> Result<CmdOutcome> {
    let started = Instant::now();
    let (file, instance_digest) = load_instance(&args.instance)?;
    let qp = file.to_box_qp::<Rational>()?;
    let (constructed, cert) = box_to_simplex(&qp, &opts.eps)?;

    let mut report = RunReport::new("reduce");
    report.instance_digest = Some(instance_digest);
    report.set_parameter("instance", args.instance.display());
    report.set_parameter("eps", opts.eps.render());
    report.set_parameter("n", cert.n());
    report.set_parameter("M", cert.big_m().render());
    report.set_parameter("delta", cert.delta().render());
    report.set_parameter("scale", cert.scale().render());

    let out_instance = args
        .out_instance
        .clone()
        .unwrap_or_else(|| derived_path(&args.instance, "reduced"));
    let out_cert = args
        .out_cert
        .clone()
        .unwrap_or_else(|| derived_path(&args.instance, "cert"));
    write_artifact(
        &out_instance,
        &InstanceFile::from_simplex_qp(&constructed),
        &mut report,
    )?;
    write_artifact(&out_cert, &CertificateFile::from_certificate(&cert), &mut report)?;
    report.verdicts.insert("reduce".into(), true);
    finish(&mut report, started);
    Ok(CmdOutcome::new(EXIT_OK, report))
}

// -------------------------------------------------------------- solve --

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Pgd,
    FrankWolfe,
}

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub instance: PathBuf,
    pub solver: SolverChoice,
    pub fixed_step: bool,
    pub max_iters: u64,
    pub restarts: u32,
    pub out: Option<PathBuf>,
}

/// Run a gradient method on a quadratic program; exit 0 iff it converged
/// (the verifier accepted an iterate at ε). In exact mode the float
/// answer is also certified to a rational point, written in place of the
/// float one when certification succeeds.
pub fn cmd_solve(opts: &GlobalOpts, args: &SolveArgs) -> Result<CmdOutcome> {
    let started = Instant::now();
    let (file, instance_digest) = load_instance(&args.instance)?;

    let mut params = SolverParams::new(opts.eps_f64());
    params.step_rule = if args.fixed_step {
        StepRule::Fixed
    } else {
        StepRule::Backtracking
    };
    params.max_iters = args.max_iters;
    params.restarts = args.restarts;
    params.rng_seed = opts.seed;
    params.record_trace = opts.trace;

    let mut report = RunReport::new("solve");
    report.instance_digest = Some(instance_digest);
    report.set_parameter("instance", args.instance.display());
    report.set_parameter("eps", opts.eps.render());
    report.set_parameter("seed", opts.seed);
    report.set_parameter(
        "solver",
        match args.solver {
            SolverChoice::Pgd => "pgd",
            SolverChoice::FrankWolfe => "frank-wolfe",
        },
    );
    report.set_parameter("step", if args.fixed_step { "fixed" } else { "backtracking" });
    report.set_parameter("max_iters", args.max_iters);
    report.set_parameter("restarts", args.restarts);

    // The iteration itself always runs in floats; `run` carries the
    // float verdict that decides the exit status.
    let run: SolveResult;
    let mut out_point: PointFile;
    match file.kind {
        InstanceKind::BoxQp => {
            if args.solver == SolverChoice::FrankWolfe {
                return Err(Error::InvalidParams(
                    "the vertex method needs a simplex; box programs use pgd".into(),
                ));
            }
            run = pgd_box(&file.to_box_qp::<f64>()?, &params)?;
            out_point = PointFile::from_vector(&run.point);
            if !opts.float {
                let qp = file.to_box_qp::<Rational>()?;
                let (exact, kkt) = certify_box(&qp, &run.point, &opts.eps)?;
                report.verdicts.insert("certified".into(), kkt.verdict);
                if kkt.verdict {
                    out_point = PointFile::from_vector(&exact);
                }
            }
        }
        InstanceKind::SimplexQp => {
            let qp = file.to_simplex_qp::<f64>()?;
            run = match args.solver {
                SolverChoice::Pgd => pgd_simplex(&qp, &params)?,
                SolverChoice::FrankWolfe => frank_wolfe(&qp, &params)?,
            };
            out_point = PointFile::from_vector(&run.point);
            if !opts.float {
                let qp = file.to_simplex_qp::<Rational>()?;
                let (exact, kkt) = certify_simplex(&qp, &run.point, &opts.eps)?;
                report.verdicts.insert("certified".into(), kkt.verdict);
                if kkt.verdict {
                    out_point = PointFile::from_vector(&exact);
                    if let Some(u) = &kkt.dual_value {
                        out_point = out_point.with_dual(u);
                    }
                }
            }
        }
        InstanceKind::BimatrixGame => {
            return Err(Error::InvalidParams(
                "games are not solved directly; bridge to a simplex program first".into(),
            ));
        }
    }

    report.absorb_kkt("converged", &run.report);
    report.iterations = Some(run.iterations);
    if let Some(trace) = &run.trace {
        report.absorb_trace(trace);
    }
    if let Some(path) = &args.out {
        write_artifact(path, &out_point, &mut report)?;
    }
    finish(&mut report, started);
    Ok(CmdOutcome::new(
        if run.converged { EXIT_OK } else { EXIT_FAIL },
        report,
    ))
}

// ----------------------------------------------------------- pipeline --

#[derive(Debug, Clone)]
pub struct PipelineArgs {
    pub instance: PathBuf,
    pub cert: Option<PathBuf>,
    pub pre_iters: u64,
    pub iters: u64,
    pub restarts: u32,
    pub out: Option<PathBuf>,
}

/// Reduce → solve at δ → audit → pull back → verify at ε. A directory
/// runs every `.json` instance inside it (see `--jobs`); a single file
/// runs alone. Exit 0 iff every stage of every instance passes.
pub fn cmd_pipeline(opts: &GlobalOpts, args: &PipelineArgs) -> Result<Vec<CmdOutcome>> {
    if args.instance.is_dir() {
        if args.out.is_some() {
            return Err(Error::InvalidParams(
                "--out is ambiguous for a batch directory".into(),
            ));
        }
        let mut paths: Vec<PathBuf> = fs::read_dir(&args.instance)
            .map_err(|e| {
                Error::Parse(format!("cannot read {}: {e}", args.instance.display()))
            })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(Error::InvalidParams(format!(
                "{} contains no .json instances",
                args.instance.display()
            )));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidParams(format!("cannot size worker pool: {e}")))?;
        return Ok(pool.install(|| {
            paths
                .par_iter()
                .map(|path| pipeline_one(opts, args, path).unwrap_or_else(|e| malformed(path, e)))
                .collect()
        }));
    }
    Ok(vec![pipeline_one(opts, args, &args.instance)?])
}

/// A batch entry that failed before the pipeline proper could start.
fn malformed(path: &Path, err: Error) -> CmdOutcome {
    let mut report = RunReport::new("pipeline");
    report.set_parameter("instance", path.display());
    report.set_parameter("error", err);
    report.stage = Some("parse".into());
    CmdOutcome::new(EXIT_INPUT, report)
}

fn pipeline_one(opts: &GlobalOpts, args: &PipelineArgs, path: &Path) -> Result<CmdOutcome> {
    let started = Instant::now();
    let (file, instance_digest) = load_instance(path)?;
    let qp = file.to_box_qp::<Rational>()?;
    let budget = PipelineBudget {
        pre_solve_iters: args.pre_iters,
        solve_iters: args.iters,
        restarts: args.restarts,
        rng_seed: opts.seed,
    };
    let outcome = solve_box_via_reduction(&qp, &opts.eps, &budget)?;

    let mut report = RunReport::new("pipeline");
    report.instance_digest = Some(instance_digest);
    report.set_parameter("instance", path.display());
    report.set_parameter("eps", opts.eps.render());
    report.set_parameter("seed", opts.seed);
    report.set_parameter("n", qp.n());
    report.set_parameter("M", outcome.certificate.big_m().render());
    report.set_parameter("delta", outcome.certificate.delta().render());
    report.set_parameter("pre_iters", args.pre_iters);
    report.set_parameter("iters", args.iters);
    report.set_parameter("restarts", args.restarts);
    report.iterations = Some(outcome.float_iterations);

    let mut audit_pass = outcome
        .audit
        .as_ref()
        .is_some_and(|audit| audit.all_pass());
    if let Some(cert_path) = &args.cert {
        // Audit a supplied certificate instead of the derived one. A
        // forged certificate fails here, not at parse time: invariants
        // are the audit stage's verdict.
        let supplied = parse_json::<CertificateFile>(&read_text(cert_path)?, "certificate")?
            .to_certificate()?;
        report.set_parameter("cert", cert_path.display());
        audit_pass = audit_supplied(&qp, &opts.eps, &supplied, &outcome);
    }

    report
        .verdicts
        .insert("solve".into(), outcome.reduced_report.verdict);
    report.verdicts.insert("audit".into(), audit_pass);
    report.absorb_kkt("verify", &outcome.box_report);

    let all_pass = outcome.reduced_report.verdict && audit_pass && outcome.box_report.verdict;
    if !all_pass {
        let stage = if !outcome.reduced_report.verdict {
            "solve"
        } else if !audit_pass {
            "audit"
        } else {
            "verify"
        };
        report.stage = Some(stage.into());
    }
    if let Some(out) = &args.out {
        write_artifact(out, &PointFile::from_vector(&outcome.pulled_back), &mut report)?;
    }
    finish(&mut report, started);
    Ok(CmdOutcome::new(
        if all_pass { EXIT_OK } else { EXIT_FAIL },
        report,
    ))
}

/// Whether a supplied certificate both matches the program and passes the
/// theorem audit against the points the pipeline actually produced.
fn audit_supplied(
    qp: &BoxQp<Rational>,
    eps: &Rational,
    supplied: &ReductionCertificate<Rational>,
    outcome: &PipelineOutcome,
) -> bool {
    if supplied.validate_for(qp).is_err() {
        return false;
    }
    let Ok((constructed, _)) = box_to_simplex(qp, eps) else {
        return false;
    };
    audit_theorem_invariants(
        supplied,
        &constructed,
        &outcome.reduced_point,
        &outcome.reduced_report,
    )
    .map(|audit| audit.all_pass())
    .unwrap_or(false)
}

// ------------------------------------------------------------- bridge --

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BridgeDirection {
    GameToQp,
    QpToGame,
    ImitationForward,
    ImitationBackward,
}

#[derive(Debug, Clone)]
pub struct BridgeArgs {
    pub direction: BridgeDirection,
    pub instance: PathBuf,
    pub point: Option<PathBuf>,
    pub prepare: bool,
    pub out: Option<PathBuf>,
    pub out_point: Option<PathBuf>,
}

/// Move between games and simplex programs, verifying on both sides of
/// the bridge when a point is supplied. Bridges run in exact arithmetic:
/// every check here is a lemma hypothesis or conclusion.
pub fn cmd_bridge(opts: &GlobalOpts, args: &BridgeArgs) -> Result<CmdOutcome> {
    let started = Instant::now();
    let (file, instance_digest) = load_instance(&args.instance)?;
    let mut report = RunReport::new("bridge");
    report.instance_digest = Some(instance_digest);
    report.set_parameter("instance", args.instance.display());
    report.set_parameter("eps", opts.eps.render());
    report.set_parameter(
        "direction",
        match args.direction {
            BridgeDirection::GameToQp => "game-to-qp",
            BridgeDirection::QpToGame => "qp-to-game",
            BridgeDirection::ImitationForward => "imitation-forward",
            BridgeDirection::ImitationBackward => "imitation-backward",
        },
    );

    match args.direction {
        BridgeDirection::GameToQp => bridge_game_to_qp(opts, args, &file, &mut report)?,
        BridgeDirection::QpToGame => bridge_qp_to_game(opts, args, &file, &mut report)?,
        BridgeDirection::ImitationForward => bridge_imitation(opts, args, &file, &mut report, true)?,
        BridgeDirection::ImitationBackward => {
            bridge_imitation(opts, args, &file, &mut report, false)?
        }
    }

    let all = report.verdicts.values().all(|v| *v);
    finish(&mut report, started);
    Ok(CmdOutcome::new(
        if all { EXIT_OK } else { EXIT_FAIL },
        report,
    ))
}

/// Symmetric common-payoff game → the simplex program minimizing −xᵀAx.
/// With a point: the equivalence says the two verdicts must agree, so
/// both are checked and reported.
fn bridge_game_to_qp(
    opts: &GlobalOpts,
    args: &BridgeArgs,
    file: &InstanceFile,
    report: &mut RunReport,
) -> Result<()> {
    let game = file.to_game::<Rational>()?;
    let class = classify(&game);
    if !(class.symmetric && class.common_payoff) {
        return Err(Error::Hypothesis(
            "the equivalence needs a symmetric common-payoff game".into(),
        ));
    }
    let qp = game_to_simplex_qp(game.a())?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| derived_path(&args.instance, "qp"));
    write_artifact(&out, &InstanceFile::from_simplex_qp(&qp), report)?;

    if let Some(point_path) = &args.point {
        let x: Vector<Rational> = load_point(point_path)?.parse_point()?;
        let wsne = verify_wsne(&game, &MixedProfile::symmetric(x.clone())?, &opts.eps)?;
        report.verdicts.insert("wsne".into(), wsne);
        let kkt = verify_simplex_kkt(&qp, &x, &opts.eps)?;
        report.absorb_kkt("kkt", &kkt);
    }
    Ok(())
}

/// Simplex program → symmetric common-payoff game with payoffs in [0,1].
/// `--prepare` first folds the linear term away and rescales to the unit
/// simplex; tolerances are mapped alongside the points.
fn bridge_qp_to_game(
    opts: &GlobalOpts,
    args: &BridgeArgs,
    file: &InstanceFile,
    report: &mut RunReport,
) -> Result<()> {
    let original = file.to_simplex_qp::<Rational>()?;
    let (canonical, scale_map) = if args.prepare {
        let (qp, map) = normalize_scale(&homogenize(&original));
        (qp, Some(map))
    } else {
        (original.clone(), None)
    };
    let (game, payoff_map) = simplex_qp_to_game(&canonical)?;
    let eps_canonical = match &scale_map {
        Some(map) => map.to_canonical_tolerance(&opts.eps),
        None => opts.eps.clone(),
    };
    let eps_game = payoff_map.map_tolerance(&eps_canonical);
    report.set_parameter("payoff_offset", payoff_map.offset().render());
    report.set_parameter("payoff_span", payoff_map.span().render());
    report.set_parameter("eps_game", eps_game.render());

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| derived_path(&args.instance, "game"));
    write_artifact(&out, &InstanceFile::from_game(&game), report)?;

    if let Some(point_path) = &args.point {
        let x: Vector<Rational> = load_point(point_path)?.parse_point()?;
        let kkt = verify_simplex_kkt(&original, &x, &opts.eps)?;
        report.absorb_kkt("kkt", &kkt);
        let mapped = match &scale_map {
            Some(map) => map.to_canonical_point(&x),
            None => x.clone(),
        };
        let wsne = verify_wsne(&game, &MixedProfile::symmetric(mapped.clone())?, &eps_game)?;
        report.verdicts.insert("wsne".into(), wsne);
        if let Some(out_point) = &args.out_point {
            write_artifact(out_point, &PointFile::from_vector(&mapped), report)?;
        }
    }
    Ok(())
}

/// The imitation bridges. Forward: a symmetric equilibrium strategy `y`
/// becomes the profile (uniform-on-support(y), y) of the imitation game.
/// Backward: a profile of the imitation game surrenders its `y` part,
/// provided ε < 1/n. Both directions verify input and output internally;
/// hypothesis failures surface as exit 2.
fn bridge_imitation(
    opts: &GlobalOpts,
    args: &BridgeArgs,
    file: &InstanceFile,
    report: &mut RunReport,
    forward: bool,
) -> Result<()> {
    let game = file.to_game::<Rational>()?;
    let point_path = args.point.as_ref().ok_or_else(|| {
        Error::InvalidParams("imitation bridges need --point <file>".into())
    })?;
    let point = load_point(point_path)?;

    let out_point = args
        .out_point
        .clone()
        .unwrap_or_else(|| derived_path(&args.instance, "bridged"));
    if forward {
        let y: Vector<Rational> = point.parse_point()?;
        let profile = imitation_forward(game.a(), &y, &opts.eps)?;
        report.verdicts.insert("imitation_wsne".into(), true);
        write_artifact(
            &out_point,
            &PointFile::from_pair(profile.x(), profile.y()),
            report,
        )?;
    } else {
        let (x, y) = point.parse_pair::<Rational>()?;
        let recovered = imitation_backward(game.a(), &MixedProfile::new(x, y)?, &opts.eps)?;
        report.verdicts.insert("symmetric_wsne".into(), true);
        write_artifact(&out_point, &PointFile::from_vector(&recovered), report)?;
    }
    Ok(())
}
