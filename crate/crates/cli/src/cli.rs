//! Argument parsing and dispatch. Kept in the library (rather than the
//! binary) so integration tests can run the full command path in-process
//! and check exit codes without spawning.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use qpgames::numerics::{Rational, Scalar};

use crate::commands::{
    self, BridgeArgs, BridgeDirection, CmdOutcome, GenArgs, GlobalOpts, PipelineArgs, ReduceArgs,
    SolveArgs, SolverChoice, VerifyArgs,
};
use crate::format::{to_canonical_json, InstanceKind};

#[derive(Debug, Parser)]
#[command(
    name = "qpgames",
    version,
    about = "Generate, verify, reduce, solve, and bridge quadratic programs and bimatrix games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance ε as an exact rational ("1/1000") or decimal ("0.001").
    #[arg(long, global = true, default_value = "1/1000")]
    eps: String,

    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for batch directories (default: one per CPU).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Verify in exact rational arithmetic (the default).
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,

    /// Verify in f64 arithmetic and skip exact certification of solves.
    #[arg(long, global = true)]
    float: bool,

    /// Record the solver trace in the report.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(name = "box_qp")]
    BoxQp,
    #[value(name = "simplex_qp")]
    SimplexQp,
    #[value(name = "bimatrix_game")]
    BimatrixGame,
}

impl From<KindArg> for InstanceKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::BoxQp => InstanceKind::BoxQp,
            KindArg::SimplexQp => InstanceKind::SimplexQp,
            KindArg::BimatrixGame => InstanceKind::BimatrixGame,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Pgd,
    FrankWolfe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    GameToQp,
    QpToGame,
    ImitationForward,
    ImitationBackward,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded random instance with exact rational payloads.
    Gen {
        /// Instance family.
        #[arg(value_enum)]
        kind: KindArg,
        /// Dimension (rows, for games).
        #[arg(long)]
        n: usize,
        /// Columns for games; defaults to n.
        #[arg(long)]
        m: Option<usize>,
        /// Game shape: column payoffs are the transpose of row payoffs.
        #[arg(long)]
        symmetric: bool,
        /// Game shape: both players receive the row player's payoffs.
        #[arg(long)]
        common_payoff: bool,
        /// Game shape: the column player is paid the identity.
        #[arg(long)]
        imitation: bool,
        /// Write the instance here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a point (or profile) against an instance; exit 0 iff it passes.
    Verify {
        instance: PathBuf,
        point: PathBuf,
    },
    /// Construct the penalized simplex program and certificate from a box program.
    Reduce {
        instance: PathBuf,
        /// Where to write the constructed program (default: <stem>.reduced.json).
        #[arg(long)]
        out_instance: Option<PathBuf>,
        /// Where to write the certificate (default: <stem>.cert.json).
        #[arg(long)]
        out_cert: Option<PathBuf>,
    },
    /// Run a gradient method on a program; exit 0 iff it converged.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::Pgd)]
        solver: SolverArg,
        /// Use the fixed 1/L step instead of backtracking.
        #[arg(long)]
        fixed_step: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_iters: u64,
        #[arg(long, default_value_t = 10)]
        restarts: u32,
        /// Write the answer here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Reduce → solve at δ → audit → pull back → verify at ε.
    Pipeline {
        /// Instance file, or a directory of .json instances.
        instance: PathBuf,
        /// Audit this certificate instead of the derived one.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Iteration budget for the float pre-solve.
        #[arg(long, default_value_t = 20_000)]
        pre_iters: u64,
        /// Iteration budget for the constructed-program fallback solve.
        #[arg(long, default_value_t = 100_000)]
        iters: u64,
        #[arg(long, default_value_t = 5)]
        restarts: u32,
        /// Write the pulled-back point here (single-file mode only).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Move between games and simplex programs, verifying both sides.
    Bridge {
        #[arg(value_enum)]
        direction: DirectionArg,
        instance: PathBuf,
        /// Point or profile to carry across the bridge.
        #[arg(long)]
        point: Option<PathBuf>,
        /// qp-to-game only: fold the linear term away and rescale to the
        /// unit simplex first, mapping ε alongside.
        #[arg(long)]
        prepare: bool,
        /// Where to write the converted instance.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Where to write the converted point.
        #[arg(long)]
        out_point: Option<PathBuf>,
    },
}

/// Parse arguments, run the command, print reports, and return the exit
/// status: 0 success/verified, 1 verification or convergence failure,
/// 2 malformed input or violated hypothesis.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version print to stdout with status 0; genuine
            // usage errors print to stderr with clap's status 2.
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };

    let eps = match Rational::parse(&cli.eps) {
        Ok(eps) => eps,
        Err(err) => {
            eprintln!("error: {err}");
            return commands::EXIT_INPUT;
        }
    };
    let opts = GlobalOpts {
        eps,
        seed: cli.seed,
        jobs: cli.jobs,
        float: cli.float && !cli.exact,
        trace: cli.trace,
    };

    let outcomes = match dispatch(cli.command, &opts) {
        Ok(outcomes) => outcomes,
        Err(err) => {
            eprintln!("error: {err}");
            return commands::EXIT_INPUT;
        }
    };
    let mut exit = commands::EXIT_OK;
    for outcome in &outcomes {
        match &outcome.payload {
            Some(payload) => print!("{payload}"),
            None => print!("{}", to_canonical_json(&outcome.report)),
        }
        exit = exit.max(outcome.exit);
    }
    exit
}

fn dispatch(command: Command, opts: &GlobalOpts) -> qpgames::Result<Vec<CmdOutcome>> {
    match command {
        Command::Gen {
            kind,
            n,
            m,
            symmetric,
            common_payoff,
            imitation,
            out,
        } => Ok(vec![commands::cmd_gen(
            opts,
            &GenArgs {
                kind: kind.into(),
                n,
                m,
                symmetric,
                common_payoff,
                imitation,
                out,
            },
        )?]),
        Command::Verify { instance, point } => Ok(vec![commands::cmd_verify(
            opts,
            &VerifyArgs { instance, point },
        )?]),
        Command::Reduce {
            instance,
            out_instance,
            out_cert,
        } => Ok(vec![commands::cmd_reduce(
            opts,
            &ReduceArgs {
                instance,
                out_instance,
                out_cert,
            },
        )?]),
        Command::Solve {
            instance,
            solver,
            fixed_step,
            max_iters,
            restarts,
            out,
        } => Ok(vec![commands::cmd_solve(
            opts,
            &SolveArgs {
                instance,
                solver: match solver {
                    SolverArg::Pgd => SolverChoice::Pgd,
                    SolverArg::FrankWolfe => SolverChoice::FrankWolfe,
                },
                fixed_step,
                max_iters,
                restarts,
                out,
            },
        )?]),
        Command::Pipeline {
            instance,
            cert,
            pre_iters,
            iters,
            restarts,
            out,
        } => commands::cmd_pipeline(
            opts,
            &PipelineArgs {
                instance,
                cert,
                pre_iters,
                iters,
                restarts,
                out,
            },
        ),
        Command::Bridge {
            direction,
            instance,
            point,
            prepare,
            out,
            out_point,
        } => Ok(vec![commands::cmd_bridge(
            opts,
            &BridgeArgs {
                direction: match direction {
                    DirectionArg::GameToQp => BridgeDirection::GameToQp,
                    DirectionArg::QpToGame => BridgeDirection::QpToGame,
                    DirectionArg::ImitationForward => BridgeDirection::ImitationForward,
                    DirectionArg::ImitationBackward => BridgeDirection::ImitationBackward,
                },
                instance,
                point,
                prepare,
                out,
                out_point,
            },
        )?]),
    }
}
