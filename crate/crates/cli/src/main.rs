//! `symmlab`: runs rearrangement and comparison checks and writes JSON-lines
//! reports plus a summary table.
//!
//! Exit codes: 0 when every check met its expectation, 1 on any unexpected
//! outcome, 2 on usage or configuration errors.

mod commands;
mod sink;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use symmlab::suite::DEFAULT_SEED;
use symmlab::Mode;

use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "symmlab", version, about = "Numerical checks of symmetrization inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Hardy-Littlewood inequality on a ground space.
    VerifyHl,
    /// Heat-kernel convolution inequality, one report per time.
    VerifyConv,
    /// Dirichlet energy does not increase under rearrangement.
    VerifyDirichlet,
    /// Searches for a Dirichlet-energy violation for each order.
    Counterexample,
    /// Searches for an order under which the convolution inequality holds.
    ValidOrder,
    /// Dirichlet eigenvalues of connected subsets of a regular tree.
    FaberKrahn,
    /// Iterated polarization converges to the rearrangement.
    Polarize,
    /// Distributional inequality for rearranged solutions.
    Proposition,
    /// Elliptic comparison against the symmetrized problem.
    CompareElliptic,
    /// Parabolic comparison against the symmetrized problem.
    CompareParabolic,
    /// Grid Poisson comparison against the equal-area disk.
    Continuum,
    /// The full acceptance suite.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyHl => "verify-hl",
            Command::VerifyConv => "verify-conv",
            Command::VerifyDirichlet => "verify-dirichlet",
            Command::Counterexample => "counterexample",
            Command::ValidOrder => "valid-order",
            Command::FaberKrahn => "faber-krahn",
            Command::Polarize => "polarize",
            Command::Proposition => "proposition",
            Command::CompareElliptic => "compare-elliptic",
            Command::CompareParabolic => "compare-parabolic",
            Command::Continuum => "continuum",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Space shorthand: line:N, cycle:M, tree:D,R, octahedron, cube, hypercube:D,
    /// torus:M,D; `M*N` for problems; a shape for `continuum`.
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// JSON config: a space, a problem or a grid, depending on the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Comma-separated times (the horizon for `compare-parabolic`).
    #[arg(long, global = true, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// exhaustive-indicators, random-functions or gradient-ascent.
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// canonical, exhaustive, lex, graded, graded-reversed, or `;`-separated permutations.
    #[arg(long, global = true)]
    pub orders: Option<String>,
    /// Report file; SYMMLAB_OUT takes precedence.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all processors).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

fn dispatch(command: Command, opts: &Options) -> Result<Vec<sink::Entry>, Failure> {
    match command {
        Command::VerifyHl => commands::verify_hl(opts),
        Command::VerifyConv => commands::verify_conv(opts),
        Command::VerifyDirichlet => commands::verify_dirichlet(opts),
        Command::Counterexample => commands::counterexample(opts),
        Command::ValidOrder => commands::valid_order(opts),
        Command::FaberKrahn => commands::faber_krahn(opts),
        Command::Polarize => commands::polarize(opts),
        Command::Proposition => commands::proposition(opts),
        Command::CompareElliptic => commands::compare_elliptic_cmd(opts),
        Command::CompareParabolic => commands::compare_parabolic_cmd(opts),
        Command::Continuum => commands::continuum(opts),
        Command::All => commands::all(opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    let opts = cli.options;
    if let Some(jobs) = opts.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = std::env::var_os("SYMMLAB_OUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or_else(|| opts.out.clone());
    let entries = match dispatch(cli.command, &opts) {
        Ok(entries) => entries,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let lines = sink::render_lines(&entries, cli.command.name(), opts.seed);
    let table = sink::summary_table(&entries);
    if let Err(e) = sink::emit(&lines, &table, out.as_deref()) {
        eprintln!("error: cannot write reports: {e}");
        return ExitCode::from(2);
    }
    if entries.iter().all(|e| e.ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
