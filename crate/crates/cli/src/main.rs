//! `pdlab`: apply type 1,1 operators, inspect their decompositions and run
//! the scripted experiments from the command line.

mod commands;
mod context;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use context::CliError;

#[derive(Debug, Parser)]
#[command(name = "pdlab", version, about = "Type 1,1 pseudo-differential operators on the discrete torus")]
struct Cli {
    /// JSON run configuration (grid, frame, symbol, experiment, thresholds).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set frame.R=2.5 --set grid.N=512`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

/// Where the input grid function comes from.
#[derive(Debug, Args, Clone)]
pub struct InputArgs {
    /// Grid function file (`.pdgf` or `.json`).
    #[arg(long, value_name = "FILE", conflicts_with = "mode")]
    pub input: Option<PathBuf>,

    /// Generated input such as `single:eta=32`, `random:seed=1,radius=8`,
    /// `shell:seed=1,lo=8,hi=16`, `bump:radius=8`, `white:seed=2`, `trig:seed=3,radius=4`.
    #[arg(long, value_name = "SPEC")]
    pub mode: Option<String>,
}

#[derive(Debug, Args, Clone)]
pub struct SymbolArg {
    /// Symbol such as `ching:d=0,theta=+1,jmax=6`, `bessel:d=1`, `random:seed=3`,
    /// `elementary:file=a.json` or `table:file=a.pdsy`. Falls back to the config.
    #[arg(long, value_name = "SPEC")]
    pub symbol: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Auto,
    Direct,
    Separable,
    Spectrum,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ParadiffReport {
    Corona,
    Identity,
    Terms,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExperimentName {
    Counterexample,
    Wavefront,
    Continuity,
    Sigma,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply `a(x, D)` to an input and write the result.
    Apply {
        #[command(flatten)]
        symbol: SymbolArg,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_name = "FILE", default_value = "apply.pdgf")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Relative squared mass threshold for the reported output spectrum.
        #[arg(long, default_value_t = 1e-10)]
        tau: f64,
    },
    /// Vanishing frequency modulation sweep over a family of modulation functions.
    Vfm {
        #[command(flatten)]
        symbol: SymbolArg,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2)]
        psi_count: usize,
        #[arg(long, default_value_t = 12)]
        m_max: u32,
        /// Number of grid doublings for the refinement study (needs `--mode trig:...`).
        #[arg(long, default_value_t = 0)]
        refine: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Paradifferential split with identity and corona checks.
    Paradiff {
        #[command(flatten)]
        symbol: SymbolArg,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ParadiffReport::Corona)]
        report: ParadiffReport,
        /// Twisted diagonal constant for the lower bounds on the middle terms.
        #[arg(long)]
        tdc: Option<f64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Support rule through the kernel, or the spectral sumset rule.
    SupportRule {
        #[command(flatten)]
        symbol: SymbolArg,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1e-8)]
        tau: f64,
        #[arg(long)]
        spectral: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Pointwise estimates, written as CSV `x,lhs,rhs,ratio`.
    Pointwise {
        #[command(subcommand)]
        which: PointwiseCommand,
    },
    /// Besov, Lizorkin–Triebel or Sobolev norms of an input.
    Norms {
        /// Space such as `F:s=0.5,p=2,q=1`, `B:s=1,p=inf,q=inf` or `H:s=1`; repeatable.
        #[arg(long, required = true, value_name = "SPACE")]
        space: Vec<String>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run a scripted experiment and write its report.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        dat: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// Exact-identity gate suite.
    Selftest {
        /// Smaller grids; finishes within a minute.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum PointwiseCommand {
    /// `|a(x,D)u(x)|` against `F_a(x)u*(x)`.
    Factorize {
        #[command(flatten)]
        symbol: SymbolArg,
        #[command(flatten)]
        input: InputArgs,
        /// Decay exponent of the maximal function; defaults to `n/2 + 1`.
        #[arg(long)]
        n_exp: Option<f64>,
        /// Spectral radius `R`; defaults to the radius of the input.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// `‖u*‖_p` against `‖u‖_p` over a corpus of generated inputs.
    MaximalConstant {
        /// Input generators, repeatable; see `--mode`.
        #[arg(long = "member", required = true, value_name = "SPEC")]
        members: Vec<String>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        n_exp: f64,
        /// Skip the `N > n/p` hypothesis check.
        #[arg(long)]
        unchecked: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// `F_a(x)` against the Mihlin-type derivative sum.
    Mihlin {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 1.0)]
        n_exp: f64,
        #[arg(long, default_value_t = 8.0)]
        radius: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Decay of the symbol factor of the high-pass part `a_Q` in `Q`.
    MomentDecay {
        #[command(flatten)]
        symbol: SymbolArg,
        #[arg(long, default_value_t = 1.0)]
        n_exp: f64,
        #[arg(long, default_value_t = 16.0)]
        radius: f64,
        /// Claimed decay order `M`.
        #[arg(long, default_value_t = 2.0)]
        m: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0])]
        q: Vec<f64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = context::Context::load(cli.config.as_deref(), &cli.set)?;
    match cli.command {
        Command::Apply {
            symbol,
            input,
            out,
            method,
            tau,
        } => commands::apply_cmd(&ctx, &symbol, &input, &out, method, tau),
        Command::Vfm {
            symbol,
            input,
            psi_count,
            m_max,
            refine,
            out,
        } => commands::vfm(&ctx, &symbol, &input, psi_count, m_max, refine, out.as_deref()),
        Command::Paradiff {
            symbol,
            input,
            report,
            tdc,
            out,
        } => commands::paradiff(&ctx, &symbol, &input, report, tdc, out.as_deref()),
        Command::SupportRule {
            symbol,
            input,
            tau,
            spectral,
            out,
        } => commands::support_rule(&ctx, &symbol, &input, tau, spectral, out.as_deref()),
        Command::Pointwise { which } => commands::pointwise(&ctx, which),
        Command::Norms { space, input } => commands::norms(&ctx, &space, &input),
        Command::Experiment {
            name,
            out,
            csv,
            dat,
            svg,
        } => commands::experiment(&ctx, name, out, csv, dat, svg),
        Command::Selftest { quick } => selftest::run(&ctx, quick),
    }
}

fn main() -> ExitCode {
    pdlab::init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pdlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
