//! Command-line front end for the OCB toolkit.
//!
//! Subcommands:
//!
//! - `curves`: rate sweep to CSV, with an optional SVG plot.
//! - `simulate`: Monte Carlo link simulation to CSV.
//! - `verify`: the property checks, with a pass/fail report.
//!
//! Settings come from flags, optionally layered over a `key = value` file
//! given with `--config`. Every file-producing run writes a `<out>.manifest`
//! sidecar which can be passed back with `--config` to repeat the run.

use std::ffi::OsString;
use std::fmt::{self, Display};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ocb_core::{Spacing, Stage2Input, DEFAULT_QUAD_ORDER};

mod curves;
pub mod error;
pub mod manifest;
pub mod settings;
mod simulate;
pub mod svg;
mod verify;

pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
pub use settings::Settings;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "ocb",
    version,
    about = "Orthogonal cocktail BPSK rate curves, link simulation and checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Settings file of `key = value` lines (a run manifest works); flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Base seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; a `.manifest` sidecar is written next to it.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<String>,
    /// Worker threads, 0 for one per core. Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Gauss-Hermite nodes per noise dimension.
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the rate curves over an SNR grid.
    Curves(CurvesArgs),
    /// Simulate the two-stage OCB link.
    Simulate(SimulateArgs),
    /// Run the property checks and print the claimed-vs-exact gap table.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curves(_) => "curves",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
        }
    }

    fn default_out(&self) -> Option<&'static str> {
        match self {
            Command::Curves(_) => Some("curves.csv"),
            Command::Simulate(_) => Some("sim.csv"),
            Command::Verify(_) => None,
        }
    }
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid spacing, `log` or `linear`.
    #[arg(long)]
    pub spacing: Option<Spacing>,
    /// Also plot the curves to this SVG file.
    #[arg(long, value_name = "FILE")]
    pub svg: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Stream-1 codes, comma separated: `uncoded:M`, `rep:N`, `hamming74`,
    /// `ldpc[:N[:SEED]]` or `file:PATH`, a generator matrix of M lines of K
    /// bits each (codeword = G · source).
    #[arg(long)]
    pub code1: Option<ValueList<String>>,
    /// Stream-2 codes, paired with `--code1` in order (a single entry pairs with all).
    #[arg(long)]
    pub code2: Option<ValueList<String>>,
    /// SNRs `E_s/σ²` (linear), comma separated.
    #[arg(long)]
    pub gamma: Option<ValueList<f64>>,
    /// Constellation scale; each point has energy `2α²`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Blocks (codeword pairs) per row.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Stage-2 axis source: `reconstructed`, `raw-hard` or `genie`.
    #[arg(long)]
    pub stage2: Option<Stage2Input>,
    /// Parallel shards per row. Results do not depend on it.
    #[arg(long)]
    pub shards: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Allowed Monte Carlo deviation in standard errors.
    #[arg(long)]
    pub mc_sigmas: Option<f64>,
    /// Samples per Monte Carlo mutual-information estimate.
    #[arg(long)]
    pub mc_samples: Option<u64>,
    /// Tolerance of the exact rate identities, in bits.
    #[arg(long)]
    pub identity_tol: Option<f64>,
    /// Allowed deviation of the error-propagation rate from 1/2.
    #[arg(long)]
    pub propagation_tol: Option<f64>,
    /// Channel symbols per link check.
    #[arg(long)]
    pub link_symbols: Option<u64>,
}

/// Comma-separated values.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueList<T>(pub Vec<T>);

impl<T: FromStr> FromStr for ValueList<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let items = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<T>, String>>()?;
        if items.is_empty() {
            return Err("empty list".into());
        }
        Ok(Self(items))
    }
}

impl<T: Display> Display for ValueList<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Settings shared by all subcommands, after resolution.
#[derive(Clone, Debug)]
pub(crate) struct Common {
    pub seed: u64,
    pub threads: usize,
    pub quad_order: usize,
    pub out: Option<PathBuf>,
}

/// State handed to a subcommand.
pub(crate) struct Run {
    pub common: Common,
    pub settings: Settings,
    pub started: Instant,
}

impl Run {
    /// Resolves the remaining parameters into a manifest skeleton.
    pub fn manifest(self, command: &str) -> CliResult<(RunManifest, Common, Instant)> {
        let params = self.settings.finish()?;
        Ok((RunManifest::new(command, params), self.common, self.started))
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ocb: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> CliResult<()> {
    let started = Instant::now();
    let mut settings = match &cli.common.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    settings.expect_command(cli.command.name())?;
    let c = &cli.common;
    let common = Common {
        seed: settings.resolve("seed", c.seed, DEFAULT_SEED)?,
        threads: settings.resolve("threads", c.threads, 0)?,
        quad_order: settings.resolve("quad-order", c.quad_order, DEFAULT_QUAD_ORDER)?,
        out: match cli.command.default_out() {
            Some(default) => Some(settings.resolve("out", c.out.clone(), default.to_string())?),
            None => settings.resolve_opt("out", c.out.clone())?,
        }
        .map(PathBuf::from),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", common.threads)))?;
    let run = Run {
        common,
        settings,
        started,
    };
    pool.install(|| match &cli.command {
        Command::Curves(args) => curves::run(args, run),
        Command::Simulate(args) => simulate::run(args, run),
        Command::Verify(args) => verify::run(args, run),
    })
}
