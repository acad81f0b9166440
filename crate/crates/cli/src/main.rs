#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod complex;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpw_core::ErrorClass;

use commands::Suite;
use config::{ConfigError, RunConfig};

/// Exit codes.
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(dpw_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn config(msg: &str) -> Self {
        CliError::Config(ConfigError::Invalid(msg.into()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(e) => match e.class() {
                ErrorClass::Numerical => EXIT_NUMERICAL,
                ErrorClass::Input => EXIT_CONFIG,
                ErrorClass::Io => EXIT_IO,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<dpw_core::Error> for CliError {
    fn from(e: dpw_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// CMC surfaces from holomorphic potentials via the DPW method, with certificate suites.
#[derive(Debug, Parser)]
#[command(name = "dpw", version)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Overrides {
    /// Exponent k of ξ_k = λ⁻¹·[[0, 1], [c·z^k, 0]]·dz.
    #[arg(long, global = true, allow_negative_numbers = true)]
    k: Option<i32>,
    /// Complex parameter c, e.g. 1, i, 2-i.
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<String>,
    /// Use the vacuum potential.
    #[arg(long, global = true)]
    vacuum: bool,
    /// z-order truncation N_z.
    #[arg(long, global = true)]
    nz: Option<usize>,
    /// λ-degree truncation N_λ.
    #[arg(long, global = true)]
    nl: Option<usize>,
    /// Number of λ-samples on the unit circle.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// λ₀ = e^{i·t0}.
    #[arg(long, global = true, allow_negative_numbers = true)]
    t0: Option<f64>,
    /// Mean curvature.
    #[arg(long, global = true, allow_negative_numbers = true)]
    h: Option<f64>,
    #[arg(long = "random-seed", global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a surface mesh (OBJ + CSV) and report seam defect and CMC deviation.
    Gen,
    /// Monodromy around |z| = radius on the λ-grid, as CSV.
    Monodromy {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a certificate suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Convert a point CSV written by `gen` to OBJ.
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

fn apply(cfg: &mut RunConfig, o: &Overrides) {
    if let Some(k) = o.k {
        cfg.potential.k = k;
    }
    if let Some(c) = &o.c {
        cfg.potential.c = c.clone();
    }
    cfg.potential.vacuum |= o.vacuum;
    if let Some(n) = o.nz {
        cfg.truncation.n_z = n;
    }
    if let Some(n) = o.nl {
        cfg.truncation.n_lambda = n;
    }
    if let Some(m) = o.samples {
        cfg.lambda.samples = m;
    }
    if let Some(t) = o.t0 {
        cfg.lambda.t0 = t;
    }
    if let Some(h) = o.h {
        cfg.h = h;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(d) = &o.out {
        cfg.output.dir = d.clone();
    }
    cfg.sequential |= o.sequential;
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    apply(&mut cfg, &cli.overrides);
    cfg.validate()?;
    match &cli.command {
        Command::Gen => commands::gen(&cfg),
        Command::Monodromy { radius, csv } => commands::monodromy_cmd(&cfg, *radius, csv.as_deref()),
        Command::Verify { suite } => commands::verify(&cfg, *suite),
        Command::Export { input, output } => commands::export(input, output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
