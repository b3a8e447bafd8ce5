//! `expanso` command line.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{ConfigError, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "expanso", version, about = "Expansiveness classification for non-autonomous discrete systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one system; writes report.json and balls.csv.
    Classify {
        #[command(flatten)]
        run: RunArgs,
        /// Directory for report.json and balls.csv (overrides config outputs).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the theorem-check suite over the catalog.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run only this check (repeatable).
        #[arg(long)]
        only: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Print JSON instead of the table.
        #[arg(long)]
        json: bool,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Negate derived-side verdicts inside this check (harness self-test).
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// CSV of ball members per refinement level.
    Ball {
        #[command(flatten)]
        run: RunArgs,
        /// Center coordinates, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        center: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of one orbit (negative indices are preimages).
    Orbit {
        #[command(flatten)]
        run: RunArgs,
        /// Start point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Catalog queries.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    /// Names and one-line summaries.
    List {
        #[arg(long)]
        json: bool,
    },
}

/// Config file plus overriding flags.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Catalog system name.
    #[arg(long)]
    pub system: Option<String>,
    /// Catalog space label of the system.
    #[arg(long)]
    pub space: Option<String>,
    /// Ball radius (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    pub c: Vec<f64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub refinements: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bilateral: Option<bool>,
}

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Config(String),
    /// Exit 1.
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

/// Caps the global rayon pool at `EXPANSO_THREADS` workers when set.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("EXPANSO_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("EXPANSO_THREADS = `{v}` is not a positive integer")))?;
    // a pool built earlier in the process wins
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|_| commands::run(cli.command)) {
        Ok(code) => code,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("config error: {m}"),
                Failure::Runtime(e) => eprintln!("error: {e:#}"),
            }
            f.exit_code()
        }
    }
}
