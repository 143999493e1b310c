//! `bellopt` command-line harness.

pub mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::CliError;
pub use config::{parse_config, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "bellopt", version, about = "Time-optimal Bell-state preparation on a two-spin model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct RunFlags {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// model-only, experiment-only or balanced.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides optimizer.max_iterations.
    #[arg(long)]
    pub iterations: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the optimizer and write trace, summary, pulse and manifest.
    Optimize {
        #[command(flatten)]
        flags: RunFlags,
        /// Inclusive seed range `a..b`, run concurrently, one directory per seed.
        #[arg(long)]
        seeds: Option<String>,
    },
    /// Report model and measured fidelities of a pulse file.
    Evaluate {
        /// Pulse CSV.
        pulse: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Minimum times from the Cartan decomposition.
    Tmin {
        /// Coupling in Hz (defaults to the config's model.g_hz).
        #[arg(long)]
        g: Option<f64>,
        /// Unitary file: four rows of eight numbers (re im pairs).
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Projected measurement count and wall-clock time of a run.
    Budget {
        #[command(flatten)]
        flags: RunFlags,
        /// Time-gradient probe scheme: per-slice or uniform-stretch.
        #[arg(long)]
        time_probe: Option<String>,
        /// Overrides optimizer.slices.
        #[arg(long)]
        slices: Option<usize>,
        #[arg(long)]
        seconds_per_measurement: Option<f64>,
    },
    /// Convert a trace to plot-ready CSV (n, J_tomo, J_L, T_ms).
    Export {
        /// Trace JSONL.
        trace: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse arguments, run, print errors; returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match commands::execute(cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("bellopt: {e}");
            e.exit_code()
        }
    }
}
