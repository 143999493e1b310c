use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use bellopt::cartan::{cartan_coordinates, minimum_time_bell, minimum_time_unitary};
use bellopt::dynamics::{fidelity, read_pulse_csv, write_pulse_csv};
use bellopt::experiment::{ledger_report, Experiment, LedgerSummary};
use bellopt::optimizer::{
    from_jsonl, per_iteration_cost, plot_csv, project_budget, record_line, run_optimization_with, summary_csv,
    Initialization, RunMode, Termination, TimeProbe,
};
use bellopt::{StateVector4, NOMINAL_COUPLING_HZ};
use serde::Serialize;
use thiserror::Error;

use crate::config::{parse_config, RunConfig};
use crate::format::{hours3, ms3, parse_unitary};
use crate::{Command, RunFlags};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bellopt::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 2 for anything wrong with the inputs, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(bellopt::Error::Config { .. } | bellopt::Error::Parse { .. } | bellopt::Error::Usage(_)) => 2,
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Core(_) | CliError::Output { .. } => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Input { path: path.to_owned(), source })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Output { path: path.to_owned(), source })
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Output { path: PathBuf::from("<stdout>"), source }
}

/// Config file (or defaults) with command-line overrides applied.
pub fn load_run_config(flags: &RunFlags) -> Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(p) => parse_config(&read(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &flags.mode {
        cfg.mode = m.parse().map_err(|e: bellopt::Error| bellopt::Error::config("mode", e.to_string()))?;
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(o) = &flags.out {
        cfg.output = o.clone();
    }
    if let Some(n) = flags.iterations {
        cfg.optimizer.max_iterations = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `a..b` (inclusive), `a..=b` or a single seed.
pub fn parse_seed_range(s: &str) -> Result<Vec<u64>> {
    let bad = || CliError::Usage(format!("--seeds expects `a..b`, got `{s}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Optimize { flags, seeds } => {
            let cfg = load_run_config(&flags)?;
            match seeds {
                None => {
                    let line = optimize(&cfg, &cfg.output)?;
                    writeln!(out, "{line}").map_err(stdout_err)
                }
                Some(range) => optimize_many(&cfg, &parse_seed_range(&range)?, out),
            }
        }
        Command::Evaluate { pulse, flags } => evaluate(&pulse, &flags, out),
        Command::Tmin { g, unitary, config } => tmin(g, unitary.as_deref(), config.as_deref(), out),
        Command::Budget { flags, time_probe, slices, seconds_per_measurement } => {
            budget(&flags, time_probe.as_deref(), slices, seconds_per_measurement, out)
        }
        Command::Export { trace, out: target } => {
            let records = from_jsonl(&read(&trace)?)?;
            let csv = plot_csv(&records);
            match target {
                Some(p) => write_file(&p, &csv),
                None => out.write_all(csv.as_bytes()).map_err(stdout_err),
            }
        }
    }
}

#[derive(Serialize)]
struct RunResults {
    termination: Termination,
    iterations: usize,
    final_t_seconds: f64,
    final_j_oracle: f64,
    final_j_model: f64,
    final_fidelity_full: Option<f64>,
    ledger: LedgerSummary,
    verification_measurements: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    bellopt_version: &'static str,
    created_unix_s: u64,
    seed: u64,
    config: &'a RunConfig,
    results: RunResults,
}

/// Run one configuration into `dir`; returns a one-line summary.
pub fn optimize(cfg: &RunConfig, dir: &Path) -> Result<String> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output { path: dir.to_owned(), source })?;
    let trace_path = dir.join("trace.jsonl");
    let file = File::create(&trace_path).map_err(|source| CliError::Output { path: trace_path.clone(), source })?;
    let mut trace = BufWriter::new(file);
    let mut io_failure: Option<io::Error> = None;
    let mut observer = |r: &bellopt::optimizer::IterationRecord| {
        writeln!(trace, "{}", record_line(r)).map_err(|e| {
            io_failure = Some(e);
            bellopt::Error::Usage("trace write failed".into())
        })
    };
    let outcome = run_optimization_with(
        cfg.mode,
        &cfg.system_model(),
        cfg.experiment_config(),
        &cfg.optimizer,
        Initialization::Seed(cfg.seed),
        &mut observer,
    );
    if let Some(source) = io_failure {
        return Err(CliError::Output { path: trace_path, source });
    }
    let outcome = outcome?;
    trace.flush().map_err(|source| CliError::Output { path: trace_path.clone(), source })?;

    write_file(&dir.join("summary.csv"), &summary_csv(&outcome.records))?;
    write_file(&dir.join("pulse.csv"), &write_pulse_csv(&outcome.final_pulse))?;
    let results = RunResults {
        termination: outcome.termination,
        iterations: outcome.records.len(),
        final_t_seconds: outcome.final_pulse.duration(),
        final_j_oracle: outcome.final_j_oracle,
        final_j_model: outcome.final_j_model,
        final_fidelity_full: outcome.final_fidelity_full,
        ledger: ledger_report(&outcome.ledger, outcome.records.len() as u64),
        verification_measurements: outcome.verification_measurements,
    };
    let manifest = Manifest {
        bellopt_version: env!("CARGO_PKG_VERSION"),
        created_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        seed: cfg.seed,
        config: cfg,
        results,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&dir.join("manifest.json"), &(json + "\n"))?;

    let stop = match outcome.termination {
        Termination::Stalled => "stalled",
        Termination::MaxIterations => "iteration limit",
    };
    Ok(format!(
        "seed {}: {} T = {} J = {:.6} (model {:.6}) after {} iterations ({stop}), {} measurements -> {}",
        cfg.seed,
        cfg.mode,
        ms3(outcome.final_pulse.duration()),
        outcome.final_j_oracle,
        outcome.final_j_model,
        outcome.records.len(),
        outcome.ledger.total_measurements(),
        dir.display()
    ))
}

fn optimize_many(cfg: &RunConfig, seeds: &[u64], out: &mut dyn Write) -> Result<()> {
    let results: Vec<Result<String>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let mut c = cfg.clone();
                c.seed = seed;
                let dir = cfg.output.join(format!("seed-{seed}"));
                s.spawn(move || optimize(&c, &dir))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("optimizer thread panicked")).collect()
    });
    let mut first_err = None;
    for r in results {
        match r {
            Ok(line) => writeln!(out, "{line}").map_err(stdout_err)?,
            Err(e) => {
                eprintln!("bellopt: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn evaluate(pulse_path: &Path, flags: &RunFlags, out: &mut dyn Write) -> Result<()> {
    let pulse = read_pulse_csv(&read(pulse_path)?)?;
    let mut flags = flags.clone();
    // the pulse is scored as-is; a mode that needs an experiment is irrelevant here
    flags.mode = Some(RunMode::ModelOnly.label().into());
    let cfg = load_run_config(&flags)?;
    let j_model = fidelity(&cfg.system_model(), &pulse, &StateVector4::basis(0), &StateVector4::singlet());
    let t = pulse.duration();
    let mut text = format!("T = {} ({t:e} s), M = {}\nJ_model = {j_model:.9}\n", ms3(t), pulse.slices());
    if let Some(e) = cfg.experiment_config() {
        let mut lab = Experiment::new(e)?;
        let j_tomo = lab.fidelity_partial(&pulse);
        let j_full = lab.fidelity_full(&pulse);
        text += &format!("J_tomo = {j_tomo:.9}\nJ_full = {j_full:.9}\n");
    }
    out.write_all(text.as_bytes()).map_err(stdout_err)
}

fn tmin(g: Option<f64>, unitary: Option<&Path>, config: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let g = match (g, config) {
        (Some(g), _) => g,
        (None, Some(p)) => parse_config(&read(p)?)?.model.g_hz,
        (None, None) => NOMINAL_COUPLING_HZ,
    };
    if !(g > 0.0 && g.is_finite()) {
        return Err(bellopt::Error::config("g", format!("must be > 0, got {g}")).into());
    }
    let t = minimum_time_bell(g);
    let mut text = format!("g = {g} Hz\nT_min(Bell) = {} ({t:.6e} s)\n", ms3(t));
    if let Some(p) = unitary {
        let u = parse_unitary(&read(p)?).map_err(|(line, message)| bellopt::Error::Parse { line, message })?;
        let c = cartan_coordinates(&u)?;
        let tu = minimum_time_unitary(&c, g);
        text += &format!(
            "cartan (a_x, a_y, a_z) = ({:.9}, {:.9}, {:.9})\nT_min(U) = {} ({tu:.6e} s)\n",
            c.a_x,
            c.a_y,
            c.a_z,
            ms3(tu)
        );
    }
    out.write_all(text.as_bytes()).map_err(stdout_err)
}

fn budget(
    flags: &RunFlags,
    time_probe: Option<&str>,
    slices: Option<usize>,
    seconds_per_measurement: Option<f64>,
    out: &mut dyn Write,
) -> Result<()> {
    // budgets are hypothetical, so a mode without an experiment section is fine
    let mut quiet = flags.clone();
    quiet.mode = None;
    let cfg = load_run_config(&quiet)?;
    let mode: RunMode = match &flags.mode {
        Some(m) => m.parse().map_err(|e: bellopt::Error| bellopt::Error::config("mode", e.to_string()))?,
        None => cfg.mode,
    };
    let probe = match time_probe {
        None => cfg.optimizer.time_probe,
        Some("per-slice") => TimeProbe::PerSlice,
        Some("uniform-stretch") => TimeProbe::UniformStretch,
        Some(other) => {
            return Err(bellopt::Error::config("time_probe", format!("must be per-slice or uniform-stretch, got `{other}`")).into())
        }
    };
    let slices = slices.unwrap_or(cfg.optimizer.slices);
    if slices == 0 {
        return Err(bellopt::Error::config("slices", "must be ≥ 1").into());
    }
    let seconds = seconds_per_measurement
        .or_else(|| cfg.experiment_config().map(|e| e.seconds_per_measurement))
        .unwrap_or(10.0);
    if !(seconds >= 0.0 && seconds.is_finite()) {
        return Err(bellopt::Error::config("seconds_per_measurement", format!("must be ≥ 0, got {seconds}")).into());
    }
    let iterations = cfg.optimizer.max_iterations;
    let (partial, control, time) = per_iteration_cost(mode, slices, probe);
    let b = project_budget(mode, iterations, slices, probe, seconds);
    let text = format!(
        "mode: {mode}\n\
         iterations: {iterations}\n\
         measurements per iteration: {} (fidelity {partial}, control gradient {control}, time gradient {time})\n\
         fidelity_partial: {}\n\
         gradient_control: {}\n\
         gradient_time: {}\n\
         total measurements: {}\n\
         wall clock: {} ({} s at {seconds} s per measurement)\n",
        partial + control + time,
        b.count_fidelity_partial,
        b.count_gradient_control,
        b.count_gradient_time,
        b.total_measurements,
        hours3(b.wall_clock_hours),
        b.wall_clock_seconds,
    );
    out.write_all(text.as_bytes()).map_err(stdout_err)
}
