use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{threshold_j_l, OptimizerConfig, TimeProbe};
use super::trace::{armijo_holds, retention_holds, Event, IterationRecord, Phase};
use crate::dynamics::{fidelity, fidelity_and_gradients, CHANNELS};
use crate::error::{Error, Result};
use crate::experiment::{Experiment, ExperimentConfig, MeasurementKind, MeasurementLedger};
use crate::{GradientBundle, PulseSequence, StateVector4, SystemModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Model J and model gradients; nothing is measured.
    ModelOnly,
    /// Measured J and finite-difference gradients through the experiment.
    ExperimentOnly,
    /// Measured J, model gradients.
    Balanced,
}

impl RunMode {
    pub fn label(self) -> &'static str {
        match self {
            RunMode::ModelOnly => "model-only",
            RunMode::ExperimentOnly => "experiment-only",
            RunMode::Balanced => "balanced",
        }
    }

    pub fn needs_experiment(self) -> bool {
        self != RunMode::ModelOnly
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "model-only" => Ok(RunMode::ModelOnly),
            "experiment-only" => Ok(RunMode::ExperimentOnly),
            "balanced" => Ok(RunMode::Balanced),
            other => Err(Error::Usage(format!(
                "unknown mode `{other}` (expected model-only, experiment-only or balanced)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Initialization {
    /// Uniform amplitudes in ±`init_amplitude` at `initial_duration`.
    Seed(u64),
    Pulse(PulseSequence),
}

/// Seeded random starting pulse.
pub fn random_pulse(config: &OptimizerConfig, seed: u64) -> Result<PulseSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = config.init_amplitude;
    let amps = (0..config.slices)
        .map(|_| std::array::from_fn(|_| if a > 0.0 { rng.gen_range(-a..=a) } else { 0.0 }))
        .collect();
    PulseSequence::with_cap(config.initial_duration, amps, config.amplitude_cap)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerState {
    pub iteration_n: u64,
    pub phase: Phase,
    pub pulse: PulseSequence,
    pub last_j_oracle: f64,
    pub d1: f64,
    pub d2: f64,
    pub rng_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIterations,
    Stalled,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub mode: RunMode,
    /// Shortest pulse whose oracle J reached J_H, else the last pulse.
    pub final_pulse: PulseSequence,
    pub final_j_oracle: f64,
    pub final_j_model: f64,
    pub last_pulse: PulseSequence,
    pub records: Vec<IterationRecord>,
    /// Measurements charged by the optimization loop.
    pub ledger: MeasurementLedger,
    /// Full tomography of the final pulse, when an experiment exists.
    pub final_fidelity_full: Option<f64>,
    pub verification_measurements: u64,
    pub termination: Termination,
}

/// Central-difference gradients measured through `fidelity_partial`.
///
/// Each probe costs 3 measurements. Control probes: 2 per amplitude, 4M
/// amplitudes. Time probes: 2M with [`TimeProbe::PerSlice`] (each slice
/// stretched in turn, derivatives averaged) or 2 with
/// [`TimeProbe::UniformStretch`]. The `fidelity` field is the mean of the
/// control probes, which equals J(u) to O(h²) and costs nothing extra.
pub fn finite_diff_gradients(
    experiment: &mut Experiment,
    pulse: &PulseSequence,
    step_amplitude: f64,
    step_time: f64,
    probe: TimeProbe,
) -> GradientBundle {
    let m_count = pulse.slices();
    let dt = pulse.slice_duration();
    let durations = vec![dt; m_count];
    let mut amps = pulse.amplitudes().to_vec();
    let mut grad_u = vec![[0.0; CHANNELS]; m_count];
    let mut probe_sum = 0.0;
    let h = step_amplitude;
    for m in 0..m_count {
        for c in 0..CHANNELS {
            let base = amps[m][c];
            amps[m][c] = base + h;
            let plus = experiment.fidelity_partial_with_durations(&amps, &durations, MeasurementKind::GradientControl);
            amps[m][c] = base - h;
            let minus = experiment.fidelity_partial_with_durations(&amps, &durations, MeasurementKind::GradientControl);
            amps[m][c] = base;
            grad_u[m][c] = (plus - minus) / (2.0 * h);
            probe_sum += plus + minus;
        }
    }
    let grad_t = match probe {
        TimeProbe::PerSlice => {
            let mut d = durations.clone();
            let mut sum = 0.0;
            for m in 0..m_count {
                d[m] = dt + step_time;
                let plus = experiment.fidelity_partial_with_durations(&amps, &d, MeasurementKind::GradientTime);
                d[m] = dt - step_time;
                let minus = experiment.fidelity_partial_with_durations(&amps, &d, MeasurementKind::GradientTime);
                d[m] = dt;
                sum += (plus - minus) / (2.0 * step_time);
            }
            sum / m_count as f64
        }
        TimeProbe::UniformStretch => {
            let k = m_count as f64;
            let plus = vec![dt + step_time / k; m_count];
            let minus = vec![dt - step_time / k; m_count];
            let jp = experiment.fidelity_partial_with_durations(&amps, &plus, MeasurementKind::GradientTime);
            let jm = experiment.fidelity_partial_with_durations(&amps, &minus, MeasurementKind::GradientTime);
            (jp - jm) / (2.0 * step_time)
        }
    };
    GradientBundle {
        fidelity: probe_sum / (2 * CHANNELS * m_count) as f64,
        grad_u,
        grad_t,
    }
}

struct Candidate {
    pulse: PulseSequence,
    phase: Phase,
    step: f64,
    slope: f64,
}

/// The two-step phase machine. Each call to [`Optimizer::step`] is one
/// iteration: it measures the candidate proposed by the previous iteration
/// (iteration 0 measures the initial pulse), applies the acceptance test for
/// the candidate's phase, updates the step size and phase, then computes the
/// gradient at the accepted pulse and proposes the next candidate.
pub struct Optimizer {
    mode: RunMode,
    model: SystemModel,
    config: OptimizerConfig,
    lab: Option<Experiment>,
    state: OptimizerState,
    gradient: Option<GradientBundle>,
    candidate: Option<Candidate>,
    backtracks: u32,
    chain_start: f64,
    t_history: VecDeque<f64>,
    best: Option<(PulseSequence, f64)>,
    stalled: bool,
}

fn psi0() -> StateVector4 {
    StateVector4::basis(0)
}

fn target() -> StateVector4 {
    StateVector4::singlet()
}

impl Optimizer {
    pub fn new(
        mode: RunMode,
        model: SystemModel,
        experiment: Option<ExperimentConfig>,
        config: OptimizerConfig,
        init: Initialization,
    ) -> Result<Self> {
        config.validate()?;
        if mode.needs_experiment() && experiment.is_none() {
            return Err(Error::config("experiment", format!("mode {mode} requires an experiment section")));
        }
        let lab = experiment.map(Experiment::new).transpose()?;
        let (pulse, seed) = match init {
            Initialization::Seed(s) => (random_pulse(&config, s)?, s),
            Initialization::Pulse(p) => (p, 0),
        };
        let state = OptimizerState {
            iteration_n: 0,
            phase: Phase::Step1,
            pulse,
            last_j_oracle: f64::NAN,
            d1: config.d1_init,
            d2: config.d2_init,
            rng_seed: seed,
        };
        Ok(Self {
            mode,
            model,
            chain_start: config.d1_init,
            config,
            lab,
            state,
            gradient: None,
            candidate: None,
            backtracks: 0,
            t_history: VecDeque::new(),
            best: None,
            stalled: false,
        })
    }

    pub fn state(&self) -> &OptimizerState {
        &self.state
    }

    pub fn is_stalled(&self) -> bool {
        self.stalled
    }

    pub fn ledger(&self) -> MeasurementLedger {
        self.lab.as_ref().map(|l| *l.ledger()).unwrap_or_default()
    }

    fn measured(&self) -> u64 {
        self.lab.as_ref().map_or(0, |l| l.ledger().total_measurements())
    }

    fn oracle(&mut self, pulse: &PulseSequence) -> f64 {
        match (self.mode, self.lab.as_mut()) {
            (RunMode::ModelOnly, _) | (_, None) => fidelity(&self.model, pulse, &psi0(), &target()),
            (_, Some(lab)) => lab.fidelity_partial(pulse),
        }
    }

    fn refresh_gradient(&mut self, pulse_changed: bool) {
        match self.mode {
            RunMode::ExperimentOnly => {
                let lab = self.lab.as_mut().expect("checked at construction");
                let c = &self.config;
                self.gradient = Some(finite_diff_gradients(
                    lab,
                    &self.state.pulse,
                    c.fd_step_amplitude,
                    c.fd_step_time,
                    c.time_probe,
                ));
            }
            _ => {
                if pulse_changed || self.gradient.is_none() {
                    self.gradient = Some(fidelity_and_gradients(&self.model, &self.state.pulse, &psi0(), &target()));
                }
            }
        }
    }

    fn model_j(&self) -> f64 {
        match (self.mode, &self.gradient) {
            (RunMode::ExperimentOnly, _) | (_, None) => fidelity(&self.model, &self.state.pulse, &psi0(), &target()),
            (_, Some(g)) => g.fidelity,
        }
    }

    fn step_size(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Step1 => self.state.d1,
            Phase::Step2 => self.state.d2,
        }
    }

    fn set_step_size(&mut self, phase: Phase, d: f64) {
        match phase {
            Phase::Step1 => self.state.d1 = d,
            Phase::Step2 => self.state.d2 = d,
        }
    }

    fn propose_step1(&self, grad: &GradientBundle) -> Result<Candidate> {
        let step = self.state.d1;
        let slope = grad.grad_u_norm_sqr();
        let pulse = self.state.pulse.stepped(&grad.grad_u, step, 0.0)?;
        Ok(Candidate { pulse, phase: Phase::Step1, step, slope })
    }

    /// Level-set move: Δu = g_u/g_T, ΔT = −Σ Δu², so the first-order change
    /// g_u·Δu + g_T·ΔT vanishes and T shrinks.
    fn propose_step2(&self, grad: &GradientBundle) -> Result<Candidate> {
        let gt = grad.grad_t;
        let du: Vec<[f64; CHANNELS]> = grad.grad_u.iter().map(|row| row.map(|g| g / gt)).collect();
        let dt = -du.iter().flatten().map(|x| x * x).sum::<f64>();
        let t = self.state.pulse.duration();
        let mut step = self.state.d2;
        if t + step * dt < 0.5 * t {
            step = 0.5 * t / -dt;
        }
        let slope = grad.grad_u.iter().flatten().zip(du.iter().flatten()).map(|(g, d)| g * d).sum::<f64>() + gt * dt;
        let pulse = self.state.pulse.stepped(&du, step, dt)?;
        Ok(Candidate { pulse, phase: Phase::Step2, step, slope })
    }

    fn accepts(&self, c: &Candidate, j_before: f64, j_trial: f64) -> bool {
        match c.phase {
            Phase::Step1 => {
                let gain = self.config.alpha * c.step * c.slope;
                // a gain below the resolution of J cannot certify progress
                j_before + gain > j_before && armijo_holds(j_before, j_trial, self.config.alpha, c.step, c.slope)
            }
            Phase::Step2 => retention_holds(j_before, j_trial, self.config.beta),
        }
    }

    /// Run one iteration and return its record.
    pub fn step(&mut self) -> Result<IterationRecord> {
        let n = self.state.iteration_n;
        let before = self.measured();
        let t_before = self.state.pulse.duration();
        let mut events = Vec::new();

        let (phase, t_trial, j_before, j_trial, step_size, slope, accepted) = match self.candidate.take() {
            None => {
                let pulse = self.state.pulse.clone();
                let j = self.oracle(&pulse);
                self.state.last_j_oracle = j;
                events.push(Event::Baseline);
                (Phase::Step1, t_before, j, j, 0.0, 0.0, true)
            }
            Some(c) => {
                let j_before = self.state.last_j_oracle;
                let j_trial = self.oracle(&c.pulse);
                let ok = self.accepts(&c, j_before, j_trial);
                let (phase, t_trial, step, slope) = (c.phase, c.pulse.duration(), c.step, c.slope);
                if ok {
                    // step 2 only grows while the target itself is still met; β alone
                    // would let small per-step losses compound
                    let clean = self.backtracks == 0 && (phase == Phase::Step1 || j_trial >= self.config.j_high);
                    let next = if clean { step / self.config.backtrack_factor } else { step };
                    self.set_step_size(phase, next);
                    self.chain_start = next;
                    self.backtracks = 0;
                    self.state.pulse = c.pulse;
                    self.state.last_j_oracle = j_trial;
                } else {
                    self.backtracks += 1;
                    let shrunk = (step * self.config.backtrack_factor).max(self.config.d_min);
                    self.set_step_size(phase, shrunk);
                    if self.backtracks >= self.config.max_backtracks {
                        events.push(match phase {
                            Phase::Step1 => Event::StallInStep1,
                            Phase::Step2 => Event::StallInStep2,
                        });
                        let restart = self.chain_start;
                        self.set_step_size(phase, restart);
                        self.backtracks = 0;
                    }
                }
                (phase, t_trial, j_before, j_trial, step, slope, ok)
            }
        };
        let backtracks = self.backtracks;

        self.refresh_gradient(accepted);
        let j_acc = self.state.last_j_oracle;
        let j_low = threshold_j_l(n, &self.config);

        let next_phase = if j_acc < j_low {
            if phase == Phase::Step2 {
                events.push(Event::ReturnToStep1);
            }
            Phase::Step1
        } else if phase == Phase::Step1 && j_acc >= self.config.j_high {
            events.push(Event::EnterStep2);
            Phase::Step2
        } else {
            phase
        };
        if next_phase != phase {
            self.backtracks = 0;
            self.chain_start = self.step_size(next_phase);
        }

        let grad = self.gradient.clone().expect("gradient refreshed above");
        let mut proposal_phase = next_phase;
        if proposal_phase == Phase::Step2 && !(grad.grad_t.abs() > self.config.time_gradient_guard) {
            events.push(Event::DegenerateTimeGradient);
            proposal_phase = Phase::Step1;
            self.backtracks = 0;
            self.chain_start = self.state.d1;
        }
        self.state.phase = proposal_phase;
        self.candidate = Some(match proposal_phase {
            Phase::Step1 => self.propose_step1(&grad)?,
            Phase::Step2 => self.propose_step2(&grad)?,
        });

        let t_now = self.state.pulse.duration();
        if j_acc >= self.config.j_high && self.best.as_ref().map_or(true, |(p, _)| t_now < p.duration()) {
            self.best = Some((self.state.pulse.clone(), j_acc));
        }
        // the stall window only spans iterations that hold the target
        if j_acc < self.config.j_high {
            self.t_history.clear();
        }
        self.t_history.push_back(t_now);
        if self.t_history.len() as u64 > self.config.stall_window {
            self.t_history.pop_front();
            let (lo, hi) = self
                .t_history
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
            self.stalled = hi - lo < self.config.stall_epsilon_t;
        }

        let record = IterationRecord {
            n,
            phase,
            t_seconds: t_now,
            t_trial,
            j_before,
            j_trial,
            j_oracle: j_acc,
            j_model: self.model_j(),
            j_low,
            step_size,
            slope,
            accepted,
            backtracks,
            measurements: self.measured() - before,
            events,
        };
        self.state.iteration_n += 1;
        Ok(record)
    }

    /// Final pulse selection and verification by full tomography.
    pub fn finish(mut self, records: Vec<IterationRecord>) -> RunOutcome {
        let last_pulse = self.state.pulse.clone();
        let (final_pulse, final_j_oracle) = match self.best.take() {
            Some(b) => b,
            None => (last_pulse.clone(), self.state.last_j_oracle),
        };
        let ledger = self.ledger();
        let final_j_model = fidelity(&self.model, &final_pulse, &psi0(), &target());
        let final_fidelity_full = self.lab.as_mut().map(|lab| lab.fidelity_full(&final_pulse));
        let verification_measurements = self.measured() - ledger.total_measurements();
        RunOutcome {
            mode: self.mode,
            final_pulse,
            final_j_oracle,
            final_j_model,
            last_pulse,
            records,
            ledger,
            final_fidelity_full,
            verification_measurements,
            termination: if self.stalled { Termination::Stalled } else { Termination::MaxIterations },
        }
    }
}

/// Run until stall or `max_iterations`, passing each record to `observer`
/// as soon as it exists.
pub fn run_optimization_with(
    mode: RunMode,
    model: &SystemModel,
    experiment: Option<ExperimentConfig>,
    config: &OptimizerConfig,
    init: Initialization,
    observer: &mut dyn FnMut(&IterationRecord) -> Result<()>,
) -> Result<RunOutcome> {
    let mut opt = Optimizer::new(mode, model.clone(), experiment, config.clone(), init)?;
    let mut records = Vec::new();
    while (records.len() as u64) < config.max_iterations {
        let r = opt.step()?;
        observer(&r)?;
        records.push(r);
        if opt.is_stalled() {
            break;
        }
    }
    Ok(opt.finish(records))
}

pub fn run_optimization(
    mode: RunMode,
    model: &SystemModel,
    experiment: Option<ExperimentConfig>,
    config: &OptimizerConfig,
    init: Initialization,
) -> Result<RunOutcome> {
    run_optimization_with(mode, model, experiment, config, init, &mut |_| Ok(()))
}
