use bellopt::experiment::ExperimentConfig;
use bellopt::optimizer::*;
use bellopt::{PulseSequence, SystemModel};

const G: f64 = 217.4;

fn model() -> SystemModel {
    SystemModel::new(G).unwrap()
}

fn run(mode: RunMode, exp: Option<ExperimentConfig>, cfg: &OptimizerConfig, seed: u64) -> RunOutcome {
    run_optimization(mode, &model(), exp, cfg, Initialization::Seed(seed)).unwrap()
}

#[test]
fn reference_model_run() {
    let cfg = OptimizerConfig::default();
    let out = run(RunMode::ModelOnly, None, &cfg, 0);
    let recs = &out.records;

    let reached = recs.iter().position(|r| r.j_oracle >= 0.999).expect("reaches J_H");
    assert!(reached < 500, "J_H first reached at n = {reached}");
    assert!(recs[..=reached].iter().all(|r| r.phase == Phase::Step1 && r.t_seconds == 5e-3));

    // first accepted step-2 iteration keeps J ≥ β·J_H
    let first2 = recs.iter().find(|r| r.phase == Phase::Step2 && r.accepted).unwrap();
    assert!(first2.j_trial >= 0.999 * 0.999);
    assert!(first2.t_seconds < 5e-3);

    assert!(out.final_pulse.duration() <= 2.40e-3);
    assert!(out.final_j_model >= 0.999);
    assert!(out.final_pulse.duration() >= 0.95 * bellopt::cartan::minimum_time_bell(G));
    assert_eq!(out.ledger.total_measurements(), 0);
    assert!(audit_trace(recs, cfg.alpha, cfg.beta).is_empty());
}

#[test]
fn step1_monotone_and_step2_retains() {
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 800;
    let out = run(RunMode::ModelOnly, None, &cfg, 1);
    let mut best_step1 = f64::NEG_INFINITY;
    for pair in out.records.windows(2) {
        let (prev, r) = (&pair[0], &pair[1]);
        assert!(r.t_seconds <= prev.t_seconds);
        match r.phase {
            Phase::Step1 => {
                assert_eq!(r.t_trial, prev.t_seconds);
                if r.accepted {
                    assert!(r.j_trial >= r.j_before + cfg.alpha * r.step_size * r.slope);
                    assert!(r.j_trial > r.j_before);
                    best_step1 = best_step1.max(r.j_oracle);
                }
            }
            Phase::Step2 => {
                assert!(r.t_trial < prev.t_seconds);
                if r.accepted {
                    assert!(r.j_trial >= cfg.beta * r.j_before);
                }
            }
        }
    }
    assert!(best_step1 >= 0.999);
}

#[test]
fn experiment_only_two_iterations_cost() {
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 2;
    let out = run(RunMode::ExperimentOnly, Some(ExperimentConfig::reference_mismatch(G, 0)), &cfg, 0);
    assert_eq!(out.records.len(), 2);
    assert!(out.records.iter().all(|r| r.measurements == 1503));
    assert_eq!(out.ledger.total_measurements(), 2 * (3 + 1200 + 300));
    assert_eq!(out.ledger.count_gradient_control, 2400);
    assert_eq!(out.ledger.count_gradient_time, 600);
    assert_eq!(out.verification_measurements, 15);
}

#[test]
fn balanced_costs_three_per_iteration() {
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 40;
    let out = run(RunMode::Balanced, Some(ExperimentConfig::reference_mismatch(G, 2)), &cfg, 2);
    assert!(out.records.iter().all(|r| r.measurements == 3));
    assert_eq!(out.ledger.total_measurements(), 120);
    assert!(out.final_fidelity_full.is_some());
}

#[test]
fn balanced_on_ideal_backend_follows_model_only() {
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 1500;
    for seed in [3, 4] {
        let a = run(RunMode::ModelOnly, None, &cfg, seed);
        let b = run(RunMode::Balanced, Some(ExperimentConfig::ideal(G)), &cfg, seed);
        let sa: Vec<_> = a.records.iter().map(|r| (r.accepted, r.phase)).collect();
        let sb: Vec<_> = b.records.iter().map(|r| (r.accepted, r.phase)).collect();
        assert_eq!(sa, sb, "seed {seed}");
    }
}

#[test]
fn stationary_pulse_stalls_in_step1() {
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 70;
    let out = run_optimization(
        RunMode::ModelOnly,
        &model(),
        None,
        &cfg,
        Initialization::Pulse(PulseSequence::zeros(5e-3, 50).unwrap()),
    )
    .unwrap();
    let stalls = out.records.iter().filter(|r| r.has_event(Event::StallInStep1)).count();
    assert_eq!(stalls, 2);
    assert!(out.records.iter().skip(1).all(|r| !r.accepted));
    assert_eq!(out.final_pulse, out.last_pulse);
}

#[test]
fn degenerate_time_gradient_falls_back() {
    // a fully converged pulse holds J_H but |∂J/∂T| is tiny once the guard
    // is raised above it
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 400;
    let seed_run = run(RunMode::ModelOnly, None, &cfg, 5);
    let start = seed_run.final_pulse.clone();
    cfg.time_gradient_guard = 1e12;
    cfg.max_iterations = 20;
    let out = run_optimization(RunMode::ModelOnly, &model(), None, &cfg, Initialization::Pulse(start.clone())).unwrap();
    assert!(out.records.iter().any(|r| r.has_event(Event::DegenerateTimeGradient)));
    assert!(out.records.iter().all(|r| r.phase == Phase::Step1));
    assert_eq!(out.last_pulse.duration(), start.duration());
}

#[test]
fn trace_files_round_trip_and_audit() {
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 300;
    let out = run(RunMode::Balanced, Some(ExperimentConfig::reference_mismatch(G, 6)), &cfg, 6);
    let text = to_jsonl(&out.records);
    let back = from_jsonl(&text).unwrap();
    assert_eq!(back, out.records);
    assert!(audit_trace(&back, cfg.alpha, cfg.beta).is_empty());
    let csv = summary_csv(&back);
    assert_eq!(csv.lines().count(), back.len() + 1);
    assert_eq!(csv.lines().next().unwrap(), SUMMARY_CSV_HEADER);
}

#[test]
fn identical_seeds_give_identical_traces() {
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 100;
    let a = run(RunMode::Balanced, Some(ExperimentConfig::reference_mismatch(G, 8)), &cfg, 8);
    let b = run(RunMode::Balanced, Some(ExperimentConfig::reference_mismatch(G, 8)), &cfg, 8);
    assert_eq!(to_jsonl(&a.records), to_jsonl(&b.records));
}

#[test]
fn observer_sees_every_record_and_errors_propagate() {
    let mut cfg = OptimizerConfig::default();
    cfg.max_iterations = 10;
    let mut seen = 0;
    run_optimization_with(RunMode::ModelOnly, &model(), None, &cfg, Initialization::Seed(0), &mut |_| {
        seen += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(seen, 10);
    let r = run_optimization_with(RunMode::ModelOnly, &model(), None, &cfg, Initialization::Seed(0), &mut |r| {
        if r.n == 3 {
            Err(bellopt::Error::Usage("disk full".into()))
        } else {
            Ok(())
        }
    });
    assert!(r.is_err());
}
