//! Two-step optimization of fidelity and pulse length, with model-only,
//! experiment-only and balanced oracles.

pub mod budget;
pub mod config;
pub mod run;
pub mod trace;

pub use budget::{per_iteration_cost, project_budget};
pub use config::{threshold_j_l, OptimizerConfig, TimeProbe};
pub use run::{
    finite_diff_gradients, random_pulse, run_optimization, run_optimization_with, Initialization, Optimizer,
    OptimizerState, RunMode, RunOutcome, Termination,
};
pub use trace::{
    armijo_holds, audit_trace, from_jsonl, plot_csv, record_line, retention_holds, summary_csv, to_jsonl,
    AuditViolation, Event, IterationRecord, Phase, SUMMARY_CSV_HEADER,
};
