//! Emulated laboratory with a hidden true model, pulse distortion,
//! relaxation, readout noise and a measurement ledger.

pub mod backend;
pub mod config;
pub mod ledger;

pub use backend::{distort_pulse, low_pass, project_to_density, Experiment};
pub use config::{ExperimentConfig, SAMPLE_T1_S, SAMPLE_T2_S};
pub use ledger::{ledger_report, LedgerSummary, MeasurementKind, MeasurementLedger};
