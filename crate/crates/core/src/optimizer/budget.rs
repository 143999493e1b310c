//! Measurement budgets.
//!
//! Every fidelity readout is three Pauli expectations (XX, YY, ZZ). Balanced
//! mode reads once per iteration: 3 measurements. Experiment-only mode adds
//! central differences for 4M amplitudes and, with the per-slice time probe,
//! M durations: 3 + 4·M·2·3 + M·2·3 = 1503 at M = 50. At 2000 iterations and
//! 10 s per measurement, that is 3 006 000 measurements and 8350 h. A round
//! estimate of 7500 h would imply about 1350 measurements per iteration; no
//! probe scheme here yields that, and 1503 is the count the ledger enforces.

use super::config::TimeProbe;
use super::run::RunMode;
use crate::dynamics::CHANNELS;
use crate::experiment::{ledger_report, LedgerSummary, MeasurementKind, MeasurementLedger};

/// Measurements per iteration by category: (partial fidelity, control
/// gradient, time gradient).
pub fn per_iteration_cost(mode: RunMode, slices: usize, probe: TimeProbe) -> (u64, u64, u64) {
    let m = slices as u64;
    match mode {
        RunMode::ModelOnly => (0, 0, 0),
        RunMode::Balanced => (3, 0, 0),
        RunMode::ExperimentOnly => {
            let time = match probe {
                TimeProbe::PerSlice => m * 2 * 3,
                TimeProbe::UniformStretch => 2 * 3,
            };
            (3, CHANNELS as u64 * m * 2 * 3, time)
        }
    }
}

/// Ledger a run of `iterations` would accumulate, excluding the final
/// verification tomography.
pub fn project_budget(
    mode: RunMode,
    iterations: u64,
    slices: usize,
    probe: TimeProbe,
    seconds_per_measurement: f64,
) -> LedgerSummary {
    let (partial, control, time) = per_iteration_cost(mode, slices, probe);
    let mut ledger = MeasurementLedger::new(seconds_per_measurement);
    ledger.charge(MeasurementKind::FidelityPartial, partial * iterations);
    ledger.charge(MeasurementKind::GradientControl, control * iterations);
    ledger.charge(MeasurementKind::GradientTime, time * iterations);
    ledger_report(&ledger, iterations)
}
