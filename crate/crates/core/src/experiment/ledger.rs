//! Measurement accounting.
//!
//! Every call into the emulated laboratory is charged to one of four
//! categories. With 10 s per measurement, the balanced workflow (3 readouts
//! per iteration) costs 6000 measurements ≈ 16.7 h over 2000 iterations,
//! while the purely experimental workflow (3 + 4·50·2·3 + 50·2·3 = 1503 per
//! iteration) costs 3 006 000 measurements ≈ 8350 h. Estimates of
//! "about 7500 h" for the purely experimental workflow correspond to
//! ≈ 1800 iterations at that per-iteration cost, not 2000; the ledger
//! always reports the computed count.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    FidelityPartial,
    FidelityFull,
    GradientControl,
    GradientTime,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasurementLedger {
    pub count_fidelity_partial: u64,
    pub count_fidelity_full: u64,
    pub count_gradient_control: u64,
    pub count_gradient_time: u64,
    pub seconds_per_measurement: f64,
}

impl MeasurementLedger {
    pub fn new(seconds_per_measurement: f64) -> Self {
        Self {
            seconds_per_measurement,
            ..Self::default()
        }
    }

    pub fn charge(&mut self, kind: MeasurementKind, count: u64) {
        match kind {
            MeasurementKind::FidelityPartial => self.count_fidelity_partial += count,
            MeasurementKind::FidelityFull => self.count_fidelity_full += count,
            MeasurementKind::GradientControl => self.count_gradient_control += count,
            MeasurementKind::GradientTime => self.count_gradient_time += count,
        }
    }

    pub fn count(&self, kind: MeasurementKind) -> u64 {
        match kind {
            MeasurementKind::FidelityPartial => self.count_fidelity_partial,
            MeasurementKind::FidelityFull => self.count_fidelity_full,
            MeasurementKind::GradientControl => self.count_gradient_control,
            MeasurementKind::GradientTime => self.count_gradient_time,
        }
    }

    pub fn total_measurements(&self) -> u64 {
        self.count_fidelity_partial + self.count_fidelity_full + self.count_gradient_control + self.count_gradient_time
    }

    pub fn wall_clock_estimate(&self) -> f64 {
        self.total_measurements() as f64 * self.seconds_per_measurement
    }

    /// Sum of two ledgers; the rate of `self` is kept.
    pub fn merged(&self, other: &Self) -> Self {
        Self {
            count_fidelity_partial: self.count_fidelity_partial + other.count_fidelity_partial,
            count_fidelity_full: self.count_fidelity_full + other.count_fidelity_full,
            count_gradient_control: self.count_gradient_control + other.count_gradient_control,
            count_gradient_time: self.count_gradient_time + other.count_gradient_time,
            seconds_per_measurement: self.seconds_per_measurement,
        }
    }
}

/// Flat report of a ledger, as written to manifests and printed by `budget`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub iterations: u64,
    pub count_fidelity_partial: u64,
    pub count_fidelity_full: u64,
    pub count_gradient_control: u64,
    pub count_gradient_time: u64,
    pub total_measurements: u64,
    pub measurements_per_iteration: f64,
    pub seconds_per_measurement: f64,
    pub wall_clock_seconds: f64,
    pub wall_clock_hours: f64,
}

pub fn ledger_report(ledger: &MeasurementLedger, n_iterations: u64) -> LedgerSummary {
    let total = ledger.total_measurements();
    let wall = ledger.wall_clock_estimate();
    LedgerSummary {
        iterations: n_iterations,
        count_fidelity_partial: ledger.count_fidelity_partial,
        count_fidelity_full: ledger.count_fidelity_full,
        count_gradient_control: ledger.count_gradient_control,
        count_gradient_time: ledger.count_gradient_time,
        total_measurements: total,
        measurements_per_iteration: if n_iterations == 0 { 0.0 } else { total as f64 / n_iterations as f64 },
        seconds_per_measurement: ledger.seconds_per_measurement,
        wall_clock_seconds: wall,
        wall_clock_hours: wall / 3600.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conservation_and_wall_clock() {
        let mut l = MeasurementLedger::new(10.0);
        l.charge(MeasurementKind::FidelityPartial, 3);
        l.charge(MeasurementKind::GradientControl, 1200);
        l.charge(MeasurementKind::GradientTime, 300);
        assert_eq!(l.total_measurements(), 1503);
        assert_eq!(l.wall_clock_estimate(), 15030.0);
    }

    #[test]
    fn empty_report() {
        let r = ledger_report(&MeasurementLedger::new(10.0), 0);
        assert_eq!(r.total_measurements, 0);
        assert_eq!(r.wall_clock_seconds, 0.0);
        assert_eq!(r.measurements_per_iteration, 0.0);
    }

    #[test]
    fn balanced_projection_hours() {
        let mut l = MeasurementLedger::new(10.0);
        l.charge(MeasurementKind::FidelityPartial, 2000 * 3);
        let r = ledger_report(&l, 2000);
        assert_eq!(r.total_measurements, 6000);
        assert_eq!(r.wall_clock_seconds, 60000.0);
        assert!((r.wall_clock_hours - 16.7).abs() < 0.05);
    }
}
