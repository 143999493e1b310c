use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the time derivative is probed in experiment-only mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeProbe {
    /// Stretch each slice duration by ±h in turn and average: 2M probes.
    PerSlice,
    /// Stretch the whole pulse by ±h: 2 probes.
    UniformStretch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Armijo constant for step 1.
    pub alpha: f64,
    /// Retention factor for step 2.
    pub beta: f64,
    /// Target fidelity J_H.
    pub j_high: f64,
    pub threshold_floor: f64,
    pub threshold_drop: f64,
    /// Decay constant of the return threshold, in iterations.
    pub threshold_rate: f64,
    pub d1_init: f64,
    pub d2_init: f64,
    pub d_min: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: u32,
    pub max_iterations: u64,
    pub stall_window: u64,
    /// Seconds.
    pub stall_epsilon_t: f64,
    /// Guard on |∂J/∂T| (1/s) below which step 2 is not attempted.
    pub time_gradient_guard: f64,
    /// Hz.
    pub fd_step_amplitude: f64,
    /// Seconds.
    pub fd_step_time: f64,
    pub time_probe: TimeProbe,
    /// Hz.
    pub amplitude_cap: Option<f64>,
    /// Initial amplitudes are uniform in ±init_amplitude (Hz).
    pub init_amplitude: f64,
    /// Seconds.
    pub initial_duration: f64,
    pub slices: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            beta: 0.999,
            j_high: 0.999,
            threshold_floor: 0.999,
            threshold_drop: 0.099,
            threshold_rate: 300.0,
            d1_init: 1e4,
            d2_init: 1e5,
            d_min: 1e-12,
            backtrack_factor: 0.5,
            max_backtracks: 30,
            max_iterations: 5000,
            stall_window: 200,
            stall_epsilon_t: 1e-6,
            time_gradient_guard: 1e-8,
            fd_step_amplitude: 1.0,
            fd_step_time: 1e-6,
            time_probe: TimeProbe::PerSlice,
            amplitude_cap: None,
            init_amplitude: 100.0,
            initial_duration: 5.0e-3,
            slices: 50,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |name: &str, msg: String| Err(Error::config(format!("optimizer.{name}"), msg));
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.alpha) {
            return err("alpha", format!("must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return err("beta", format!("must lie in (0, 1], got {}", self.beta));
        }
        for (name, v) in [
            ("j_high", self.j_high),
            ("threshold_floor", self.threshold_floor),
        ] {
            if !open_unit(v) {
                return err(name, format!("must lie in (0, 1), got {v}"));
            }
        }
        if !(self.threshold_drop >= 0.0 && self.threshold_drop < self.threshold_floor) {
            return err(
                "threshold_drop",
                format!("must lie in [0, threshold_floor = {}), got {}", self.threshold_floor, self.threshold_drop),
            );
        }
        if !(self.threshold_rate > 0.0 && self.threshold_rate.is_finite()) {
            return err("threshold_rate", format!("must be > 0, got {}", self.threshold_rate));
        }
        if !(self.d_min > 0.0) {
            return err("d_min", format!("must be > 0, got {}", self.d_min));
        }
        for (name, v) in [("d1_init", self.d1_init), ("d2_init", self.d2_init)] {
            if !(v > self.d_min && v.is_finite()) {
                return err(name, format!("must exceed d_min = {}, got {v}", self.d_min));
            }
        }
        if !open_unit(self.backtrack_factor) {
            return err("backtrack_factor", format!("must lie in (0, 1), got {}", self.backtrack_factor));
        }
        if self.max_backtracks == 0 {
            return err("max_backtracks", "must be ≥ 1".into());
        }
        if self.stall_window == 0 {
            return err("stall_window", "must be ≥ 1".into());
        }
        for (name, v) in [
            ("stall_epsilon_t", self.stall_epsilon_t),
            ("time_gradient_guard", self.time_gradient_guard),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return err(name, format!("must be ≥ 0, got {v}"));
            }
        }
        for (name, v) in [
            ("fd_step_amplitude", self.fd_step_amplitude),
            ("fd_step_time", self.fd_step_time),
            ("initial_duration", self.initial_duration),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return err(name, format!("must be > 0, got {v}"));
            }
        }
        if self.fd_step_time * 2.0 >= self.initial_duration / self.slices.max(1) as f64 {
            return err(
                "fd_step_time",
                format!("must be below half a slice duration, got {}", self.fd_step_time),
            );
        }
        if let Some(cap) = self.amplitude_cap {
            if !(cap > 0.0) {
                return err("amplitude_cap", format!("must be > 0, got {cap}"));
            }
        }
        if !(self.init_amplitude >= 0.0 && self.init_amplitude.is_finite()) {
            return err("init_amplitude", format!("must be ≥ 0, got {}", self.init_amplitude));
        }
        if self.slices == 0 {
            return err("slices", "must be ≥ 1".into());
        }
        Ok(())
    }
}

/// Return threshold J_L(n) = floor − drop·e^{−n/rate}.
pub fn threshold_j_l(n: u64, config: &OptimizerConfig) -> f64 {
    config.threshold_floor - config.threshold_drop * (-(n as f64) / config.threshold_rate).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_values() {
        let c = OptimizerConfig::default();
        assert!((threshold_j_l(0, &c) - 0.900).abs() < 1e-15);
        assert!((threshold_j_l(3000, &c) - 0.999).abs() < 1e-5);
        let direct = 0.999 - 0.099 * (-1.0f64).exp();
        assert!((threshold_j_l(300, &c) - direct).abs() < 1e-15);
        assert!((threshold_j_l(300, &c) - 0.96258).abs() < 1e-5);
    }

    #[test]
    fn validation_names_field() {
        let mut c = OptimizerConfig::default();
        assert!(c.validate().is_ok());
        c.alpha = 1.5;
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "optimizer.alpha"),
            other => panic!("{other:?}"),
        }
        let mut c = OptimizerConfig::default();
        c.d2_init = c.d_min;
        assert!(c.validate().is_err());
    }
}
