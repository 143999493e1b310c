use crate::error::{Error, Result};

/// ¹³C (spin 1) and ¹H (spin 2) relaxation times in seconds.
pub const SAMPLE_T1_S: [f64; 2] = [0.730, 0.096];
pub const SAMPLE_T2_S: [f64; 2] = [0.0965, 0.0425];

/// Hidden "true" parameters of the emulated laboratory.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Coupling the sample actually has (Hz).
    pub true_g: f64,
    /// Per-channel multiplicative calibration error, (u_x¹, u_y¹, u_x², u_y²).
    pub amplitude_scale: [f64; 4],
    /// First-order low-pass time constant of the probe circuit (s); 0 disables.
    pub distortion_tau: f64,
    /// Longitudinal relaxation per spin (s); `f64::INFINITY` disables.
    pub t1: [f64; 2],
    /// Transverse relaxation per spin (s); `f64::INFINITY` disables.
    pub t2: [f64; 2],
    /// Std-dev of the additive Gaussian noise on each expectation value.
    pub noise_sigma: f64,
    pub seconds_per_measurement: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// A perfect laboratory: the true model equals the nominal one.
    pub fn ideal(coupling_g: f64) -> Self {
        Self {
            true_g: coupling_g,
            amplitude_scale: [1.0; 4],
            distortion_tau: 0.0,
            t1: [f64::INFINITY; 2],
            t2: [f64::INFINITY; 2],
            noise_sigma: 0.0,
            seconds_per_measurement: 10.0,
            seed: 0,
        }
    }

    /// Reference mismatch scenario: coupling 1 % high, spin-1 channels 2 %
    /// weak, 50 µs probe bandwidth limit, σ = 10⁻³ readout noise and the
    /// measured relaxation times of the sample.
    pub fn reference_mismatch(nominal_g: f64, seed: u64) -> Self {
        Self {
            true_g: 1.01 * nominal_g,
            amplitude_scale: [0.98, 0.98, 1.0, 1.0],
            distortion_tau: 50e-6,
            t1: SAMPLE_T1_S,
            t2: SAMPLE_T2_S,
            noise_sigma: 1e-3,
            seconds_per_measurement: 10.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str| format!("experiment.{name}");
        if !(self.true_g > 0.0 && self.true_g.is_finite()) {
            return Err(Error::config(field("true_g_hz"), format!("must be > 0, got {}", self.true_g)));
        }
        for (k, &s) in self.amplitude_scale.iter().enumerate() {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::config(field(&format!("amplitude_scale[{k}]")), format!("must be > 0, got {s}")));
            }
        }
        if !(self.distortion_tau >= 0.0) {
            return Err(Error::config(field("distortion_tau_s"), format!("must be ≥ 0, got {}", self.distortion_tau)));
        }
        for spin in 0..2 {
            let (t1, t2) = (self.t1[spin], self.t2[spin]);
            if !(t1 > 0.0) {
                return Err(Error::config(field(&format!("t1_s[{spin}]")), format!("must be > 0, got {t1}")));
            }
            if !(t2 > 0.0) {
                return Err(Error::config(field(&format!("t2_s[{spin}]")), format!("must be > 0, got {t2}")));
            }
            if t2 > 2.0 * t1 {
                return Err(Error::config(
                    field(&format!("t2_s[{spin}]")),
                    format!("must satisfy t2 ≤ 2·t1 = {}, got {t2}", 2.0 * t1),
                ));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::config(field("noise_sigma"), format!("must be ≥ 0, got {}", self.noise_sigma)));
        }
        if !(self.seconds_per_measurement >= 0.0 && self.seconds_per_measurement.is_finite()) {
            return Err(Error::config(
                field("seconds_per_measurement"),
                format!("must be ≥ 0, got {}", self.seconds_per_measurement),
            ));
        }
        Ok(())
    }

    /// True when the backend reproduces the nominal model exactly.
    pub fn is_ideal_for(&self, nominal_g: f64) -> bool {
        self.true_g == nominal_g
            && self.amplitude_scale == [1.0; 4]
            && self.distortion_tau == 0.0
            && self.t1.iter().all(|t| t.is_infinite())
            && self.t2.iter().all(|t| t.is_infinite())
            && self.noise_sigma == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn physicality_bound() {
        let mut c = ExperimentConfig::reference_mismatch(217.4, 1);
        assert!(c.validate().is_ok());
        c.t2[1] = 2.0 * c.t1[1] + 1e-6;
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "experiment.t2_s[1]"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn ideal_is_valid() {
        let c = ExperimentConfig::ideal(217.4);
        assert!(c.validate().is_ok());
        assert!(c.is_ideal_for(217.4));
        assert!(!ExperimentConfig::reference_mismatch(217.4, 0).is_ideal_for(217.4));
    }
}
