//! Emulated spectrometer: open-system evolution under the hidden true model
//! and noisy Pauli readout.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::ExperimentConfig;
use super::ledger::{MeasurementKind, MeasurementLedger};
use crate::dynamics::{hamiltonian, CHANNELS};
use crate::error::{Error, Result};
use crate::quantum::ops::expectation_raw;
use crate::quantum::{eigh, expm_hermitian, ComplexMatrix2, PauliString};
use crate::{ComplexMatrix4, DensityMatrix, PulseSequence, StateVector4};

/// Per-channel first-order low-pass with zero initial condition:
/// `y[m] = y[m−1] + (1 − e^{−Δt_m/τ}) (u[m] − y[m−1])`.
pub fn low_pass(amplitudes: &[[f64; CHANNELS]], durations: &[f64], tau: f64) -> Vec<[f64; CHANNELS]> {
    if tau == 0.0 {
        return amplitudes.to_vec();
    }
    let mut y = [0.0; CHANNELS];
    amplitudes
        .iter()
        .zip(durations)
        .map(|(u, &dt)| {
            let k = if tau.is_infinite() { 0.0 } else { -(-dt / tau).exp_m1() };
            for c in 0..CHANNELS {
                y[c] += k * (u[c] - y[c]);
            }
            y
        })
        .collect()
}

pub fn distort_pulse(pulse: &PulseSequence, tau: f64) -> Result<PulseSequence> {
    if !(tau >= 0.0) {
        return Err(Error::Usage(format!("distortion time constant must be ≥ 0, got {tau}")));
    }
    let durations = vec![pulse.slice_duration(); pulse.slices()];
    PulseSequence::new(pulse.duration(), low_pass(pulse.amplitudes(), &durations, tau))
}

fn single_spin_kraus(t1: f64, t2: f64, dt: f64) -> Vec<ComplexMatrix2<f64>> {
    let r = |x: f64| Complex64::new(x, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let mut ops = Vec::with_capacity(4);
    let gamma = if t1.is_infinite() { 0.0 } else { -(-dt / t1).exp_m1() };
    let dephasing_rate = 1.0 / t2 - 0.5 / t1;
    let f = (-dt * dephasing_rate.max(0.0)).exp();
    let lambda = 1.0 - f * f;
    // amplitude damping followed by pure dephasing
    let ad = [
        ComplexMatrix2::new([[r(1.0), z], [z, r((1.0 - gamma).sqrt())]]),
        ComplexMatrix2::new([[z, r(gamma.sqrt())], [z, z]]),
    ];
    let pd = [
        ComplexMatrix2::new([[r(1.0), z], [z, r((1.0 - lambda).sqrt())]]),
        ComplexMatrix2::new([[z, z], [z, r(lambda.sqrt())]]),
    ];
    for p in &pd {
        for a in &ad {
            let k = *p * *a;
            if k.max_abs_diff(&ComplexMatrix2::zeros()) > 0.0 {
                ops.push(k);
            }
        }
    }
    ops
}

fn apply_channel(rho: &ComplexMatrix4, kraus: &[ComplexMatrix4]) -> ComplexMatrix4 {
    kraus
        .iter()
        .fold(ComplexMatrix4::zeros(), |acc, k| acc + *k * *rho * k.adjoint())
}

/// One emulated laboratory: configuration, private random stream and ledger.
/// Drive a single instance from one sequential caller.
#[derive(Clone, Debug)]
pub struct Experiment {
    config: ExperimentConfig,
    rng: ChaCha8Rng,
    ledger: MeasurementLedger,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            ledger: MeasurementLedger::new(config.seconds_per_measurement),
            config,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn ledger(&self) -> &MeasurementLedger {
        &self.ledger
    }

    /// Charge measurements without running them (used for cost accounting
    /// of probe schemes whose count is fixed by convention).
    pub fn charge(&mut self, kind: MeasurementKind, count: u64) {
        self.ledger.charge(kind, count);
    }

    fn has_relaxation(&self) -> bool {
        self.config.t1.iter().chain(self.config.t2.iter()).any(|t| t.is_finite())
    }

    /// Density matrix after the pulse, with per-slice durations (the uniform
    /// case is `T/M` for every slice).
    pub fn evolve_with_durations(
        &self,
        amplitudes: &[[f64; CHANNELS]],
        durations: &[f64],
        rho0: &DensityMatrix,
    ) -> Result<DensityMatrix> {
        if amplitudes.len() != durations.len() || amplitudes.is_empty() {
            return Err(Error::Usage(format!(
                "{} amplitude slices but {} durations",
                amplitudes.len(),
                durations.len()
            )));
        }
        let cfg = &self.config;
        let distorted = low_pass(amplitudes, durations, cfg.distortion_tau);
        let relax = self.has_relaxation();
        let mut rho = *rho0.matrix();
        let mut kraus_cache: Option<(f64, Vec<ComplexMatrix4>)> = None;
        for (u, &dt) in distorted.iter().zip(durations) {
            let scaled: [f64; CHANNELS] = std::array::from_fn(|c| u[c] * cfg.amplitude_scale[c]);
            let step = expm_hermitian(&hamiltonian(cfg.true_g, &scaled), dt);
            let m = *step.matrix();
            rho = m * rho * m.adjoint();
            if relax {
                let kraus = match &kraus_cache {
                    Some((cached_dt, k)) if *cached_dt == dt => k,
                    _ => {
                        let id = ComplexMatrix2::identity();
                        let spin1 = single_spin_kraus(cfg.t1[0], cfg.t2[0], dt);
                        let spin2 = single_spin_kraus(cfg.t1[1], cfg.t2[1], dt);
                        let mut joint = Vec::with_capacity(spin1.len() * spin2.len());
                        for a in &spin1 {
                            for b in &spin2 {
                                joint.push(a.kron(&id) * id.kron(b));
                            }
                        }
                        &kraus_cache.insert((dt, joint)).1
                    }
                };
                rho = apply_channel(&rho, kraus);
            }
        }
        // remove rounding asymmetry
        let rho = (rho + rho.adjoint()).scale_real(0.5);
        Ok(DensityMatrix::new_unchecked(rho))
    }

    /// Open-system evolution of `rho0` under the distorted, miscalibrated
    /// pulse and the true coupling, with relaxation applied after every slice.
    pub fn evolve_open(&self, pulse: &PulseSequence, rho0: &DensityMatrix) -> DensityMatrix {
        let durations = vec![pulse.slice_duration(); pulse.slices()];
        self.evolve_with_durations(pulse.amplitudes(), &durations, rho0)
            .expect("pulse shape is valid by construction")
    }

    /// Tr(ρO) plus Gaussian readout noise, clamped to [−1−5σ, 1+5σ].
    pub fn measure_pauli(&mut self, rho: &DensityMatrix, observable: PauliString, kind: MeasurementKind) -> f64 {
        let exact = expectation_raw(rho.matrix(), &observable.matrix());
        let xi: f64 = StandardNormal.sample(&mut self.rng);
        let sigma = self.config.noise_sigma;
        self.ledger.charge(kind, 1);
        let bound = 1.0 + 5.0 * sigma;
        (exact + sigma * xi).clamp(-bound, bound)
    }

    fn ground_state() -> DensityMatrix {
        DensityMatrix::pure(&StateVector4::basis(0))
    }

    /// Singlet fidelity estimate (1 − ⟨XX⟩ − ⟨YY⟩ − ⟨ZZ⟩)/4 from three readouts.
    pub fn fidelity_partial(&mut self, pulse: &PulseSequence) -> f64 {
        self.fidelity_partial_as(pulse, MeasurementKind::FidelityPartial)
    }

    /// As [`Self::fidelity_partial`], charged to `kind`.
    pub fn fidelity_partial_as(&mut self, pulse: &PulseSequence, kind: MeasurementKind) -> f64 {
        let rho = self.evolve_open(pulse, &Self::ground_state());
        self.partial_readout(&rho, kind)
    }

    pub(crate) fn fidelity_partial_with_durations(
        &mut self,
        amplitudes: &[[f64; CHANNELS]],
        durations: &[f64],
        kind: MeasurementKind,
    ) -> f64 {
        let rho = self
            .evolve_with_durations(amplitudes, durations, &Self::ground_state())
            .expect("shapes validated by caller");
        self.partial_readout(&rho, kind)
    }

    fn partial_readout(&mut self, rho: &DensityMatrix, kind: MeasurementKind) -> f64 {
        let xx = self.measure_pauli(rho, PauliString::XX, kind);
        let yy = self.measure_pauli(rho, PauliString::YY, kind);
        let zz = self.measure_pauli(rho, PauliString::ZZ, kind);
        (1.0 - xx - yy - zz) / 4.0
    }

    /// Full tomography: all 15 nontrivial Pauli expectations, linear inversion,
    /// projection onto the nearest density matrix, then ⟨ψ_g|ρ|ψ_g⟩.
    pub fn fidelity_full(&mut self, pulse: &PulseSequence) -> f64 {
        let rho = self.evolve_open(pulse, &Self::ground_state());
        let estimate = self.tomography(&rho);
        estimate.overlap(&StateVector4::singlet())
    }

    /// Reconstructed (and projected) state from 15 noisy Pauli readouts.
    pub fn tomography(&mut self, rho: &DensityMatrix) -> DensityMatrix {
        let mut m = ComplexMatrix4::identity();
        for p in PauliString::nontrivial() {
            let v = self.measure_pauli(rho, p, MeasurementKind::FidelityFull);
            m = m + p.matrix().scale_real(v);
        }
        project_to_density(&m.scale_real(0.25))
    }
}

/// Nearest valid density matrix by eigenvalue clipping and renormalization.
pub fn project_to_density(m: &ComplexMatrix4) -> DensityMatrix {
    let sym = (*m + m.adjoint()).scale_real(0.5);
    let e = eigh(&sym);
    let clipped = e.values.map(|v| v.max(0.0));
    let total: f64 = clipped.iter().sum();
    let values = if total > 0.0 { clipped.map(|v| v / total) } else { [0.25; 4] };
    let projected = crate::quantum::Eigh { values, vectors: e.vectors }.reconstruct();
    DensityMatrix::new_unchecked((projected + projected.adjoint()).scale_real(0.5))
}
