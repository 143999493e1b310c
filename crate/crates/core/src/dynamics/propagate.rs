//! Hamiltonian assembly, piecewise-constant propagation and exact gradients.

use num_complex::Complex;
use num_traits::Zero;

use super::pulse::{PulseSequence, SystemModel, CHANNELS};
use crate::error::{Error, Result};
use crate::quantum::ops::fidelity_unchecked;
use crate::quantum::{Eigh, Hermitian, Pauli, StateVector4, Unitary};
use crate::quantum::{pauli_string, ComplexMatrix4};
use crate::scalar::Real;

/// Fidelity with its derivatives with respect to every control amplitude
/// (per Hz) and the total duration (per second).
#[derive(Clone, Debug, PartialEq)]
pub struct GradientBundle<T: Real> {
    pub fidelity: T,
    pub grad_u: Vec<[T; CHANNELS]>,
    pub grad_t: T,
}

impl<T: Real> GradientBundle<T> {
    /// Σ g_u² over all slices and channels.
    pub fn grad_u_norm_sqr(&self) -> T {
        self.grad_u.iter().flat_map(|r| r.iter()).map(|&g| g * g).sum()
    }
}

/// The operators multiplying each channel amplitude: X₁, Y₁, X₂, Y₂.
pub fn control_operators<T: Real>() -> [ComplexMatrix4<T>; CHANNELS] {
    [
        pauli_string(Pauli::X, Pauli::I),
        pauli_string(Pauli::Y, Pauli::I),
        pauli_string(Pauli::I, Pauli::X),
        pauli_string(Pauli::I, Pauli::Y),
    ]
}

/// (π/2)·g·ZZ + π·Σ_k (u_x^k X_k + u_y^k Y_k), in rad/s.
pub fn hamiltonian<T: Real>(coupling_g: T, amps: &[T; CHANNELS]) -> Hermitian<T> {
    let pi = T::PI();
    let mut h = pauli_string::<T>(Pauli::Z, Pauli::Z).scale_real(T::FRAC_PI_2() * coupling_g);
    for (op, &a) in control_operators::<T>().iter().zip(amps) {
        if !a.is_zero() {
            h = h + op.scale_real(pi * a);
        }
    }
    Hermitian::new_unchecked(h)
}

pub fn slice_hamiltonian<T: Real>(model: &SystemModel<T>, pulse: &PulseSequence<T>, m: usize) -> Result<Hermitian<T>> {
    if m >= pulse.slices() {
        return Err(Error::Usage(format!("slice index {m} out of range 0..{}", pulse.slices())));
    }
    Ok(hamiltonian(model.coupling_g(), &pulse.amplitudes()[m]))
}

/// Diagonalized slice propagator exp(−i H Δt).
#[derive(Clone, Copy, Debug)]
pub(crate) struct SlicePropagator<T: Real> {
    eig: Eigh<T>,
    phases: [Complex<T>; 4],
    dt: T,
}

impl<T: Real> SlicePropagator<T> {
    pub(crate) fn new(h: &Hermitian<T>, dt: T) -> Self {
        let eig = h.eigh();
        let phases = eig.values.map(|l| Complex::from_polar(T::one(), -l * dt));
        Self { eig, phases, dt }
    }

    fn to_eigenbasis(&self, psi: &StateVector4<T>) -> [Complex<T>; 4] {
        let v = &self.eig.vectors;
        std::array::from_fn(|k| (0..4).fold(Complex::zero(), |acc, i| acc + v.data[i][k].conj() * psi.amplitudes[i]))
    }

    fn from_eigenbasis(&self, coeffs: &[Complex<T>; 4]) -> StateVector4<T> {
        let v = &self.eig.vectors;
        StateVector4::from_amplitudes(std::array::from_fn(|i| {
            (0..4).fold(Complex::zero(), |acc, k| acc + v.data[i][k] * coeffs[k])
        }))
    }

    pub(crate) fn apply(&self, psi: &StateVector4<T>) -> StateVector4<T> {
        let mut c = self.to_eigenbasis(psi);
        for (z, p) in c.iter_mut().zip(self.phases) {
            *z *= p;
        }
        self.from_eigenbasis(&c)
    }

    pub(crate) fn apply_adjoint(&self, psi: &StateVector4<T>) -> StateVector4<T> {
        let mut c = self.to_eigenbasis(psi);
        for (z, p) in c.iter_mut().zip(self.phases) {
            *z *= p.conj();
        }
        self.from_eigenbasis(&c)
    }

    pub(crate) fn unitary(&self) -> Unitary<T> {
        Unitary::new_unchecked(self.eig.map_values(|l| Complex::from_polar(T::one(), -l * self.dt)))
    }

    /// Kernel Γ_jk with (dU)_eig = Γ ∘ (V† dH V): the divided difference of
    /// exp(−iλΔt), written via sinc so it stays accurate for λ_j ≈ λ_k.
    fn derivative_kernel(&self) -> [[Complex<T>; 4]; 4] {
        let half = T::lit(0.5);
        let dt = self.dt;
        let lam = self.eig.values;
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                let x = (lam[j] - lam[k]) * dt * half;
                let sinc = if x.abs() < T::lit(1e-4) {
                    T::one() - x * x / T::lit(6.0)
                } else {
                    x.sin() / x
                };
                let mid = Complex::from_polar(T::one(), -(lam[j] + lam[k]) * dt * half);
                mid * Complex::new(T::zero(), -dt * sinc)
            })
        })
    }
}

fn propagators<T: Real>(model: &SystemModel<T>, pulse: &PulseSequence<T>) -> Vec<SlicePropagator<T>> {
    let dt = pulse.slice_duration();
    pulse
        .amplitudes()
        .iter()
        .map(|a| SlicePropagator::new(&hamiltonian(model.coupling_g(), a), dt))
        .collect()
}

/// Final state U_M ⋯ U_1 ψ₀.
pub fn propagate<T: Real>(model: &SystemModel<T>, pulse: &PulseSequence<T>, psi0: &StateVector4<T>) -> StateVector4<T> {
    propagators(model, pulse).iter().fold(*psi0, |psi, u| u.apply(&psi))
}

/// All M + 1 intermediate states, starting with ψ₀.
pub fn propagate_trajectory<T: Real>(
    model: &SystemModel<T>,
    pulse: &PulseSequence<T>,
    psi0: &StateVector4<T>,
) -> Vec<StateVector4<T>> {
    let props = propagators(model, pulse);
    let mut states = Vec::with_capacity(props.len() + 1);
    states.push(*psi0);
    for u in &props {
        let next = u.apply(states.last().expect("non-empty"));
        states.push(next);
    }
    states
}

/// Total propagator U(T).
pub fn total_unitary<T: Real>(model: &SystemModel<T>, pulse: &PulseSequence<T>) -> Unitary<T> {
    propagators(model, pulse)
        .iter()
        .fold(Unitary::identity(), |acc, u| u.unitary().compose(&acc))
}

/// Model fidelity |⟨target|ψ(T)⟩|².
pub fn fidelity<T: Real>(
    model: &SystemModel<T>,
    pulse: &PulseSequence<T>,
    psi0: &StateVector4<T>,
    target: &StateVector4<T>,
) -> T {
    fidelity_unchecked(target, &propagate(model, pulse, psi0))
}

/// Fidelity and exact derivatives by one forward and one backward sweep.
///
/// ∂U_m/∂u is taken from the eigendecomposition of H_m (no small-Δt
/// approximation). For the duration, all slices stretch together
/// (Δt = T/M), so ∂U_m/∂T = (−i H_m / M) U_m.
pub fn fidelity_and_gradients<T: Real>(
    model: &SystemModel<T>,
    pulse: &PulseSequence<T>,
    psi0: &StateVector4<T>,
    target: &StateVector4<T>,
) -> GradientBundle<T> {
    let props = propagators(model, pulse);
    let m_count = props.len();

    let mut forward = Vec::with_capacity(m_count + 1);
    forward.push(*psi0);
    for u in &props {
        let next = u.apply(forward.last().expect("non-empty"));
        forward.push(next);
    }
    let overlap = target.inner(&forward[m_count]);
    let fidelity = fidelity_unchecked(target, &forward[m_count]);

    let pi = T::PI();
    let two = T::lit(2.0);
    let inv_m = T::one() / T::from_count(m_count);
    let ops = control_operators::<T>();

    let mut grad_u = vec![[T::zero(); CHANNELS]; m_count];
    let mut grad_t = T::zero();
    // co-state χ_{m+1} = U_{m+1}† ⋯ U_M† |target⟩
    let mut costate = *target;
    for m in (0..m_count).rev() {
        let u = &props[m];
        let chi = u.to_eigenbasis(&costate);
        let psi = u.to_eigenbasis(&forward[m]);
        let kernel = u.derivative_kernel();
        let v = &u.eig.vectors;

        for (c, op) in ops.iter().enumerate() {
            // W = V† (π P_c) V, contracted on the fly
            let w = v.adjoint() * (*op * *v);
            let mut d = Complex::<T>::zero();
            for j in 0..4 {
                let mut row = Complex::<T>::zero();
                for k in 0..4 {
                    row += kernel[j][k] * w.data[j][k] * psi[k];
                }
                d += chi[j].conj() * row;
            }
            grad_u[m][c] = two * (overlap.conj() * d * pi).re;
        }

        let mut dt_term = Complex::<T>::zero();
        for j in 0..4 {
            let lam = u.eig.values[j];
            dt_term += chi[j].conj() * u.phases[j] * psi[j] * Complex::new(T::zero(), -lam);
        }
        grad_t += two * (overlap.conj() * dt_term).re * inv_m;

        costate = u.apply_adjoint(&costate);
    }

    GradientBundle { fidelity, grad_u, grad_t }
}
