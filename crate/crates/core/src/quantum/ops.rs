//! Role-tagged operators and the basic quantum-mechanical operations on them.

use num_complex::Complex;
use num_traits::Zero;

use super::eigen::{eigh, Eigh};
use super::matrix::{ComplexMatrix4, StateVector4};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A matrix validated as Hermitian (`max |A − A†| ≤ 1e-12 · max(1, max |A|)`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hermitian<T: Real>(ComplexMatrix4<T>);

/// A matrix validated as unitary (`max |U†U − I| ≤ structural_tol`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary<T: Real>(ComplexMatrix4<T>);

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T: Real>(ComplexMatrix4<T>);

impl<T: Real> Hermitian<T> {
    pub fn new(m: ComplexMatrix4<T>) -> Result<Self> {
        // bound is relative to the entry scale: Hamiltonians in rad/s have
        // entries of order 10^4
        let defect = m.hermiticity_defect();
        if !(defect <= T::scalar_tol() * m.max_abs().max(T::one())) {
            return Err(Error::Domain(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(Self(m))
    }

    /// Wrap a matrix that is Hermitian by construction.
    pub(crate) fn new_unchecked(m: ComplexMatrix4<T>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix4<T> {
        &self.0
    }

    pub fn eigh(&self) -> Eigh<T> {
        eigh(&self.0)
    }
}

impl<T: Real> Unitary<T> {
    pub fn new(m: ComplexMatrix4<T>) -> Result<Self> {
        let defect = m.unitarity_defect();
        if !(defect <= T::structural_tol()) {
            return Err(Error::Domain(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix4<T>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(ComplexMatrix4::identity())
    }

    pub fn matrix(&self) -> &ComplexMatrix4<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix4<T> {
        self.0
    }

    pub fn apply(&self, psi: &StateVector4<T>) -> StateVector4<T> {
        self.0.apply(psi)
    }

    pub fn compose(&self, rhs: &Unitary<T>) -> Unitary<T> {
        Unitary(self.0 * rhs.0)
    }

    pub fn adjoint(&self) -> Unitary<T> {
        Unitary(self.0.adjoint())
    }
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: ComplexMatrix4<T>) -> Result<Self> {
        let tol = T::structural_tol();
        let defect = m.hermiticity_defect();
        if !(defect <= tol) {
            return Err(Error::Domain(format!("density matrix is not Hermitian (defect {defect:e})")));
        }
        let tr = m.trace();
        if !((tr.re - T::one()).abs() <= tol && tr.im.abs() <= tol) {
            return Err(Error::Domain(format!("density matrix trace {} + {}i is not 1", tr.re, tr.im)));
        }
        let min_eig = eigh(&m).values[0];
        if min_eig < -tol {
            return Err(Error::Domain(format!("density matrix has negative eigenvalue {min_eig:e}")));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix4<T>) -> Self {
        Self(m)
    }

    pub fn pure(psi: &StateVector4<T>) -> Self {
        Self(psi.projector())
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix4::identity().scale_real(T::lit(0.25)))
    }

    pub fn matrix(&self) -> &ComplexMatrix4<T> {
        &self.0
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn overlap(&self, psi: &StateVector4<T>) -> T {
        psi.inner(&self.0.apply(psi)).re
    }
}

/// exp(−i H t) via the eigendecomposition of `H`.
pub fn expm_hermitian<T: Real>(h: &Hermitian<T>, t: T) -> Unitary<T> {
    let e = h.eigh();
    Unitary::new_unchecked(e.map_values(|lambda| Complex::from_polar(T::one(), -lambda * t)))
}

/// |⟨ψ|φ⟩|² for normalized states.
pub fn state_fidelity<T: Real>(psi: &StateVector4<T>, phi: &StateVector4<T>) -> Result<T> {
    for (name, s) in [("first", psi), ("second", phi)] {
        let n = s.norm();
        if !((n - T::one()).abs() <= T::structural_tol()) {
            return Err(Error::Domain(format!("{name} state has norm {n}, expected 1")));
        }
    }
    Ok(fidelity_unchecked(psi, phi))
}

pub(crate) fn fidelity_unchecked<T: Real>(psi: &StateVector4<T>, phi: &StateVector4<T>) -> T {
    // the two inner products round differently; taking the smaller makes
    // the result exactly symmetric in its arguments
    let a = psi.inner(phi).norm_sqr();
    let b = phi.inner(psi).norm_sqr();
    a.min(b).max(T::zero())
}

/// Tr(ρ O) for a density matrix and a Hermitian observable.
pub fn expectation<T: Real>(rho: &DensityMatrix<T>, observable: &Hermitian<T>) -> T {
    expectation_raw(rho.matrix(), observable.matrix())
}

pub(crate) fn expectation_raw<T: Real>(rho: &ComplexMatrix4<T>, o: &ComplexMatrix4<T>) -> T {
    let mut acc = Complex::<T>::zero();
    for i in 0..4 {
        for j in 0..4 {
            acc = acc + rho.data[i][j] * o.data[j][i];
        }
    }
    acc.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::pauli::{pauli_string, Pauli, PauliString};

    #[test]
    fn expm_at_zero_time_is_identity() {
        let h = Hermitian::new(pauli_string::<f64>(Pauli::X, Pauli::Y) + pauli_string(Pauli::Z, Pauli::I)).unwrap();
        let u = expm_hermitian(&h, 0.0);
        assert!(u.matrix().max_abs_diff(&ComplexMatrix4::identity()) < 1e-15);
    }

    #[test]
    fn zz_quarter_turn() {
        // H = (π/2) g ZZ, t = 1/(2g) ⇒ phase π/4 on each diagonal entry
        let g = 217.4;
        let zz = pauli_string::<f64>(Pauli::Z, Pauli::Z);
        let h = Hermitian::new(zz.scale_real(std::f64::consts::FRAC_PI_2 * g)).unwrap();
        let u = expm_hermitian(&h, 1.0 / (2.0 * g));
        let q = std::f64::consts::FRAC_PI_4;
        let m = Complex::from_polar(1.0, -q);
        let p = Complex::from_polar(1.0, q);
        let expected = ComplexMatrix4::from_diagonal([m, p, p, m]);
        assert!(u.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = pauli_string::<f64>(Pauli::X, Pauli::I);
        m.data[0][2] = Complex::new(0.5, 0.0);
        assert!(matches!(Hermitian::new(m), Err(Error::Domain(_))));
    }

    #[test]
    fn fidelity_cases() {
        let g = StateVector4::<f64>::singlet();
        assert!((state_fidelity(&g, &g).unwrap() - 1.0).abs() < 1e-15);
        assert!(state_fidelity(&StateVector4::basis(0), &g).unwrap().abs() < 1e-15);
        let phased = g.scale(Complex::from_polar(1.0, 0.731));
        assert!((state_fidelity(&phased, &g).unwrap() - 1.0).abs() < 1e-15);
        let bad = StateVector4::from_amplitudes([Complex::new(2.0, 0.0), Complex::zero(), Complex::zero(), Complex::zero()]);
        assert!(matches!(state_fidelity(&bad, &g), Err(Error::Domain(_))));
    }

    #[test]
    fn expectation_cases() {
        let zz = Hermitian::new(PauliString::ZZ.matrix::<f64>()).unwrap();
        let xx = Hermitian::new(PauliString::XX.matrix::<f64>()).unwrap();
        let yy = Hermitian::new(PauliString::YY.matrix::<f64>()).unwrap();
        let ground = DensityMatrix::pure(&StateVector4::basis(0));
        assert!((expectation(&ground, &zz) - 1.0).abs() < 1e-15);

        let singlet = DensityMatrix::pure(&StateVector4::singlet());
        assert!((expectation(&singlet, &xx) + 1.0).abs() < 1e-14);
        let projector = (1.0 - expectation(&singlet, &xx) - expectation(&singlet, &yy) - expectation(&singlet, &zz)) / 4.0;
        assert!((projector - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix::<f64>::maximally_mixed();
        for p in PauliString::nontrivial() {
            let o = Hermitian::new(p.matrix()).unwrap();
            assert!(expectation(&mixed, &o).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_density_rejected() {
        let two = ComplexMatrix4::<f64>::identity().scale_real(0.5);
        assert!(DensityMatrix::new(two).is_err());
        let mut neg = ComplexMatrix4::<f64>::zeros();
        neg.data[0][0] = Complex::new(1.5, 0.0);
        neg.data[1][1] = Complex::new(-0.5, 0.0);
        assert!(DensityMatrix::new(neg).is_err());
    }
}
