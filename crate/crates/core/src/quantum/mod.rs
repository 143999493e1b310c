//! Dense complex linear algebra for two-qubit states and operators.

pub mod eigen;
pub mod matrix;
pub mod ops;
pub mod pauli;

pub use eigen::{eigh, Eigh};
pub use matrix::{ComplexMatrix2, ComplexMatrix4, StateVector4};
pub use ops::{expectation, expm_hermitian, state_fidelity, DensityMatrix, Hermitian, Unitary};
pub use pauli::{pauli_string, Pauli, PauliString};
