//! Time-optimal Bell-state preparation on a two-spin (¹³C–¹H) system.
//!
//! The crate combines a model of the spin pair ([`dynamics`]) with an
//! emulated laboratory ([`experiment`]) and runs a dual-objective gradient
//! optimizer ([`optimizer`]) that raises the singlet fidelity while
//! shrinking the pulse length. [`cartan`] supplies the two-qubit canonical
//! decomposition and the theoretical minimum times used as benchmarks.
//!
//! The linear-algebra and propagation layers are generic over the scalar
//! type; the aliases below fix them to `f64`, which is what the optimizer
//! and the experiment emulator run on.

pub mod cartan;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod optimizer;
pub mod quantum;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix4 = quantum::ComplexMatrix4<f64>;
pub type ComplexMatrix2 = quantum::ComplexMatrix2<f64>;
pub type StateVector4 = quantum::StateVector4<f64>;
pub type Hermitian = quantum::Hermitian<f64>;
pub type Unitary = quantum::Unitary<f64>;
pub type DensityMatrix = quantum::DensityMatrix<f64>;
pub type PulseSequence = dynamics::PulseSequence<f64>;
pub type SystemModel = dynamics::SystemModel<f64>;
pub type GradientBundle = dynamics::GradientBundle<f64>;

/// Coupling constant of the ¹³C–¹H pair in Hz.
pub const NOMINAL_COUPLING_HZ: f64 = 217.4;
