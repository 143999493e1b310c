//! Two-spin dynamics under piecewise-constant controls.

pub mod propagate;
pub mod pulse;
pub mod pulse_io;

pub use propagate::{
    control_operators, fidelity, fidelity_and_gradients, hamiltonian, propagate, propagate_trajectory, slice_hamiltonian,
    total_unitary, GradientBundle,
};
pub use pulse::{Channel, PulseSequence, SystemModel, CHANNELS};
pub use pulse_io::{read_pulse_csv, write_pulse_csv, PULSE_CSV_HEADER};
