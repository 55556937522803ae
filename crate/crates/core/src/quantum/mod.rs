//! Finite-dimensional quantum state algebra for small registers.
//!
//! Everything here is generic over [`Real`](crate::Real). Registers hold at
//! most eight qubits, one block of four EPR pairs; blocks never become
//! entangled with one another, so they are simulated independently.

mod bell;
mod density;
mod measure;
mod observable;
mod operator;
mod state;

pub use bell::{bell_state, BellSymbol};
pub use density::{
    mismatched_pair_density, partial_trace, reduced_pair_density, DensityMatrix, Keep,
};
pub use measure::{
    bell_measure, bell_outcome_tree, bell_probabilities, bell_project, measure_pair_observable,
    pair_observable_probabilities, sample_branch, z_measure, z_probabilities, OutcomeBranch,
};
pub use observable::{correlation_operator, expectation, Direction, Pauli, TwoQubitState};
pub use operator::{hermitian_eigenvalues, Operator};
pub use state::{StateVector, MAX_QUBITS};
