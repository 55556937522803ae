//! Exact simulation of controlled order rearrangement encryption (CORE)
//! quantum key distribution.
//!
//! Alice prepares EPR pairs in random Bell states, reorders the lower halves
//! of every block of four pairs under a short, cyclically reused control key,
//! and Bob undoes the rearrangement before a Bell-basis measurement. An
//! eavesdropper without the key pairs the wrong particles and, after
//! measuring and re-preparing, leaves Bob with maximally mixed duos.
//!
//! The crate is split into
//!
//! * [`quantum`]: a dense state-vector engine for registers of up to eight
//!   qubits, generic over the floating-point scalar,
//! * [`ops`]: the four rearrangement operations, the switch/delay-loop device
//!   that realizes them and the control-key stream,
//! * [`channel`], [`adversary`] and [`protocol`]: the two-line transport, the
//!   eavesdropper strategies and the Alice/Bob session state machines.
//!
//! Basis ordering is big-endian by qubit index everywhere: qubit 0 is the most
//! significant bit of an amplitude index.

pub mod adversary;
pub mod channel;
pub mod error;
pub mod ops;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod scalar;

pub use error::{CoreError, DeviceError, ProtocolError, QuantumError};
pub use scalar::Real;

pub use quantum::{BellSymbol, Keep};

/// Complex scalar used throughout the state engine.
pub type Complex<T> = num_complex::Complex<T>;

/// Double-precision state vector, the protocol layer's working type.
pub type StateVector = quantum::StateVector<f64>;
/// Single-precision state vector.
pub type StateVector32 = quantum::StateVector<f32>;
/// Double-precision density matrix.
pub type DensityMatrix = quantum::DensityMatrix<f64>;
/// Single-precision density matrix.
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
/// Double-precision square operator.
pub type Operator = quantum::Operator<f64>;
/// Single-precision square operator.
pub type Operator32 = quantum::Operator<f32>;
/// Double-precision measurement direction.
pub type Direction = quantum::Direction<f64>;
/// Single-precision measurement direction.
pub type Direction32 = quantum::Direction<f32>;
