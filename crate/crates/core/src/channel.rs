//! Two-line transport between Alice and Bob.
//!
//! A block in flight is its joint register plus the order of the lower-line
//! particles. Qubit `2k` is the upper particle of pair `k` and qubit `2k + 1`
//! its lower partner. Upper particles always travel in preparation order, so
//! slot `p` carries upper particle `p` next to lower particle
//! `lower_order[p]`. Slots are equidistant; the channel never permutes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::Eve;
use crate::error::{CoreError, ProtocolError, QuantumError};
use crate::ops::{apply_core, invert_core, CoreOp, Permutation};
use crate::quantum::{bell_state, BellSymbol, Pauli};
use crate::StateVector;

#[derive(Debug, Clone, PartialEq)]
pub struct InFlightBlock {
    register: StateVector,
    lower_order: Vec<usize>,
}

impl InFlightBlock {
    pub fn new(register: StateVector, lower_order: Vec<usize>) -> Result<Self, ProtocolError> {
        Permutation::new(lower_order.clone())?;
        if register.n_qubits() != 2 * lower_order.len() {
            return Err(QuantumError::Dimension {
                expected: 2 * lower_order.len(),
                got: register.n_qubits(),
            }
            .into());
        }
        Ok(Self {
            register,
            lower_order,
        })
    }

    /// Fresh pairs in `symbols`, lower line in preparation order.
    pub fn prepare(symbols: &[BellSymbol]) -> Result<Self, ProtocolError> {
        let mut pairs = symbols.iter().map(|&s| bell_state::<f64>(s));
        let first = pairs.next().ok_or(ProtocolError::EmptyTranscript)?;
        let register = pairs.try_fold(first, |acc, p| acc.tensor(&p))?;
        Self::new(register, (0..symbols.len()).collect())
    }

    pub fn pairs(&self) -> usize {
        self.lower_order.len()
    }

    pub fn register(&self) -> &StateVector {
        &self.register
    }

    pub fn register_mut(&mut self) -> &mut StateVector {
        &mut self.register
    }

    pub fn into_register(self) -> StateVector {
        self.register
    }

    pub fn lower_order(&self) -> &[usize] {
        &self.lower_order
    }

    pub fn upper_qubit(pair: usize) -> usize {
        2 * pair
    }

    pub fn lower_qubit(pair: usize) -> usize {
        2 * pair + 1
    }

    /// Applies `op` to the lower line.
    pub fn rearranged(mut self, op: &CoreOp) -> Result<Self, CoreError> {
        self.lower_order = apply_core(op, &self.lower_order)?;
        Ok(self)
    }

    /// Lower particle a receiver assuming `op` pairs with each upper
    /// particle: entry `q` partners upper particle `q`.
    pub fn restored_pairing(&self, op: &CoreOp) -> Result<Vec<usize>, CoreError> {
        invert_core(op, &self.lower_order)
    }

    pub fn slots(&self) -> SlotStream {
        SlotStream(
            self.lower_order
                .iter()
                .enumerate()
                .map(|(p, &lower)| Slot {
                    time: p,
                    upper: p,
                    lower,
                })
                .collect(),
        )
    }
}

/// Contents of one time slot: the pair indices of the upper and lower
/// particle travelling in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub time: usize,
    pub upper: usize,
    pub lower: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotStream(pub Vec<Slot>);

impl SlotStream {
    pub fn is_equidistant(&self) -> bool {
        self.0.windows(2).all(|w| w[1].time == w[0].time + 1)
    }
}

/// Where channel noise acts relative to the eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePlacement {
    #[default]
    AfterEve,
    BeforeEve,
}

/// Depolarizes every qubit of `register` independently: with probability
/// `p` the qubit is hit by a uniformly random Pauli from `{I, X, Y, Z}`,
/// which replaces its state by the maximally mixed one on average.
pub fn depolarize<R: Rng + ?Sized>(
    register: &mut StateVector,
    p: f64,
    rng: &mut R,
) -> Result<(), QuantumError> {
    if p <= 0.0 {
        return Ok(());
    }
    for q in 0..register.n_qubits() {
        if rng.random::<f64>() < p {
            let pauli = Pauli::ALL[rng.random_range(0..4)];
            if pauli != Pauli::I {
                register.apply_single(q, &pauli.matrix())?;
            }
        }
    }
    Ok(())
}

/// Carries `block` from Alice to Bob through `eve` and depolarizing noise of
/// strength `noise` (in `[0, 1]`).
pub fn transmit<R: Rng + ?Sized>(
    block: InFlightBlock,
    eve: &mut Eve,
    block_index: usize,
    noise: f64,
    placement: NoisePlacement,
    rng: &mut R,
) -> Result<InFlightBlock, ProtocolError> {
    let mut block = block;
    if placement == NoisePlacement::BeforeEve {
        depolarize(block.register_mut(), noise, rng)?;
    }
    block = eve.intercept(block_index, block, rng)?;
    if placement == NoisePlacement::AfterEve {
        depolarize(block.register_mut(), noise, rng)?;
    }
    Ok(block)
}
