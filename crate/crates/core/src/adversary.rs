//! Eavesdropper strategies acting on whole blocks in flight.
//!
//! Eve sees both lines but not the control key. Her only way to pair the
//! particles is to guess the rearrangement; a wrong guess makes her measure
//! duos drawn from different EPR pairs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::InFlightBlock;
use crate::error::ProtocolError;
use crate::ops::{ControlKey, CoreOp, GroupConfig, PermutationSet};
use crate::protocol::{run_keyed_session, SessionConfig, SessionTranscript};
use crate::quantum::{
    bell_measure, bell_outcome_tree, bell_probabilities, correlation_operator,
    measure_pair_observable, reduced_pair_density, sample_branch, BellSymbol,
};
use crate::{DensityMatrix, Direction, Operator, StateVector};

const WEIGHT_TOL: f64 = 1e-9;

/// Which duo a Bell probe acts on: the two halves of one EPR pair, or the
/// upper half of one pair with the lower half of another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    Matched,
    Mismatched,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EveStrategy {
    #[default]
    None,
    /// Intercept-resend with a guessed operation, drawn per block from
    /// `weights` (indexed by operation number).
    GuessCore { weights: [f64; 4] },
    /// Intercept-resend with the session's own control key.
    KnownKey { key: ControlKey },
    /// Measures `σ·a ⊗ σ·b` on the first `duos_per_block` slots of every
    /// block, pairing the particles that travel side by side.
    BellProbe {
        a: [f64; 3],
        b: [f64; 3],
        duos_per_block: usize,
    },
}

impl EveStrategy {
    pub fn uniform_guess() -> Self {
        Self::GuessCore { weights: [0.25; 4] }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        match self {
            Self::None | Self::KnownKey { .. } => Ok(()),
            Self::GuessCore { weights } => {
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(ProtocolError::Strategy(format!(
                        "guess weights {weights:?} must be finite and non-negative"
                    )));
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > WEIGHT_TOL {
                    return Err(ProtocolError::Strategy(format!(
                        "guess weights sum to {sum}, not 1"
                    )));
                }
                Ok(())
            }
            Self::BellProbe { a, b, .. } => {
                direction(*a)?;
                direction(*b)?;
                Ok(())
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::GuessCore { .. } => "guess_core",
            Self::KnownKey { .. } => "known_key",
            Self::BellProbe { .. } => "bell_probe",
        }
    }
}

fn direction(v: [f64; 3]) -> Result<Direction, ProtocolError> {
    Ok(Direction::new(v[0], v[1], v[2])?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EveLogEntry {
    pub block: usize,
    pub guessed_op: Option<u8>,
    /// Symbol Eve obtained for the duo headed by upper particle `q`.
    pub measured: Vec<BellSymbol>,
    pub resent: Vec<BellSymbol>,
    pub probe_outcomes: Vec<i8>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EveLog {
    pub entries: Vec<EveLogEntry>,
    probe_sum: i64,
    probe_count: u64,
}

impl EveLog {
    pub fn push(&mut self, entry: EveLogEntry) {
        self.probe_sum += entry
            .probe_outcomes
            .iter()
            .map(|&o| i64::from(o))
            .sum::<i64>();
        self.probe_count += entry.probe_outcomes.len() as u64;
        self.entries.push(entry);
    }

    pub fn probe_mean(&self) -> Option<f64> {
        (self.probe_count > 0).then(|| self.probe_sum as f64 / self.probe_count as f64)
    }

    pub fn entry_for_block(&self, block: usize) -> Option<&EveLogEntry> {
        self.entries.iter().find(|e| e.block == block)
    }
}

/// One eavesdropper instance, bound to a session.
#[derive(Debug, Clone)]
pub struct Eve {
    strategy: EveStrategy,
    ops: PermutationSet,
    group: GroupConfig,
    probe: Option<(Operator, usize)>,
    log: EveLog,
}

impl Eve {
    pub fn new(
        strategy: EveStrategy,
        ops: PermutationSet,
        group: GroupConfig,
    ) -> Result<Self, ProtocolError> {
        strategy.validate()?;
        let probe = match &strategy {
            EveStrategy::BellProbe {
                a,
                b,
                duos_per_block,
            } => Some((
                correlation_operator(&direction(*a)?, &direction(*b)?)?,
                *duos_per_block,
            )),
            _ => None,
        };
        Ok(Self {
            strategy,
            ops,
            group,
            probe,
            log: EveLog::default(),
        })
    }

    pub fn strategy(&self) -> &EveStrategy {
        &self.strategy
    }

    pub fn log(&self) -> &EveLog {
        &self.log
    }

    pub fn into_log(self) -> EveLog {
        self.log
    }

    /// Lets Eve act on block `block_index` and returns what she forwards.
    pub fn intercept<R: Rng + ?Sized>(
        &mut self,
        block_index: usize,
        block: InFlightBlock,
        rng: &mut R,
    ) -> Result<InFlightBlock, ProtocolError> {
        let guess = match &self.strategy {
            EveStrategy::None => return Ok(block),
            EveStrategy::GuessCore { weights } => sample_branch(weights, rng.random()) as u8,
            EveStrategy::KnownKey { key } => key.op_index_for_block(block_index, self.group),
            EveStrategy::BellProbe { .. } => {
                let (o, duos) = self.probe.as_ref().expect("built with the strategy");
                let mut register = block.register().clone();
                let mut outcomes = Vec::with_capacity(*duos);
                for (p, &lower) in block.lower_order().iter().enumerate().take(*duos) {
                    let (out, post) = measure_pair_observable(
                        &register,
                        InFlightBlock::upper_qubit(p),
                        InFlightBlock::lower_qubit(lower),
                        o,
                        rng,
                    )?;
                    outcomes.push(out);
                    register = post;
                }
                self.log.push(EveLogEntry {
                    block: block_index,
                    guessed_op: None,
                    measured: Vec::new(),
                    resent: Vec::new(),
                    probe_outcomes: outcomes,
                });
                return InFlightBlock::new(register, block.lower_order().to_vec());
            }
        };
        let op = self.ops.op(guess).clone();
        let (forwarded, measured) = eve_guess_core_attack(block, &op, rng)?;
        self.log.push(EveLogEntry {
            block: block_index,
            guessed_op: Some(guess),
            resent: measured.clone(),
            measured,
            probe_outcomes: Vec::new(),
        });
        Ok(forwarded)
    }
}

/// Intercept-resend under the assumption that `guess` was applied: Eve
/// undoes it, Bell-measures the four duos, prepares fresh pairs in the
/// observed symbols, reapplies `guess` and forwards the result.
pub fn eve_guess_core_attack<R: Rng + ?Sized>(
    block: InFlightBlock,
    guess: &CoreOp,
    rng: &mut R,
) -> Result<(InFlightBlock, Vec<BellSymbol>), ProtocolError> {
    let pairing = block.restored_pairing(guess)?;
    let mut register = block.into_register();
    let mut measured = Vec::with_capacity(pairing.len());
    for (q, &lower) in pairing.iter().enumerate() {
        let (s, post) = bell_measure(
            &register,
            InFlightBlock::upper_qubit(q),
            InFlightBlock::lower_qubit(lower),
            rng,
        )?;
        measured.push(s);
        register = post;
    }
    let forwarded = InFlightBlock::prepare(&measured)?.rearranged(guess)?;
    Ok((forwarded, measured))
}

/// Measures `σ·a ⊗ σ·b` on the first upper particle and either its own
/// partner (`Matched`, qubits 0 and 1) or the second pair's lower particle
/// (`Mismatched`, qubits 0 and 3).
pub fn eve_bell_probe<R: Rng + ?Sized>(
    register: &StateVector,
    pairing: Pairing,
    a: &Direction,
    b: &Direction,
    rng: &mut R,
) -> Result<(i8, StateVector), ProtocolError> {
    let o = correlation_operator(a, b)?;
    probe_with(register, pairing, &o, rng)
}

/// [`eve_bell_probe`] with a prebuilt correlation operator.
pub fn probe_with<R: Rng + ?Sized>(
    register: &StateVector,
    pairing: Pairing,
    o: &Operator,
    rng: &mut R,
) -> Result<(i8, StateVector), ProtocolError> {
    let lower = match pairing {
        Pairing::Matched => InFlightBlock::lower_qubit(0),
        Pairing::Mismatched => InFlightBlock::lower_qubit(1),
    };
    Ok(measure_pair_observable(register, 0, lower, o, rng)?)
}

/// Runs a keyed session in which Eve holds `key` and uses it to pair the
/// particles correctly.
pub fn eve_known_key_attack(
    cfg: &SessionConfig,
    key: ControlKey,
) -> Result<SessionTranscript, ProtocolError> {
    let mut cfg = cfg.clone();
    cfg.eve = EveStrategy::KnownKey { key };
    run_keyed_session(&cfg)
}

/// Exact effect of a guess-and-resend on one restored pair, averaged over
/// Eve's outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    /// Probability that Bob's Bell measurement disagrees with Alice.
    pub error: f64,
    /// Reduced state of the duo Bob measures.
    pub density: DensityMatrix,
}

/// Enumerates every outcome of Eve's four Bell measurements on a block
/// prepared in `symbols` and rearranged by `true_op`, given that she assumes
/// `guess`. Bob undoes `true_op`. Returns one [`PairOutcome`] per pair.
pub fn exact_guess_outcome(
    symbols: &[BellSymbol],
    true_op: &CoreOp,
    guess: &CoreOp,
) -> Result<Vec<PairOutcome>, ProtocolError> {
    let block = InFlightBlock::prepare(symbols)?.rearranged(true_op)?;
    let eve_pairing = block.restored_pairing(guess)?;
    let duos: Vec<(usize, usize)> = eve_pairing
        .iter()
        .enumerate()
        .map(|(q, &l)| (InFlightBlock::upper_qubit(q), InFlightBlock::lower_qubit(l)))
        .collect();

    let n = symbols.len();
    let mut error = vec![0.0; n];
    let mut density = vec![Operator::zeros(4); n];
    for (w, measured, _) in bell_outcome_tree(block.register(), &duos)? {
        let resent = InFlightBlock::prepare(&measured)?.rearranged(guess)?;
        let bob_pairing = resent.restored_pairing(true_op)?;
        for (q, &l) in bob_pairing.iter().enumerate() {
            let (i, j) = (InFlightBlock::upper_qubit(q), InFlightBlock::lower_qubit(l));
            let probs = bell_probabilities(resent.register(), i, j)?;
            let k = BellSymbol::ALL
                .iter()
                .position(|s| *s == symbols[q])
                .expect("listed");
            error[q] += w * (1.0 - probs[k]);
            let rho = reduced_pair_density(resent.register(), i, j)?;
            density[q] = density[q].add(&rho.operator().scale(w));
        }
    }
    error
        .into_iter()
        .zip(density)
        .map(|(error, op)| {
            Ok(PairOutcome {
                error,
                density: DensityMatrix::new(op)?,
            })
        })
        .collect()
}
