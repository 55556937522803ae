//! Alice and Bob.
//!
//! In keyed mode both parties derive each block's operation from the shared
//! control key. In bootstrap mode they pick operations independently, publish
//! them afterwards and keep only blocks where the choices agree; the bits of
//! those blocks become a candidate control key.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{Eve, EveLog, EveStrategy};
use crate::channel::{transmit, InFlightBlock, NoisePlacement};
use crate::error::ProtocolError;
use crate::ops::{ControlKey, CoreOp, GroupConfig, PermutationSet, BLOCK_SIZE};
use crate::quantum::{bell_measure, BellSymbol};
use crate::rng::{seeded, SimRng};
use crate::StateVector;

/// Slack when rounding `fraction · n` up, so that e.g. `0.1 · 100` counts
/// as exactly 10.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Keyed,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub n_blocks: usize,
    pub block_size: usize,
    pub control_key: ControlKey,
    pub group: GroupConfig,
    pub check_fraction: f64,
    pub error_threshold: f64,
    pub seed: u64,
    pub mode: Mode,
    pub eve: EveStrategy,
    pub noise: f64,
    pub noise_placement: NoisePlacement,
    pub permutations: PermutationSet,
    /// Length of the candidate key a bootstrap session must deliver; 0 keeps
    /// every surviving bit.
    pub bootstrap_key_bits: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            n_blocks: 256,
            block_size: BLOCK_SIZE,
            control_key: ControlKey::parse("00011011").expect("valid literal"),
            group: GroupConfig::default(),
            check_fraction: 0.25,
            error_threshold: 0.11,
            seed: 0,
            mode: Mode::Keyed,
            eve: EveStrategy::None,
            noise: 0.0,
            noise_placement: NoisePlacement::AfterEve,
            permutations: PermutationSet::default(),
            bootstrap_key_bits: 0,
        }
    }
}

impl SessionConfig {
    pub fn n_pairs(&self) -> usize {
        self.n_blocks * self.block_size
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let bad = |msg: String| Err(ProtocolError::Config(msg));
        if self.n_blocks == 0 {
            return bad("n_blocks must be at least 1".into());
        }
        if self.block_size != BLOCK_SIZE || self.permutations.block_size() != BLOCK_SIZE {
            return bad(format!(
                "block_size must be {BLOCK_SIZE}, got {}",
                self.block_size
            ));
        }
        if !(self.check_fraction > 0.0 && self.check_fraction < 1.0) {
            return bad(format!(
                "check_fraction {} is outside (0, 1)",
                self.check_fraction
            ));
        }
        if check_count(self.check_fraction, self.n_pairs()) >= self.n_pairs() {
            return bad(format!(
                "check_fraction {} leaves no unchecked pair out of {}",
                self.check_fraction,
                self.n_pairs()
            ));
        }
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return bad(format!(
                "error_threshold {} is outside [0, 1]",
                self.error_threshold
            ));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return bad(format!("noise {} is outside [0, 1]", self.noise));
        }
        if !self.bootstrap_key_bits.is_multiple_of(2) {
            return bad(format!(
                "bootstrap_key_bits {} must be even",
                self.bootstrap_key_bits
            ));
        }
        self.eve.validate()
    }
}

fn check_count(fraction: f64, eligible: usize) -> usize {
    let c = (fraction * eligible as f64 - CEIL_SLACK).ceil().max(0.0) as usize;
    c.min(eligible)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub block: usize,
    pub position: usize,
    pub prepared: BellSymbol,
    pub measured: BellSymbol,
    /// Both parties used the same operation on this block.
    pub sifted: bool,
    pub checked: bool,
    pub eve_measured: Option<BellSymbol>,
}

impl PairRecord {
    pub fn agrees(&self) -> bool {
        self.prepared == self.measured
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockRecord {
    pub index: usize,
    pub alice_op: u8,
    pub bob_op: u8,
    pub eve_guess: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictReport {
    pub accepted: bool,
    pub measured_error_rate: f64,
    pub threshold: f64,
    pub checked_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionTranscript {
    pub config: SessionConfig,
    pub pairs: Vec<PairRecord>,
    pub blocks: Vec<BlockRecord>,
    pub verdict: Option<VerdictReport>,
    pub eve_log: EveLog,
}

/// Statistics derived from a transcript.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionStats {
    pub n_pairs: usize,
    pub n_sifted: usize,
    pub n_checked: usize,
    /// Disagreement over every sifted pair.
    pub error_rate: f64,
    /// Disagreement over the checked subset.
    pub checked_error_rate: Option<f64>,
    /// Disagreement over sifted pairs in blocks where Eve's guess differed
    /// from Bob's operation.
    pub wrong_guess_error_rate: Option<f64>,
    pub sift_rate: f64,
    pub sifted_agreement: Option<f64>,
    pub discarded_agreement: Option<f64>,
    /// Fraction of pairs Eve measured whose symbol she got right.
    pub eve_accuracy: Option<f64>,
    pub probe_mean: Option<f64>,
    pub accepted: Option<bool>,
    pub key_bits: usize,
}

fn rate(hits: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| hits as f64 / total as f64)
}

impl SessionTranscript {
    pub fn stats(&self) -> SessionStats {
        let count = |f: &dyn Fn(&PairRecord) -> bool| self.pairs.iter().filter(|p| f(p)).count();
        let n_sifted = count(&|p| p.sifted);
        let n_checked = count(&|p| p.checked);
        let sifted_agree = count(&|p| p.sifted && p.agrees());
        let discarded = count(&|p| !p.sifted);
        let discarded_agree = count(&|p| !p.sifted && p.agrees());

        let wrong_block = |b: usize| {
            let r = &self.blocks[b];
            r.eve_guess.is_some_and(|g| g != r.bob_op)
        };
        let wrong = count(&|p| p.sifted && wrong_block(p.block));
        let wrong_err = count(&|p| p.sifted && wrong_block(p.block) && !p.agrees());

        let eve_seen = count(&|p| p.eve_measured.is_some());
        let eve_right = count(&|p| p.eve_measured == Some(p.prepared));

        let key_bits = match self.verdict {
            Some(v) if v.accepted => 2 * count(&|p| p.sifted && !p.checked),
            _ => 0,
        };
        SessionStats {
            n_pairs: self.pairs.len(),
            n_sifted,
            n_checked,
            error_rate: rate(n_sifted - sifted_agree, n_sifted).unwrap_or(0.0),
            checked_error_rate: self.verdict.map(|v| v.measured_error_rate),
            wrong_guess_error_rate: rate(wrong_err, wrong),
            sift_rate: rate(
                self.blocks
                    .iter()
                    .filter(|b| b.alice_op == b.bob_op)
                    .count(),
                self.blocks.len(),
            )
            .unwrap_or(0.0),
            sifted_agreement: rate(sifted_agree, n_sifted),
            discarded_agreement: rate(discarded_agree, discarded),
            eve_accuracy: rate(eve_right, eve_seen),
            probe_mean: self.eve_log.probe_mean(),
            accepted: self.verdict.map(|v| v.accepted),
            key_bits,
        }
    }
}

/// Four uniformly random Bell symbols and their joint 8-qubit register.
pub fn alice_prepare_block<R: Rng + ?Sized>(
    rng: &mut R,
) -> Result<(Vec<BellSymbol>, StateVector), ProtocolError> {
    let symbols: Vec<BellSymbol> = (0..BLOCK_SIZE)
        .map(|_| BellSymbol::ALL[rng.random_range(0..4)])
        .collect();
    let register = prepare_register(&symbols)?;
    Ok((symbols, register))
}

/// Tensor product of the Bell pairs named by `symbols`, pair 0 first.
pub fn prepare_register(symbols: &[BellSymbol]) -> Result<StateVector, ProtocolError> {
    Ok(InFlightBlock::prepare(symbols)?.into_register())
}

/// Bob's side of one block: undo `op` and Bell-measure every restored pair.
pub fn bob_measure_block<R: Rng + ?Sized>(
    block: InFlightBlock,
    op: &CoreOp,
    rng: &mut R,
) -> Result<Vec<BellSymbol>, ProtocolError> {
    let pairing = block.restored_pairing(op)?;
    let mut register = block.into_register();
    let mut out = Vec::with_capacity(pairing.len());
    for (q, &lower) in pairing.iter().enumerate() {
        let (s, post) = bell_measure(
            &register,
            InFlightBlock::upper_qubit(q),
            InFlightBlock::lower_qubit(lower),
            rng,
        )?;
        out.push(s);
        register = post;
    }
    Ok(out)
}

/// Runs the session described by `cfg` and its eavesdropping check. Unlike
/// [`run_bootstrap_session`] this never fails on a rejected check.
pub fn run_session(cfg: &SessionConfig) -> Result<SessionTranscript, ProtocolError> {
    match cfg.mode {
        Mode::Keyed => run_keyed_session(cfg),
        Mode::Bootstrap => bootstrap_transcript(cfg),
    }
}

pub fn run_keyed_session(cfg: &SessionConfig) -> Result<SessionTranscript, ProtocolError> {
    if cfg.mode != Mode::Keyed {
        return Err(ProtocolError::Config(
            "run_keyed_session needs mode = keyed".into(),
        ));
    }
    let key = cfg.control_key.clone();
    let group = cfg.group;
    simulate(cfg, |b, _| {
        let op = key.op_index_for_block(b, group);
        (op, op)
    })
}

/// Runs a bootstrap session and extracts the candidate control key. A
/// rejected check is surfaced as [`ProtocolError::Rejected`].
pub fn run_bootstrap_session(
    cfg: &SessionConfig,
) -> Result<(ControlKey, SessionTranscript), ProtocolError> {
    if cfg.mode != Mode::Bootstrap {
        return Err(ProtocolError::Config(
            "run_bootstrap_session needs mode = bootstrap".into(),
        ));
    }
    let transcript = bootstrap_transcript(cfg)?;
    let key = candidate_control_key(&transcript)?;
    Ok((key, transcript))
}

fn bootstrap_transcript(cfg: &SessionConfig) -> Result<SessionTranscript, ProtocolError> {
    simulate(cfg, |_, rng| {
        (rng.random_range(0..4u8), rng.random_range(0..4u8))
    })
}

fn simulate(
    cfg: &SessionConfig,
    mut choose_ops: impl FnMut(usize, &mut SimRng) -> (u8, u8),
) -> Result<SessionTranscript, ProtocolError> {
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);
    let set = &cfg.permutations;
    let mut eve = Eve::new(cfg.eve.clone(), set.clone(), cfg.group)?;
    let mut pairs = Vec::with_capacity(cfg.n_pairs());
    let mut blocks = Vec::with_capacity(cfg.n_blocks);

    for b in 0..cfg.n_blocks {
        let (alice_op, bob_op) = choose_ops(b, &mut rng);
        let (symbols, register) = alice_prepare_block(&mut rng)?;
        let block = InFlightBlock::new(register, (0..BLOCK_SIZE).collect())?
            .rearranged(set.op(alice_op))?;
        let delivered = transmit(block, &mut eve, b, cfg.noise, cfg.noise_placement, &mut rng)?;
        let measured = bob_measure_block(delivered, set.op(bob_op), &mut rng)?;

        let entry = eve.log().entry_for_block(b);
        let eve_guess = entry.and_then(|e| e.guessed_op);
        for (q, (&prepared, &measured)) in symbols.iter().zip(&measured).enumerate() {
            pairs.push(PairRecord {
                block: b,
                position: q,
                prepared,
                measured,
                sifted: alice_op == bob_op,
                checked: false,
                eve_measured: entry.and_then(|e| e.measured.get(q).copied()),
            });
        }
        blocks.push(BlockRecord {
            index: b,
            alice_op,
            bob_op,
            eve_guess,
        });
    }

    let mut transcript = SessionTranscript {
        config: cfg.clone(),
        pairs,
        blocks,
        verdict: None,
        eve_log: eve.into_log(),
    };
    eavesdrop_check(
        &mut transcript,
        cfg.check_fraction,
        cfg.error_threshold,
        &mut rng,
    )?;
    Ok(transcript)
}

/// Publicly compares `⌈fraction · n⌉` uniformly chosen sifted pairs, marks
/// them as checked and records the verdict.
pub fn eavesdrop_check<R: Rng + ?Sized>(
    transcript: &mut SessionTranscript,
    fraction: f64,
    threshold: f64,
    rng: &mut R,
) -> Result<VerdictReport, ProtocolError> {
    if transcript.pairs.is_empty() {
        return Err(ProtocolError::EmptyTranscript);
    }
    let eligible: Vec<usize> = (0..transcript.pairs.len())
        .filter(|&i| transcript.pairs[i].sifted)
        .collect();
    let n_check = check_count(fraction, eligible.len());
    let mut errors = 0;
    for k in sample(rng, eligible.len(), n_check).into_iter() {
        let pair = &mut transcript.pairs[eligible[k]];
        pair.checked = true;
        errors += usize::from(!pair.agrees());
    }
    let measured_error_rate = rate(errors, n_check).unwrap_or(0.0);
    let verdict = VerdictReport {
        accepted: measured_error_rate <= threshold,
        measured_error_rate,
        threshold,
        checked_count: n_check,
    };
    transcript.verdict = Some(verdict);
    Ok(verdict)
}

fn accepted(transcript: &SessionTranscript) -> Result<(), ProtocolError> {
    match transcript.verdict {
        None => Err(ProtocolError::Unchecked),
        Some(v) if !v.accepted => Err(ProtocolError::Rejected {
            rate: v.measured_error_rate,
            threshold: v.threshold,
        }),
        Some(_) => Ok(()),
    }
}

fn key_from(
    transcript: &SessionTranscript,
    side: impl Fn(&PairRecord) -> BellSymbol,
) -> Result<Vec<bool>, ProtocolError> {
    accepted(transcript)?;
    Ok(transcript
        .pairs
        .iter()
        .filter(|p| p.sifted && !p.checked)
        .flat_map(|p| side(p).key_bits())
        .collect())
}

/// Bob's raw key: two bits per unchecked sifted pair, in temporal order.
pub fn extract_raw_key(transcript: &SessionTranscript) -> Result<Vec<bool>, ProtocolError> {
    key_from(transcript, |p| p.measured)
}

/// The same selection read from Alice's prepared symbols.
pub fn extract_alice_key(transcript: &SessionTranscript) -> Result<Vec<bool>, ProtocolError> {
    key_from(transcript, |p| p.prepared)
}

/// Control key built from Bob's surviving bits, truncated to
/// `bootstrap_key_bits` when that is nonzero.
pub fn candidate_control_key(transcript: &SessionTranscript) -> Result<ControlKey, ProtocolError> {
    let mut bits = extract_raw_key(transcript)?;
    let needed = transcript.config.bootstrap_key_bits.max(2);
    if bits.len() < needed {
        return Err(ProtocolError::InsufficientSift {
            got: bits.len(),
            needed,
        });
    }
    if transcript.config.bootstrap_key_bits > 0 {
        bits.truncate(needed);
    }
    Ok(ControlKey::new(bits)?)
}

/// Chance that a uniform guess reproduces `key`: `4^-N_k`.
pub fn guess_probability(key: &ControlKey) -> f64 {
    0.25f64.powi(key.n_values() as i32)
}

/// Block count needed for `pairs` pairs.
pub fn blocks_for(pairs: usize) -> usize {
    pairs.div_ceil(BLOCK_SIZE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::bell_probabilities;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn cfg(n_blocks: usize) -> SessionConfig {
        SessionConfig {
            n_blocks,
            seed: 17,
            ..SessionConfig::default()
        }
    }

    fn binomial_tail_at_most(n: usize, k: usize, p: f64) -> f64 {
        // P[X <= k] for X ~ Bin(n, p), summed in log space.
        let ln_choose = |n: usize, k: usize| -> f64 {
            (1..=k)
                .map(|i| ((n - k + i) as f64).ln() - (i as f64).ln())
                .sum()
        };
        (0..=k)
            .map(|i| (ln_choose(n, i) + i as f64 * p.ln() + (n - i) as f64 * (1.0 - p).ln()).exp())
            .sum()
    }

    #[test]
    fn prepared_blocks_are_uniform_and_exact() {
        let mut rng = seeded(3);
        let mut counts = [0usize; 4];
        let draws = 25_000;
        for _ in 0..draws {
            let (symbols, register) = alice_prepare_block(&mut rng).unwrap();
            assert!((register.norm() - 1.0).abs() < 1e-12);
            for s in &symbols {
                counts[s.key_value() as usize] += 1;
            }
        }
        for c in counts {
            assert!((c as f64 / (4 * draws) as f64 - 0.25).abs() < 0.01);
        }
        let (symbols, register) = alice_prepare_block(&mut rng).unwrap();
        for (k, s) in symbols.iter().enumerate() {
            let probs = bell_probabilities(&register, 2 * k, 2 * k + 1).unwrap();
            assert!((probs[s.key_value() as usize] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_session_has_no_errors() {
        let t = run_keyed_session(&cfg(2500)).unwrap();
        let stats = t.stats();
        assert_eq!(stats.error_rate, 0.0);
        assert_eq!(stats.accepted, Some(true));
        assert_eq!(extract_raw_key(&t).unwrap(), extract_alice_key(&t).unwrap());
        assert_eq!(stats.key_bits, 2 * (stats.n_pairs - stats.n_checked));
    }

    #[test]
    fn uniform_guessing_gives_nine_sixteenths() {
        let c = SessionConfig {
            eve: EveStrategy::uniform_guess(),
            error_threshold: 1.0,
            ..cfg(10_000)
        };
        let s = run_keyed_session(&c).unwrap().stats();
        assert!((s.error_rate - 0.5625).abs() < 0.01, "{}", s.error_rate);
        assert!((s.wrong_guess_error_rate.unwrap() - 0.75).abs() < 0.01);
    }

    #[test]
    fn check_rejects_guessing_eve() {
        let n = 200;
        let threshold = 0.1;
        // Rejection fails only if at most 20 of 200 checks disagree.
        let miss = binomial_tail_at_most(n, 20, 0.5625);
        assert!(miss < 1e-3);
        let c = SessionConfig {
            eve: EveStrategy::uniform_guess(),
            error_threshold: threshold,
            check_fraction: 0.5,
            ..cfg(100)
        };
        let mut rejected = 0;
        for seed in 0..50 {
            let t = run_keyed_session(&SessionConfig { seed, ..c.clone() }).unwrap();
            let v = t.verdict.unwrap();
            assert_eq!(v.checked_count, n);
            if !v.accepted {
                rejected += 1;
                assert!(matches!(
                    extract_raw_key(&t),
                    Err(ProtocolError::Rejected { .. })
                ));
            }
        }
        assert_eq!(rejected, 50);
    }

    #[test]
    fn vacuous_threshold_accepts() {
        let c = SessionConfig {
            eve: EveStrategy::uniform_guess(),
            error_threshold: 1.0,
            ..cfg(50)
        };
        assert!(run_keyed_session(&c).unwrap().verdict.unwrap().accepted);
    }

    #[test]
    fn raw_key_uses_encoding_map() {
        let record = |position, s: BellSymbol| PairRecord {
            block: 0,
            position,
            prepared: s,
            measured: s,
            sifted: true,
            checked: false,
            eve_measured: None,
        };
        let mut t = SessionTranscript {
            config: cfg(1),
            pairs: vec![
                record(0, BellSymbol::PsiMinus),
                record(1, BellSymbol::PhiPlus),
            ],
            blocks: Vec::new(),
            verdict: None,
            eve_log: EveLog::default(),
        };
        assert_eq!(extract_raw_key(&t), Err(ProtocolError::Unchecked));
        t.verdict = Some(VerdictReport {
            accepted: true,
            measured_error_rate: 0.0,
            threshold: 0.1,
            checked_count: 0,
        });
        assert_eq!(extract_raw_key(&t).unwrap(), vec![false, false, true, true]);
        for p in &mut t.pairs {
            p.checked = true;
        }
        assert!(extract_raw_key(&t).unwrap().is_empty());
    }

    #[test]
    fn bootstrap_sifts_a_quarter() {
        let c = SessionConfig {
            mode: Mode::Bootstrap,
            ..cfg(10_000)
        };
        let (key, t) = run_bootstrap_session(&c).unwrap();
        let s = t.stats();
        assert!((s.sift_rate - 0.25).abs() < 0.01);
        assert_eq!(s.sifted_agreement, Some(1.0));
        assert!((s.discarded_agreement.unwrap() - 0.25).abs() < 0.01);
        assert_eq!(key.bits(), extract_raw_key(&t).unwrap().as_slice());
    }

    #[test]
    fn bootstrap_reports_insufficient_sift() {
        let c = SessionConfig {
            mode: Mode::Bootstrap,
            bootstrap_key_bits: 1000,
            ..cfg(8)
        };
        assert!(matches!(
            run_bootstrap_session(&c),
            Err(ProtocolError::InsufficientSift { needed: 1000, .. })
        ));
        let c = SessionConfig {
            bootstrap_key_bits: 8,
            ..c
        };
        assert_eq!(run_bootstrap_session(&c).unwrap().0.bits().len(), 8);
    }

    #[test]
    fn guess_probability_is_a_power_of_a_quarter() {
        assert_eq!(guess_probability(&ControlKey::parse("01").unwrap()), 0.25);
        let long = ControlKey::from_values(&[2; 100]).unwrap();
        assert_eq!(guess_probability(&long), 4f64.powi(-100));
    }

    #[test]
    fn sessions_are_deterministic() {
        let c = SessionConfig {
            eve: EveStrategy::uniform_guess(),
            noise: 0.05,
            ..cfg(64)
        };
        assert_eq!(
            run_keyed_session(&c).unwrap(),
            run_keyed_session(&c).unwrap()
        );
        let other = SessionConfig {
            seed: 18,
            ..c.clone()
        };
        assert_ne!(
            run_keyed_session(&c).unwrap(),
            run_keyed_session(&other).unwrap()
        );
    }

    #[test]
    fn config_validation() {
        let ok = cfg(4);
        assert!(ok.validate().is_ok());
        for broken in [
            SessionConfig {
                n_blocks: 0,
                ..ok.clone()
            },
            SessionConfig {
                block_size: 3,
                ..ok.clone()
            },
            SessionConfig {
                check_fraction: 0.0,
                ..ok.clone()
            },
            SessionConfig {
                check_fraction: 0.99,
                n_blocks: 1,
                ..ok.clone()
            },
            SessionConfig {
                error_threshold: 1.5,
                ..ok.clone()
            },
            SessionConfig {
                noise: -0.1,
                ..ok.clone()
            },
            SessionConfig {
                bootstrap_key_bits: 3,
                ..ok.clone()
            },
        ] {
            assert!(
                matches!(broken.validate(), Err(ProtocolError::Config(_))),
                "{broken:?}"
            );
        }
        assert_eq!(check_count(0.1, 100), 10);
        assert_eq!(check_count(0.25, 16), 4);
        assert_eq!(check_count(0.3, 7), 3);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let c = SessionConfig {
            mode: Mode::Bootstrap,
            ..cfg(4)
        };
        assert!(run_keyed_session(&c).is_err());
        assert!(run_bootstrap_session(&cfg(4)).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let c = SessionConfig {
            eve: EveStrategy::KnownKey {
                key: ControlKey::parse("1100").unwrap(),
            },
            ..cfg(3)
        };
        let json = serde_json::to_string(&c).unwrap();
        let back: SessionConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn known_key_eve_is_invisible() {
        let c = cfg(200);
        let t = crate::adversary::eve_known_key_attack(&c, c.control_key.clone()).unwrap();
        let s = t.stats();
        assert_eq!(s.error_rate, 0.0);
        assert_eq!(s.eve_accuracy, Some(1.0));

        let mut wrong = c.control_key.values().collect::<Vec<_>>();
        wrong[1] = (wrong[1] + 1) % 4;
        let wrong = ControlKey::from_values(&wrong).unwrap();
        let s = crate::adversary::eve_known_key_attack(&c, wrong)
            .unwrap()
            .stats();
        assert!(s.eve_accuracy.unwrap() < 1.0);
        assert!(s.error_rate > 0.0);
    }

    #[test]
    fn random_two_value_key_is_guessed_one_time_in_sixteen() {
        let trials = 40_000;
        let mut rng = seeded(99);
        let mut hits = 0;
        for t in 0..trials {
            let key =
                ControlKey::from_values(&[rng.random_range(0..4), rng.random_range(0..4)]).unwrap();
            let guess =
                ControlKey::from_values(&[rng.random_range(0..4), rng.random_range(0..4)]).unwrap();
            let c = SessionConfig {
                n_blocks: 2,
                control_key: key,
                check_fraction: 0.1,
                seed: t,
                ..SessionConfig::default()
            };
            let s = crate::adversary::eve_known_key_attack(&c, guess)
                .unwrap()
                .stats();
            if s.eve_accuracy == Some(1.0) && s.error_rate == 0.0 {
                hits += 1;
            }
        }
        let f = hits as f64 / trials as f64;
        assert!((f - 1.0 / 16.0).abs() < 0.005, "{f}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ideal_round_trip_for_any_key(
            values in proptest::collection::vec(0u8..4, 1..6),
            group in 1usize..4,
            seed in any::<u64>(),
            klein in any::<bool>(),
        ) {
            let permutations = if klein {
                PermutationSet::new(
                    [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
                        .iter()
                        .map(|p| crate::ops::Permutation::new(p.to_vec()).unwrap())
                        .collect(),
                )
                .unwrap()
            } else {
                PermutationSet::cyclic()
            };
            let c = SessionConfig {
                n_blocks: 12,
                permutations,
                control_key: ControlKey::from_values(&values).unwrap(),
                group: GroupConfig::new(group).unwrap(),
                seed,
                ..SessionConfig::default()
            };
            let t = run_keyed_session(&c).unwrap();
            prop_assert!(t.pairs.iter().all(PairRecord::agrees));
            let key = extract_raw_key(&t).unwrap();
            prop_assert_eq!(key.len(), 2 * t.pairs.iter().filter(|p| !p.checked).count());
            prop_assert_eq!(key, extract_alice_key(&t).unwrap());
        }
    }
}
