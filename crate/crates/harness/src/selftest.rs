//! The acceptance criteria, runnable from the CLI and the test suite.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;

use core_qkd::adversary::{exact_guess_outcome, probe_with, EveStrategy, Pairing};
use core_qkd::ops::{
    perm_to_schedule, schedule_to_perm, ControlKey, DeviceModel, PermutationSet, SwitchSchedule,
    SwitchSetting,
};
use core_qkd::protocol::{
    extract_alice_key, extract_raw_key, guess_probability, run_bootstrap_session,
    run_keyed_session, Mode, SessionConfig,
};
use core_qkd::quantum::{
    bell_state, correlation_operator, expectation, mismatched_pair_density, BellSymbol,
};
use core_qkd::rng::{seeded, split_seed};
use core_qkd::{Complex, Direction, StateVector};

use crate::experiment::builtin;
use crate::report::{render_report, Format};

/// Result of one criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {}: {} ({:.3} s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

fn timed(
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> Result<String, String>,
) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(budget) = budget {
        if elapsed >= budget {
            passed = false;
            detail = format!("{detail}; over the {budget:?} budget");
        }
    }
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed,
    }
}

fn check(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub const CRITERIA: [(u8, fn() -> Outcome); 9] = [
    (1, criterion_1),
    (2, criterion_2),
    (3, criterion_3),
    (4, criterion_4),
    (5, criterion_5),
    (6, criterion_6),
    (7, criterion_7),
    (8, criterion_8),
    (9, criterion_9),
];

/// Runs every criterion in order, calling `report` after each.
pub fn run_all(mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .map(|(_, f)| {
            let o = f();
            report(&o);
            o
        })
        .collect()
}

pub fn criterion_1() -> Outcome {
    timed(
        1,
        "mismatched pair density is I/4",
        Some(Duration::from_millis(1)),
        || {
            let rho =
                mismatched_pair_density::<f64>(&BellSymbol::ALL).map_err(|e| e.to_string())?;
            let mut worst = 0.0f64;
            for r in 0..4 {
                for c in 0..4 {
                    let want = if r == c { 0.25 } else { 0.0 };
                    worst = worst.max((rho.get(r, c) - Complex::new(want, 0.0)).norm());
                }
            }
            check(worst <= 1e-12, format!("max entry deviation {worst:.2e}"))
        },
    )
}

/// `σ·a ⊗ σ·b` written out entry by entry.
fn correlation_closed_form(a: &Direction, b: &Direction) -> [[Complex<f64>; 4]; 4] {
    let c = |re: f64| Complex::new(re, 0.0);
    let (az, bz) = (c(a.z()), c(b.z()));
    let ap = Complex::new(a.x(), a.y());
    let am = Complex::new(a.x(), -a.y());
    let bp = Complex::new(b.x(), b.y());
    let bm = Complex::new(b.x(), -b.y());
    [
        [az * bz, az * bm, am * bz, am * bm],
        [az * bp, -az * bz, am * bp, -am * bz],
        [ap * bz, ap * bm, -az * bz, -az * bm],
        [ap * bp, -ap * bz, -az * bp, az * bz],
    ]
}

pub fn criterion_2() -> Outcome {
    timed(
        2,
        "correlation operator and Bell expectations",
        Some(Duration::from_secs(1)),
        || {
            let mut rng = seeded(0xC0DE_0002);
            let (mut op_dev, mut exp_dev) = (0.0f64, 0.0f64);
            let bell: Vec<(BellSymbol, StateVector)> = BellSymbol::ALL
                .iter()
                .map(|&s| (s, bell_state(s)))
                .collect();
            let products: Vec<(StateVector, f64)> = (0..4)
                .map(|k| {
                    let sign = if k == 0 || k == 3 { 1.0 } else { -1.0 };
                    (StateVector::basis(2, k).expect("2 qubits"), sign)
                })
                .collect();
            for _ in 0..1000 {
                let a = Direction::random(&mut rng);
                let b = Direction::random(&mut rng);
                let o = correlation_operator(&a, &b).map_err(|e| e.to_string())?;
                let want = correlation_closed_form(&a, &b);
                for (r, row) in want.iter().enumerate() {
                    for (c, w) in row.iter().enumerate() {
                        op_dev = op_dev.max((o.get(r, c) - w).norm());
                    }
                }
                let (ax, ay, az, bx, by, bz) = (a.x(), a.y(), a.z(), b.x(), b.y(), b.z());
                for (s, state) in &bell {
                    let closed = match s {
                        BellSymbol::PsiMinus => -(ax * bx + ay * by + az * bz),
                        BellSymbol::PsiPlus => ax * bx + ay * by - az * bz,
                        BellSymbol::PhiMinus => -ax * bx + ay * by + az * bz,
                        BellSymbol::PhiPlus => ax * bx - ay * by + az * bz,
                    };
                    let got = expectation(state, &a, &b).map_err(|e| e.to_string())?;
                    exp_dev = exp_dev.max((got - closed).abs());
                }
                for (state, sign) in &products {
                    let got = expectation(state, &a, &b).map_err(|e| e.to_string())?;
                    exp_dev = exp_dev.max((got - sign * az * bz).abs());
                }
            }
            check(
            op_dev <= 1e-12 && exp_dev <= 1e-10,
            format!("operator deviation {op_dev:.2e} (tol 1e-12), expectation deviation {exp_dev:.2e} (tol 1e-10)"),
        )
        },
    )
}

pub fn criterion_3() -> Outcome {
    timed(
        3,
        "guess-and-resend error 9/16, wrong guess 3/4",
        Some(Duration::from_secs(60)),
        || {
            let cfg = SessionConfig {
                n_blocks: 50_000,
                check_fraction: 0.5,
                error_threshold: 1.0,
                eve: EveStrategy::uniform_guess(),
                seed: 0xC0DE_0003,
                ..SessionConfig::default()
            };
            let t = run_keyed_session(&cfg).map_err(|e| e.to_string())?;
            let v = t.verdict.ok_or("no verdict")?;
            let mc = v.measured_error_rate;

            let set = PermutationSet::cyclic();
            let mut rng = seeded(0xC0DE_0303);
            let mut worst = 0.0f64;
            let mut right = 0.0f64;
            for _ in 0..6 {
                let symbols: Vec<BellSymbol> = (0..4)
                    .map(|_| BellSymbol::ALL[rng.random_range(0..4)])
                    .collect();
                for t in set.ops() {
                    for g in set.ops() {
                        let pairs =
                            exact_guess_outcome(&symbols, t, g).map_err(|e| e.to_string())?;
                        for p in pairs {
                            if t.index() == g.index() {
                                right = right.max(p.error.abs());
                            } else {
                                worst = worst.max((p.error - 0.75).abs());
                            }
                        }
                    }
                }
            }
            check(
            (mc - 0.5625).abs() <= 0.01 && worst <= 1e-12 && right <= 1e-12,
            format!(
                "checked error {mc:.4} over {} pairs (0.5625 ± 0.01); exact wrong-guess deviation {worst:.2e}, correct-guess error {right:.2e} (tol 1e-12)",
                v.checked_count
            ),
        )
        },
    )
}

pub fn criterion_4() -> Outcome {
    timed(
        4,
        "Bell probe means: ensemble 0, fixed singlet -1",
        Some(Duration::from_secs(120)),
        || {
            const TRIALS: usize = 1_000_000;
            let mut rng = seeded(0xC0DE_0004);
            // Two pairs suffice: the probe touches pair 0 and, when mismatched,
            // pair 1; other pairs of a block are in a product state with these.
            let registers: Vec<StateVector> = BellSymbol::ALL
                .iter()
                .flat_map(|&s0| {
                    BellSymbol::ALL
                        .iter()
                        .map(move |&s1| bell_state(s0).tensor(&bell_state(s1)).expect("4 qubits"))
                })
                .collect();
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let a = Direction::random(&mut rng);
                let b = Direction::random(&mut rng);
                let o = correlation_operator(&a, &b).map_err(|e| e.to_string())?;
                for pairing in [Pairing::Matched, Pairing::Mismatched] {
                    let mut sum = 0i64;
                    for _ in 0..TRIALS {
                        let reg = &registers[rng.random_range(0..16)];
                        let (out, _) =
                            probe_with(reg, pairing, &o, &mut rng).map_err(|e| e.to_string())?;
                        sum += i64::from(out);
                    }
                    worst = worst.max((sum as f64 / TRIALS as f64).abs());
                }
            }
            let z = Direction::z_axis();
            let o = correlation_operator(&z, &z).map_err(|e| e.to_string())?;
            let singlet = bell_state(BellSymbol::PsiMinus)
                .tensor(&bell_state(BellSymbol::PsiMinus))
                .map_err(|e| e.to_string())?;
            let mut sum = 0i64;
            for _ in 0..TRIALS {
                let (out, _) = probe_with(&singlet, Pairing::Matched, &o, &mut rng)
                    .map_err(|e| e.to_string())?;
                sum += i64::from(out);
            }
            let fixed = sum as f64 / TRIALS as f64;
            check(
            worst <= 0.01 && (fixed + 1.0).abs() <= 0.01,
            format!("largest ensemble |mean| {worst:.4} (tol 0.01); fixed singlet mean {fixed:.4} (-1 ± 0.01)"),
        )
        },
    )
}

pub fn criterion_5() -> Outcome {
    timed(5, "bootstrap sifting", None, || {
        let cfg = SessionConfig {
            mode: Mode::Bootstrap,
            n_blocks: 10_000,
            check_fraction: 0.1,
            seed: 0xC0DE_0005,
            ..SessionConfig::default()
        };
        let (_, t) = run_bootstrap_session(&cfg).map_err(|e| e.to_string())?;
        let s = t.stats();
        let sifted = s.sifted_agreement.ok_or("no sifted pairs")?;
        let discarded = s.discarded_agreement.ok_or("no discarded pairs")?;
        check(
            (s.sift_rate - 0.25).abs() <= 0.01 && sifted == 1.0 && (discarded - 0.25).abs() <= 0.02,
            format!(
                "sift rate {:.4} (0.25 ± 0.01), sifted agreement {sifted} (exactly 1), discarded agreement {discarded:.4} (0.25 ± 0.02)",
                s.sift_rate
            ),
        )
    })
}

pub fn criterion_6() -> Outcome {
    timed(6, "control-key guess probability", None, || {
        for n in 1..=100i32 {
            let key = ControlKey::from_values(&vec![0; n as usize]).map_err(|e| e.to_string())?;
            // 4^-n = 2^-2n, built directly from the exponent bits.
            let want = f64::from_bits(((1023 - 2 * n) as u64) << 52);
            if guess_probability(&key) != want {
                return Err(format!(
                    "N_k = {n}: {} != {want:e}",
                    guess_probability(&key)
                ));
            }
        }
        const TRIALS: u64 = 100_000;
        let mut hits = 0u64;
        let master = 0xC0DE_0006;
        for t in 0..TRIALS {
            let mut rng = seeded(split_seed(master, t));
            let draw = |rng: &mut core_qkd::rng::SimRng| {
                let v = [rng.random_range(0..4u8), rng.random_range(0..4u8)];
                ControlKey::from_values(&v).expect("two values")
            };
            let key = draw(&mut rng);
            let guess = draw(&mut rng);
            let cfg = SessionConfig {
                n_blocks: 2,
                control_key: key,
                check_fraction: 0.1,
                error_threshold: 1.0,
                seed: rng.random(),
                ..SessionConfig::default()
            };
            let s = core_qkd::adversary::eve_known_key_attack(&cfg, guess)
                .map_err(|e| e.to_string())?
                .stats();
            if s.eve_accuracy == Some(1.0) && s.error_rate == 0.0 {
                hits += 1;
            }
        }
        let f = hits as f64 / TRIALS as f64;
        check(
            (f - 1.0 / 16.0).abs() <= 0.005,
            format!("4^-N_k exact for N_k = 1..100; undetected full-knowledge frequency {f:.4} (0.0625 ± 0.005)"),
        )
    })
}

pub fn criterion_7() -> Outcome {
    timed(7, "ideal round trip", None, || {
        let cfg = SessionConfig {
            n_blocks: 2500,
            control_key: ControlKey::parse("00011011").map_err(|e| e.to_string())?,
            seed: 0xC0DE_0007,
            ..SessionConfig::default()
        };
        let t = run_keyed_session(&cfg).map_err(|e| e.to_string())?;
        let ops: BTreeSet<u8> = t.blocks.iter().map(|b| b.alice_op).collect();
        let errors = t.pairs.iter().filter(|p| !p.agrees()).count();
        let bob = extract_raw_key(&t).map_err(|e| e.to_string())?;
        let alice = extract_alice_key(&t).map_err(|e| e.to_string())?;
        let unchecked = t.pairs.iter().filter(|p| !p.checked).count();
        check(
            ops.len() == 4 && errors == 0 && bob == alice && bob.len() == 2 * unchecked,
            format!(
                "{} pairs, operations used {ops:?}, {errors} errors, raw keys equal: {} ({} bits)",
                t.pairs.len(),
                bob == alice,
                bob.len()
            ),
        )
    })
}

pub fn criterion_8() -> Outcome {
    timed(8, "switch device self-consistency", None, || {
        let device = DeviceModel::default();
        let idle = SwitchSchedule::uniform(SwitchSetting::PASS_THROUGH, device.block_size);
        let id = schedule_to_perm(&idle, &device).map_err(|e| e.to_string())?;
        let e1 = schedule_to_perm(&SwitchSchedule::e1_reference(), &device)
            .map_err(|e| e.to_string())?;
        let set = PermutationSet::cyclic();
        let mut round_trips = 0;
        for op in set.ops() {
            let schedule = perm_to_schedule(op.perm(), &device).map_err(|e| e.to_string())?;
            if &schedule_to_perm(&schedule, &device).map_err(|e| e.to_string())? == op.perm() {
                round_trips += 1;
            }
        }
        check(
            id.is_identity() && e1.is_derangement() && round_trips == 4,
            format!(
                "pass-through gives {id}, reference schedule gives {e1} without collision, {round_trips}/4 operations round-trip (loop delay {})",
                device.loop_delay
            ),
        )
    })
}

pub fn criterion_9() -> Outcome {
    timed(9, "deterministic paper-table report", None, || {
        let text = builtin("paper-table").ok_or("missing builtin")?;
        let render = |format| -> Result<String, String> {
            let spec = crate::config::parse(text).map_err(|e| e.to_string())?;
            let rows = crate::run_experiment(&spec).map_err(|e| e.to_string())?;
            render_report(&rows, format).map_err(|e| e.to_string())
        };
        let (a, b) = (render(Format::Csv)?, render(Format::Csv)?);
        let (ja, jb) = (render(Format::JsonLines)?, render(Format::JsonLines)?);
        check(
            a == b && ja == jb,
            format!(
                "CSV identical: {}, JSON lines identical: {} ({} bytes)",
                a == b,
                ja == jb,
                a.len()
            ),
        )
    })
}
