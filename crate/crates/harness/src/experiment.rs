//! Sweep execution.
//!
//! Trial `t` of sweep point `i` is seeded with
//! `split_seed(split_seed(seed, i), t)`, so results do not depend on how
//! trials are scheduled across threads.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use core_qkd::adversary::EveStrategy;
use core_qkd::ops::ControlKey;
use core_qkd::protocol::{run_session, Mode, SessionConfig, SessionStats};
use core_qkd::rng::{seeded, split_seed};

use crate::config::{self, mode_str, EveKind, ExperimentSpec};
use crate::report::{Moments, ReportRow};
use crate::HarnessError;

/// One cell of the sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub mode: Mode,
    pub eve: EveKind,
    pub noise: f64,
    /// Key length to draw per trial; `None` uses the template key.
    pub key_values: Option<usize>,
    pub n_blocks: usize,
}

impl fmt::Display for SweepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "point {} (mode={}, eve={}, noise={}, n_blocks={}",
            self.index,
            mode_str(self.mode),
            self.eve,
            self.noise,
            self.n_blocks
        )?;
        if let Some(k) = self.key_values {
            write!(f, ", key_values={k}")?;
        }
        f.write_str(")")
    }
}

fn axis<T: Clone>(values: &[T], fallback: T) -> Vec<T> {
    if values.is_empty() {
        vec![fallback]
    } else {
        values.to_vec()
    }
}

/// The full grid, in row-major order over mode, n_blocks, key_values, eve
/// and noise.
pub fn points(spec: &ExperimentSpec) -> Vec<SweepPoint> {
    let sw = &spec.sweep;
    let s = &spec.session;
    let key_axis: Vec<Option<usize>> = if sw.key_values.is_empty() {
        vec![None]
    } else {
        sw.key_values.iter().copied().map(Some).collect()
    };
    let mut out = Vec::new();
    for mode in axis(&sw.mode, s.mode) {
        for n_blocks in axis(&sw.n_blocks, s.n_blocks) {
            for &key_values in &key_axis {
                for eve in axis(&sw.eve, spec.eve.kind) {
                    for noise in axis(&sw.noise, s.noise) {
                        out.push(SweepPoint {
                            index: out.len(),
                            mode,
                            eve,
                            noise,
                            key_values,
                            n_blocks,
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn trial_seed(spec: &ExperimentSpec, point: &SweepPoint, trial: usize) -> u64 {
    split_seed(split_seed(spec.seed, point.index as u64), trial as u64)
}

/// Session configuration for one trial.
pub fn session_for(spec: &ExperimentSpec, point: &SweepPoint, seed: u64) -> SessionConfig {
    let mut rng = seeded(seed);
    let mut cfg = spec.session.clone();
    cfg.mode = point.mode;
    cfg.noise = point.noise;
    cfg.n_blocks = point.n_blocks;
    if let Some(n) = point.key_values {
        let values: Vec<u8> = (0..n).map(|_| rng.random_range(0..4)).collect();
        cfg.control_key = ControlKey::from_values(&values).expect("values below 4");
    }
    cfg.seed = rng.random();
    let e = &spec.eve;
    cfg.eve = match point.eve {
        EveKind::None => EveStrategy::None,
        EveKind::GuessCore => EveStrategy::GuessCore { weights: e.weights },
        EveKind::KnownKey => EveStrategy::KnownKey {
            key: e.key.clone().unwrap_or_else(|| cfg.control_key.clone()),
        },
        EveKind::BellProbe => EveStrategy::BellProbe {
            a: e.probe_a,
            b: e.probe_b,
            duos_per_block: e.probe_duos,
        },
    };
    cfg
}

pub fn run_trial(
    spec: &ExperimentSpec,
    point: &SweepPoint,
    trial: usize,
) -> Result<SessionStats, HarnessError> {
    let cfg = session_for(spec, point, trial_seed(spec, point, trial));
    Ok(run_session(&cfg)?.stats())
}

/// Runs every trial of every sweep point and aggregates one row per point.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ReportRow>, HarnessError> {
    config::validate(spec, 0)?;
    points(spec)
        .iter()
        .map(|point| {
            let stats = (0..spec.trials)
                .into_par_iter()
                .map(|t| run_trial(spec, point, t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(aggregate(spec, point, &stats))
        })
        .collect()
}

fn aggregate(spec: &ExperimentSpec, point: &SweepPoint, stats: &[SessionStats]) -> ReportRow {
    let m = |f: &dyn Fn(&SessionStats) -> Option<f64>| {
        Moments::from_samples(stats.iter().filter_map(f))
    };
    let key_values = point
        .key_values
        .unwrap_or_else(|| spec.session.control_key.n_values());
    ReportRow::new(
        spec.name.clone(),
        point,
        key_values,
        stats.len(),
        [
            m(&|s| Some(s.error_rate)),
            m(&|s| s.checked_error_rate),
            m(&|s| s.wrong_guess_error_rate),
            m(&|s| Some(s.sift_rate)),
            m(&|s| Some(s.key_bits as f64)),
            m(&|s| s.eve_accuracy),
            m(&|s| s.probe_mean),
        ],
        m(&|s| s.accepted.map(|a| if a { 1.0 } else { 0.0 })).mean,
    )
}

const PAPER_TABLE: &str = "\
# Error rate without Eve, under uniform guess-and-resend, and the mean
# Bell-probe outcome.
[experiment]
name = paper-table
trials = 8
seed = 2024

[session]
mode = keyed
n_blocks = 2500
control_key = 00011011
check_fraction = 0.25
error_threshold = 0.11
probe_a = 0, 0, 1
probe_b = 0.6, 0, 0.8
probe_duos = 4

[sweep]
eve = none, guess_core, bell_probe
";

const BOOTSTRAP_SIFT: &str = "\
# Sift rate of on-site key generation at two session lengths.
[experiment]
name = bootstrap-sift
trials = 8
seed = 11

[session]
mode = bootstrap
check_fraction = 0.1

[sweep]
n_blocks = 1000, 10000
";

const NOISE_SCAN: &str = "\
# Error rate against depolarizing noise, with and without Eve.
[experiment]
name = noise-scan
trials = 4
seed = 5

[session]
n_blocks = 2500
error_threshold = 1

[sweep]
eve = none, guess_core
noise = 0, 0.05, 0.1, 0.2, 0.5, 1
";

/// Specification text of a built-in experiment.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "paper-table" => Some(PAPER_TABLE),
        "bootstrap-sift" => Some(BOOTSTRAP_SIFT),
        "noise-scan" => Some(NOISE_SCAN),
        _ => None,
    }
}

pub const BUILTINS: [&str; 3] = ["paper-table", "bootstrap-sift", "noise-scan"];

/// Reads `source` as a file path, falling back to a built-in name.
pub fn load_spec(source: &str) -> Result<ExperimentSpec, HarnessError> {
    let path = std::path::Path::new(source);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: e,
        })?
    } else if let Some(text) = builtin(source) {
        text.to_string()
    } else {
        return Err(HarnessError::UnknownSpec(source.to_string()));
    };
    Ok(config::parse(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for name in BUILTINS {
            let spec = config::parse(builtin(name).unwrap()).unwrap();
            assert_eq!(spec.name, name);
        }
    }

    #[test]
    fn grid_covers_every_combination() {
        let mut spec = ExperimentSpec::default();
        spec.sweep.noise = vec![0.0, 0.1];
        spec.sweep.eve = vec![EveKind::None, EveKind::GuessCore, EveKind::BellProbe];
        spec.sweep.key_values = vec![1, 2];
        let pts = points(&spec);
        assert_eq!(pts.len(), 12);
        assert!(pts.iter().enumerate().all(|(i, p)| p.index == i));
        assert_eq!(pts[1].noise, 0.1);
        assert_eq!(pts[2].eve, EveKind::GuessCore);
        assert_eq!(pts[6].key_values, Some(2));
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let spec = ExperimentSpec::default();
        let pts = {
            let mut s = spec.clone();
            s.sweep.noise = vec![0.0, 0.1];
            points(&s)
        };
        let seeds: std::collections::HashSet<u64> = pts
            .iter()
            .flat_map(|p| (0..50).map(|t| trial_seed(&spec, p, t)).collect::<Vec<_>>())
            .collect();
        assert_eq!(seeds.len(), 100);
    }

    #[test]
    fn known_key_eve_defaults_to_the_session_key() {
        let mut spec = ExperimentSpec::default();
        spec.eve.kind = EveKind::KnownKey;
        spec.sweep.key_values = vec![3];
        let p = &points(&spec)[0];
        let cfg = session_for(&spec, p, 9);
        assert_eq!(cfg.control_key.n_values(), 3);
        assert_eq!(
            cfg.eve,
            EveStrategy::KnownKey {
                key: cfg.control_key.clone()
            }
        );
    }
}
