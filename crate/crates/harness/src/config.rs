//! Experiment specification files.
//!
//! Line-oriented `key = value` pairs grouped under `[section]` headers.
//! `#` starts a comment anywhere on a line; blank lines are ignored. Lists
//! are comma separated. See the README for the full key reference.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use core_qkd::channel::NoisePlacement;
use core_qkd::ops::{
    perm_to_schedule, ControlKey, DeviceModel, GroupConfig, Permutation, PermutationSet,
};
use core_qkd::protocol::{Mode, SessionConfig};

/// Parse or validation failure. `line` is 1-based; 0 means the whole file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}: {}", self.field, self.message)
        } else {
            write!(f, "line {}: {}: {}", self.line, self.field, self.message)
        }
    }
}

fn err(line: usize, field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EveKind {
    None,
    GuessCore,
    KnownKey,
    BellProbe,
}

impl EveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::GuessCore => "guess_core",
            Self::KnownKey => "known_key",
            Self::BellProbe => "bell_probe",
        }
    }
}

impl FromStr for EveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Self::None),
            "guess_core" => Ok(Self::GuessCore),
            "known_key" => Ok(Self::KnownKey),
            "bell_probe" => Ok(Self::BellProbe),
            other => Err(format!(
                "unknown eve kind {other:?} (none, guess_core, known_key, bell_probe)"
            )),
        }
    }
}

impl fmt::Display for EveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn mode_str(mode: Mode) -> &'static str {
    match mode {
        Mode::Keyed => "keyed",
        Mode::Bootstrap => "bootstrap",
    }
}

/// Parameters shared by every eavesdropper of a given kind.
#[derive(Debug, Clone, PartialEq)]
pub struct EveParams {
    pub kind: EveKind,
    pub weights: [f64; 4],
    /// Key held by a `known_key` Eve; `None` means the session key.
    pub key: Option<ControlKey>,
    pub probe_a: [f64; 3],
    pub probe_b: [f64; 3],
    pub probe_duos: usize,
}

impl Default for EveParams {
    fn default() -> Self {
        Self {
            kind: EveKind::None,
            weights: [0.25; 4],
            key: None,
            probe_a: [0.0, 0.0, 1.0],
            probe_b: [0.0, 0.0, 1.0],
            probe_duos: 1,
        }
    }
}

/// Axes of the sweep grid. An empty axis takes the template's value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sweep {
    pub mode: Vec<Mode>,
    pub eve: Vec<EveKind>,
    pub noise: Vec<f64>,
    /// Control-key lengths `N_k`; each trial draws a fresh random key.
    pub key_values: Vec<usize>,
    pub n_blocks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Template session; its `seed` and `eve` fields are overwritten per
    /// trial.
    pub session: SessionConfig,
    pub eve: EveParams,
    pub sweep: Sweep,
    pub loop_delay: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            trials: 1,
            seed: 0,
            output: None,
            session: SessionConfig::default(),
            eve: EveParams::default(),
            sweep: Sweep::default(),
            loop_delay: DeviceModel::default().loop_delay,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Experiment,
    Session,
    Sweep,
    Core,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Self::Experiment => "experiment",
            Self::Session => "session",
            Self::Sweep => "sweep",
            Self::Core => "core",
        }
    }
}

fn scalar<T: FromStr>(line: usize, field: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| err(line, field, format!("cannot parse {v:?}: {e}")))
}

fn list<T: FromStr>(line: usize, field: &str, v: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    let items: Vec<T> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(line, field, s))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(err(line, field, "empty list"));
    }
    Ok(items)
}

fn array<const N: usize>(line: usize, field: &str, v: &str) -> Result<[f64; N], ConfigError> {
    let items: Vec<f64> = list(line, field, v)?;
    items.try_into().map_err(|got: Vec<f64>| {
        err(
            line,
            field,
            format!("expected {N} numbers, got {}", got.len()),
        )
    })
}

fn unit(line: usize, field: &str, x: f64, open: bool) -> Result<f64, ConfigError> {
    let ok = if open {
        x > 0.0 && x < 1.0
    } else {
        (0.0..=1.0).contains(&x)
    };
    if ok {
        Ok(x)
    } else {
        let range = if open { "(0, 1)" } else { "[0, 1]" };
        Err(err(line, field, format!("{x} is outside {range}")))
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "keyed" => Ok(Mode::Keyed),
        "bootstrap" => Ok(Mode::Bootstrap),
        other => Err(format!("unknown mode {other:?} (keyed, bootstrap)")),
    }
}

struct ModeValue(Mode);

impl FromStr for ModeValue {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_mode(s).map(ModeValue)
    }
}

fn parse_permutations(line: usize, v: &str) -> Result<PermutationSet, ConfigError> {
    const FIELD: &str = "permutations";
    if v == "cyclic" {
        return Ok(PermutationSet::cyclic());
    }
    let perms = v
        .split(';')
        .map(|p| {
            let images: Vec<usize> = list(line, FIELD, p)?;
            Permutation::new(images).map_err(|e| err(line, FIELD, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    PermutationSet::new(perms).map_err(|e| err(line, FIELD, e.to_string()))
}

/// Parses a specification file.
pub fn parse(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let mut spec = ExperimentSpec::default();
    let mut section = None;
    let mut seen: HashSet<(&'static str, String)> = HashSet::new();
    let mut session_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, "section", format!("unterminated header {content:?}")))?
                .trim();
            section = Some(match name {
                "experiment" => Section::Experiment,
                "session" => Section::Session,
                "sweep" => Section::Sweep,
                "core" => Section::Core,
                other => return Err(err(line, "section", format!("unknown section [{other}]"))),
            });
            if section == Some(Section::Session) {
                session_line = line;
            }
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, content, "expected `key = value`"))?;
        let (key, v) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| err(line, key, "key outside of any section"))?;
        if !seen.insert((sec.name(), key.to_string())) {
            return Err(err(line, key, format!("duplicate key in [{}]", sec.name())));
        }
        let s = &mut spec.session;
        match (sec, key) {
            (Section::Experiment, "name") => {
                if v.is_empty() {
                    return Err(err(line, key, "name is empty"));
                }
                spec.name = v.to_string();
            }
            (Section::Experiment, "trials") => {
                spec.trials = scalar(line, key, v)?;
                if spec.trials == 0 {
                    return Err(err(line, key, "trials must be at least 1"));
                }
            }
            (Section::Experiment, "seed") => spec.seed = scalar(line, key, v)?,
            (Section::Experiment, "output") => spec.output = Some(PathBuf::from(v)),

            (Section::Session, "n_blocks") => s.n_blocks = scalar(line, key, v)?,
            (Section::Session, "block_size") => s.block_size = scalar(line, key, v)?,
            (Section::Session, "control_key") => {
                s.control_key = ControlKey::parse(v).map_err(|e| err(line, key, e.to_string()))?
            }
            (Section::Session, "group_size") => {
                s.group = GroupConfig::new(scalar(line, key, v)?)
                    .map_err(|e| err(line, key, e.to_string()))?
            }
            (Section::Session, "check_fraction") => {
                s.check_fraction = unit(line, key, scalar(line, key, v)?, true)?
            }
            (Section::Session, "error_threshold") => {
                s.error_threshold = unit(line, key, scalar(line, key, v)?, false)?
            }
            (Section::Session, "mode") => s.mode = parse_mode(v).map_err(|e| err(line, key, e))?,
            (Section::Session, "noise") => s.noise = unit(line, key, scalar(line, key, v)?, false)?,
            (Section::Session, "noise_placement") => {
                s.noise_placement = match v {
                    "after_eve" => NoisePlacement::AfterEve,
                    "before_eve" => NoisePlacement::BeforeEve,
                    other => {
                        return Err(err(
                            line,
                            key,
                            format!("unknown placement {other:?} (after_eve, before_eve)"),
                        ))
                    }
                }
            }
            (Section::Session, "bootstrap_key_bits") => {
                s.bootstrap_key_bits = scalar(line, key, v)?
            }
            (Section::Session, "eve") => spec.eve.kind = scalar(line, key, v)?,
            (Section::Session, "eve_weights") => spec.eve.weights = array(line, key, v)?,
            (Section::Session, "eve_key") => {
                spec.eve.key =
                    Some(ControlKey::parse(v).map_err(|e| err(line, key, e.to_string()))?)
            }
            (Section::Session, "probe_a") => spec.eve.probe_a = array(line, key, v)?,
            (Section::Session, "probe_b") => spec.eve.probe_b = array(line, key, v)?,
            (Section::Session, "probe_duos") => spec.eve.probe_duos = scalar(line, key, v)?,

            (Section::Sweep, "mode") => {
                spec.sweep.mode = list::<ModeValue>(line, key, v)?
                    .into_iter()
                    .map(|m| m.0)
                    .collect()
            }
            (Section::Sweep, "eve") => spec.sweep.eve = list(line, key, v)?,
            (Section::Sweep, "noise") => {
                spec.sweep.noise = list(line, key, v)?
                    .into_iter()
                    .map(|x| unit(line, key, x, false))
                    .collect::<Result<_, _>>()?
            }
            (Section::Sweep, "key_values") => {
                spec.sweep.key_values = list(line, key, v)?;
                if spec.sweep.key_values.contains(&0) {
                    return Err(err(line, key, "key lengths must be at least 1"));
                }
            }
            (Section::Sweep, "n_blocks") => spec.sweep.n_blocks = list(line, key, v)?,

            (Section::Core, "permutations") => s.permutations = parse_permutations(line, v)?,
            (Section::Core, "loop_delay") => {
                spec.loop_delay = scalar(line, key, v)?;
                if spec.loop_delay == 0 {
                    return Err(err(line, key, "loop_delay must be at least 1"));
                }
            }
            (sec, key) => return Err(err(line, key, format!("unknown key in [{}]", sec.name()))),
        }
    }
    validate(&spec, session_line)?;
    Ok(spec)
}

/// Whole-spec checks that no single line can decide.
pub fn validate(spec: &ExperimentSpec, session_line: usize) -> Result<(), ConfigError> {
    if spec.trials == 0 {
        return Err(err(0, "trials", "trials must be at least 1"));
    }
    let device = DeviceModel::new(spec.loop_delay);
    for op in spec.session.permutations.ops() {
        perm_to_schedule(op.perm(), &device).map_err(|e| err(0, "permutations", format!("{e}")))?;
    }
    for point in crate::experiment::points(spec) {
        let cfg = crate::experiment::session_for(spec, &point, 0);
        cfg.validate()
            .map_err(|e| err(session_line, "session", format!("{e} (at {point})")))?;
    }
    Ok(())
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders `spec` in the file format; [`parse`] reads it back unchanged.
pub fn render(spec: &ExperimentSpec) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let s = &spec.session;
    let e = &spec.eve;
    let w = &mut out;
    let _ = writeln!(w, "[experiment]");
    let _ = writeln!(w, "name = {}", spec.name);
    let _ = writeln!(w, "trials = {}", spec.trials);
    let _ = writeln!(w, "seed = {}", spec.seed);
    if let Some(path) = &spec.output {
        let _ = writeln!(w, "output = {}", path.display());
    }
    let _ = writeln!(w, "\n[session]");
    let _ = writeln!(w, "mode = {}", mode_str(s.mode));
    let _ = writeln!(w, "n_blocks = {}", s.n_blocks);
    let _ = writeln!(w, "block_size = {}", s.block_size);
    let _ = writeln!(w, "control_key = {}", s.control_key);
    let _ = writeln!(w, "group_size = {}", s.group.group_size());
    let _ = writeln!(w, "check_fraction = {}", s.check_fraction);
    let _ = writeln!(w, "error_threshold = {}", s.error_threshold);
    let _ = writeln!(w, "noise = {}", s.noise);
    let placement = match s.noise_placement {
        NoisePlacement::AfterEve => "after_eve",
        NoisePlacement::BeforeEve => "before_eve",
    };
    let _ = writeln!(w, "noise_placement = {placement}");
    let _ = writeln!(w, "bootstrap_key_bits = {}", s.bootstrap_key_bits);
    let _ = writeln!(w, "eve = {}", e.kind);
    let _ = writeln!(w, "eve_weights = {}", join(&e.weights));
    if let Some(key) = &e.key {
        let _ = writeln!(w, "eve_key = {key}");
    }
    let _ = writeln!(w, "probe_a = {}", join(&e.probe_a));
    let _ = writeln!(w, "probe_b = {}", join(&e.probe_b));
    let _ = writeln!(w, "probe_duos = {}", e.probe_duos);

    let sw = &spec.sweep;
    if sw != &Sweep::default() {
        let _ = writeln!(w, "\n[sweep]");
        if !sw.mode.is_empty() {
            let modes: Vec<&str> = sw.mode.iter().map(|m| mode_str(*m)).collect();
            let _ = writeln!(w, "mode = {}", join(&modes));
        }
        for (name, axis) in [("eve", join(&sw.eve)), ("noise", join(&sw.noise))] {
            if !axis.is_empty() {
                let _ = writeln!(w, "{name} = {axis}");
            }
        }
        if !sw.key_values.is_empty() {
            let _ = writeln!(w, "key_values = {}", join(&sw.key_values));
        }
        if !sw.n_blocks.is_empty() {
            let _ = writeln!(w, "n_blocks = {}", join(&sw.n_blocks));
        }
    }

    let perms: Vec<String> = s
        .permutations
        .ops()
        .iter()
        .map(|op| join(op.perm().images()))
        .collect();
    let _ = writeln!(w, "\n[core]");
    let _ = writeln!(w, "permutations = {}", perms.join("; "));
    let _ = writeln!(w, "loop_delay = {}", spec.loop_delay);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# noise sweep
[experiment]
name = noise-scan
trials = 3
seed = 7

[session]
n_blocks = 100   # 400 pairs
control_key = 01_10
check_fraction = 0.2
eve = guess_core
eve_weights = 0.4, 0.2, 0.2, 0.2

[sweep]
noise = 0, 0.05, 0.1
eve = none, guess_core

[core]
permutations = 0,1,2,3; 1,2,3,0; 2,3,0,1; 3,0,1,2
";

    #[test]
    fn parses_sample() {
        let spec = parse(SAMPLE).unwrap();
        assert_eq!(spec.name, "noise-scan");
        assert_eq!(spec.trials, 3);
        assert_eq!(spec.session.n_blocks, 100);
        assert_eq!(spec.session.control_key.to_string(), "0110");
        assert_eq!(spec.eve.kind, EveKind::GuessCore);
        assert_eq!(spec.eve.weights, [0.4, 0.2, 0.2, 0.2]);
        assert_eq!(spec.sweep.noise, vec![0.0, 0.05, 0.1]);
        assert_eq!(spec.sweep.eve, vec![EveKind::None, EveKind::GuessCore]);
        assert_eq!(spec.session.permutations, PermutationSet::cyclic());
    }

    #[test]
    fn render_round_trips() {
        let spec = parse(SAMPLE).unwrap();
        assert_eq!(parse(&render(&spec)).unwrap(), spec);
        let mut other = ExperimentSpec {
            output: Some("out/report.csv".into()),
            ..ExperimentSpec::default()
        };
        other.eve.key = Some(ControlKey::parse("1110").unwrap());
        other.sweep.mode = vec![Mode::Keyed, Mode::Bootstrap];
        other.sweep.key_values = vec![1, 3];
        other.sweep.n_blocks = vec![10, 20];
        assert_eq!(parse(&render(&other)).unwrap(), other);
    }

    #[test]
    fn diagnostics_carry_line_and_field() {
        let cases = [
            ("[session]\nnoise = 2\n", 2, "noise"),
            ("[session]\nn_blocks = many\n", 2, "n_blocks"),
            ("[bogus]\n", 1, "section"),
            ("trials = 1\n", 1, "trials"),
            ("[experiment]\n\ntrials = 0\n", 3, "trials"),
            ("[session]\nfoo = 1\n", 2, "foo"),
            ("[session]\nnoise = 0\nnoise = 0.1\n", 3, "noise"),
            ("[sweep]\neve = sometimes\n", 2, "eve"),
            (
                "[core]\npermutations = 0,1,2,3; 0,1,2,3; 2,3,0,1; 3,0,1,2\n",
                2,
                "permutations",
            ),
            ("[session]\nprobe_a = 1, 0\n", 2, "probe_a"),
            ("[session]\njust words\n", 2, "just words"),
        ];
        for (text, line, field) in cases {
            let e = parse(text).unwrap_err();
            assert_eq!((e.line, e.field.as_str()), (line, field), "{text:?}: {e}");
        }
    }

    #[test]
    fn whole_spec_validation() {
        let e = parse("[core]\nloop_delay = 1\n").unwrap_err();
        assert_eq!(e.field, "permutations");
        assert!(e.to_string().contains("loop delay of 1"), "{e}");
        let e = parse("[session]\nn_blocks = 1\ncheck_fraction = 0.9\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (1, "session"));
        let e = parse("[session]\neve = guess_core\neve_weights = 1, 1, 0, 0\n").unwrap_err();
        assert_eq!(e.field, "session");
    }
}
