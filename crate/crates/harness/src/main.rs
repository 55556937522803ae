use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use core_qkd::adversary::EveStrategy;
use core_qkd::ops::ControlKey;
use core_qkd::protocol::{extract_raw_key, run_keyed_session, SessionConfig};
use core_qkd_harness::experiment::{load_spec, run_experiment, BUILTINS};
use core_qkd_harness::report::{emit_report, Format};
use core_qkd_harness::{selftest, HarnessError};

#[derive(Parser)]
#[command(
    version,
    about = "Monte Carlo runner for CORE quantum key distribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file or a built-in experiment
    Run {
        /// Path to a specification file, or one of paper-table,
        /// bootstrap-sift, noise-scan
        spec: String,
        /// Override the master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of the spec's output or stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Trace a short keyed session block by block
    Demo {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        blocks: usize,
        /// Let a uniformly guessing eavesdropper intercept every block
        #[arg(long)]
        eve: bool,
        #[arg(long, default_value = "00011011")]
        key: String,
    },
    /// Run the acceptance criteria
    Selftest,
    /// Print a built-in specification
    Show { name: String },
}

fn run(
    spec: &str,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), HarnessError> {
    let mut spec = load_spec(spec)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let rows = run_experiment(&spec)?;
    match out.or(spec.output.clone()) {
        Some(path) => {
            let file = File::create(&path).map_err(|e| HarnessError::Io {
                path: path.clone(),
                source: e,
            })?;
            emit_report(&rows, format, BufWriter::new(file))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => emit_report(&rows, format, io::stdout().lock())?,
    }
    Ok(())
}

fn demo(seed: u64, blocks: usize, eve: bool, key: &str) -> Result<(), HarnessError> {
    let cfg = SessionConfig {
        n_blocks: blocks.max(1),
        control_key: ControlKey::parse(key).map_err(core_qkd::ProtocolError::from)?,
        check_fraction: 0.25,
        error_threshold: 0.11,
        eve: if eve {
            EveStrategy::uniform_guess()
        } else {
            EveStrategy::None
        },
        seed,
        ..SessionConfig::default()
    };
    let t = run_keyed_session(&cfg)?;
    let mut out = io::stdout().lock();
    let w = &mut out;
    let io = |e| HarnessError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    writeln!(
        w,
        "control key {} ({} values), seed {seed}",
        cfg.control_key,
        cfg.control_key.n_values()
    )
    .map_err(io)?;
    for b in &t.blocks {
        let op = cfg.permutations.op(b.alice_op);
        write!(
            w,
            "\nblock {}: E{} lower line {}",
            b.index,
            b.alice_op,
            op.perm()
        )
        .map_err(io)?;
        if let Some(g) = b.eve_guess {
            let verdict = if g == b.alice_op { "right" } else { "wrong" };
            write!(w, ", Eve guessed E{g} ({verdict})").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
        for p in t.pairs.iter().filter(|p| p.block == b.index) {
            let mark = if p.agrees() { "" } else { "  <- error" };
            let checked = if p.checked { " [checked]" } else { "" };
            writeln!(
                w,
                "  pair {}: Alice {} -> Bob {}{checked}{mark}",
                p.position, p.prepared, p.measured
            )
            .map_err(io)?;
        }
    }
    let v = t.verdict.expect("sessions end with a check");
    writeln!(
        w,
        "\nchecked {} pairs, error rate {:.4}, threshold {}: {}",
        v.checked_count,
        v.measured_error_rate,
        v.threshold,
        if v.accepted { "accepted" } else { "rejected" }
    )
    .map_err(io)?;
    match extract_raw_key(&t) {
        Ok(bits) => {
            let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(w, "raw key ({} bits): {s}", bits.len()).map_err(io)?;
        }
        Err(e) => writeln!(w, "no key: {e}").map_err(io)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            spec,
            seed,
            out,
            format,
        } => run(&spec, seed, out, format),
        Command::Demo {
            seed,
            blocks,
            eve,
            key,
        } => demo(seed, blocks, eve, &key),
        Command::Selftest => {
            let outcomes = selftest::run_all(|o| println!("{o}"));
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed", outcomes.len() - failed);
            return if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
        Command::Show { name } => match core_qkd_harness::builtin(&name) {
            Some(text) => {
                print!("{text}");
                Ok(())
            }
            None => Err(HarnessError::UnknownSpec(format!(
                "{name} (built-ins: {})",
                BUILTINS.join(", ")
            ))),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
