//! Aggregated rows and their CSV / JSON-lines encodings.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::config::mode_str;
use crate::experiment::SweepPoint;
use crate::HarnessError;

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: Option<f64>,
    /// `None` below two samples.
    pub se: Option<f64>,
}

impl Moments {
    pub fn from_samples(samples: impl IntoIterator<Item = f64>) -> Self {
        let xs: Vec<f64> = samples.into_iter().collect();
        let n = xs.len();
        if n == 0 {
            return Self::default();
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let se = (n >= 2).then(|| {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        });
        Self {
            n,
            mean: Some(mean),
            se,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    JsonLines,
}

/// One sweep point. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub point: usize,
    pub mode: String,
    pub eve: String,
    pub noise: f64,
    pub key_values: usize,
    pub n_blocks: usize,
    pub trials: usize,
    pub error_rate: Option<f64>,
    pub error_rate_se: Option<f64>,
    pub checked_error_rate: Option<f64>,
    pub checked_error_rate_se: Option<f64>,
    pub wrong_guess_error_rate: Option<f64>,
    pub wrong_guess_error_rate_se: Option<f64>,
    pub sift_rate: Option<f64>,
    pub sift_rate_se: Option<f64>,
    pub key_bits: Option<f64>,
    pub key_bits_se: Option<f64>,
    pub eve_accuracy: Option<f64>,
    pub eve_accuracy_se: Option<f64>,
    pub probe_mean: Option<f64>,
    pub probe_mean_se: Option<f64>,
    pub acceptance_rate: Option<f64>,
}

pub const COLUMNS: [&str; 23] = [
    "experiment",
    "point",
    "mode",
    "eve",
    "noise",
    "key_values",
    "n_blocks",
    "trials",
    "error_rate",
    "error_rate_se",
    "checked_error_rate",
    "checked_error_rate_se",
    "wrong_guess_error_rate",
    "wrong_guess_error_rate_se",
    "sift_rate",
    "sift_rate_se",
    "key_bits",
    "key_bits_se",
    "eve_accuracy",
    "eve_accuracy_se",
    "probe_mean",
    "probe_mean_se",
    "acceptance_rate",
];

impl ReportRow {
    /// `metrics` in column order: error, checked error, wrong-guess error,
    /// sift rate, key bits, Eve accuracy, probe mean.
    pub fn new(
        experiment: String,
        point: &SweepPoint,
        key_values: usize,
        trials: usize,
        metrics: [Moments; 7],
        acceptance_rate: Option<f64>,
    ) -> Self {
        let [err, checked, wrong, sift, bits, eve, probe] = metrics;
        Self {
            experiment,
            point: point.index,
            mode: mode_str(point.mode).to_string(),
            eve: point.eve.to_string(),
            noise: point.noise,
            key_values,
            n_blocks: point.n_blocks,
            trials,
            error_rate: err.mean,
            error_rate_se: err.se,
            checked_error_rate: checked.mean,
            checked_error_rate_se: checked.se,
            wrong_guess_error_rate: wrong.mean,
            wrong_guess_error_rate_se: wrong.se,
            sift_rate: sift.mean,
            sift_rate_se: sift.se,
            key_bits: bits.mean,
            key_bits_se: bits.se,
            eve_accuracy: eve.mean,
            eve_accuracy_se: eve.se,
            probe_mean: probe.mean,
            probe_mean_se: probe.se,
            acceptance_rate,
        }
    }
}

pub fn emit_report<W: Write>(
    rows: &[ReportRow],
    format: Format,
    out: W,
) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(out);
            w.write_record(COLUMNS)?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        Format::JsonLines => {
            let mut out = out;
            for row in rows {
                serde_json::to_writer(&mut out, row)?;
                out.write_all(b"\n").map_err(serde_json::Error::io)?;
            }
            out.flush().map_err(serde_json::Error::io)?;
        }
    }
    Ok(())
}

pub fn render_report(rows: &[ReportRow], format: Format) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    emit_report(rows, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("encoders emit UTF-8"))
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<ReportRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(HarnessError::Header(header.join(",")));
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn parse_json_lines(input: &str) -> Result<Vec<ReportRow>, HarnessError> {
    input
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}
