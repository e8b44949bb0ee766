//! Deterministic artifact emission: fixed 17-significant-digit floats,
//! `"-inf"` sentinel for exact zeros, `\n` line endings, lexicographic
//! frequency order, and a settings-hash manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use torus_cauchy_core::spectral_field::SpectralField;
use torus_cauchy_core::witness::ProbeReport;

use crate::CliError;

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn field_csv(field: &SpectralField) -> String {
    let dim = field.dimension();
    let mut out = String::new();
    for d in 1..=dim {
        let _ = write!(out, "xi_{d},");
    }
    out.push_str("logmag,phase\n");
    for xi in SpectralField::frequency_box(dim, field.truncation()) {
        let v = field.coefficient(&xi);
        for k in &xi {
            let _ = write!(out, "{k},");
        }
        let _ = writeln!(out, "{},{}", fmt_float(v.logmag()), fmt_float(v.phase()));
    }
    out
}

pub fn probe_csv(report: &ProbeReport) -> String {
    let mut out = String::from("n,t_n,xi_norm,logmag,expected_logmag,deviation\n");
    for row in &report.rows {
        let expected = row.expected.map(fmt_float).unwrap_or_default();
        let deviation = row.deviation.map(fmt_float).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{expected},{deviation}",
            row.n,
            fmt_float(row.time),
            fmt_float(row.xi_norm),
            fmt_float(row.logmag),
        );
    }
    out
}

pub fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

#[derive(Debug, Serialize)]
pub struct Manifest<S: Serialize> {
    pub command: &'static str,
    pub input_sha256: String,
    pub seed: u64,
    pub settings: S,
    pub settings_sha256: String,
    pub outputs: Vec<String>,
}

impl<S: Serialize> Manifest<S> {
    pub fn new(
        command: &'static str,
        input_text: &str,
        seed: u64,
        settings: S,
        outputs: Vec<String>,
    ) -> Self {
        let settings_json = serde_json::to_string(&settings).expect("settings serialize to JSON");
        Manifest {
            command,
            input_sha256: sha256_hex(input_text),
            seed,
            settings_sha256: sha256_hex(&settings_json),
            settings,
            outputs,
        }
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}
