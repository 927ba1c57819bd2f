//! JSONL result records and CSV tables.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use almsq_core::oracles::BoundReport;
use almsq_core::scanner::{CoverageReport, GapStats, ScanMode};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub started: String,
    pub finished: String,
    pub tool_version: String,
    pub seed: u64,
    pub threads: usize,
    /// Work items per parallel task; 0 when the command runs serially.
    pub chunk_size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPayload {
    pub n: u64,
    pub a: u64,
    pub b: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveragePayload {
    pub x: f64,
    pub span: f64,
    pub samples: u64,
    pub seed: u64,
    pub mode: ScanMode,
    #[serde(flatten)]
    pub report: CoverageReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapPayload {
    pub lo: u64,
    pub hi: u64,
    #[serde(flatten)]
    pub stats: GapStats,
}

/// A named evaluation: inputs and outputs as flat name → value maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPayload {
    pub quantity: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
}

impl EvalPayload {
    pub fn new(quantity: &str) -> Self {
        Self { quantity: quantity.into(), inputs: BTreeMap::new(), outputs: BTreeMap::new() }
    }

    pub fn input(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.inputs.insert(key.into(), v.into());
        self
    }

    pub fn output(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.outputs.insert(key.into(), v.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum Record {
    Manifest(RunManifest),
    Witness(WitnessPayload),
    Coverage(CoveragePayload),
    Gap(GapPayload),
    Bound(BoundReport),
    Eval(EvalPayload),
}

/// Writes the manifest followed by the records, one JSON object per line.
pub fn write_jsonl(path: &Path, manifest: &RunManifest, records: &[Record]) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path)?);
    let head = Record::Manifest(manifest.clone());
    for rec in std::iter::once(&head).chain(records) {
        serde_json::to_writer(&mut out, rec).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<Record>, CliError> {
    let file = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

/// A CSV table; floats are written with 17 significant digits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// One row per eval record: inputs, then outputs, columns taken from the
    /// first record.
    pub fn from_evals(evals: &[&EvalPayload]) -> Self {
        let Some(first) = evals.first() else {
            return Self::default();
        };
        let mut header = vec!["quantity".to_string()];
        header.extend(first.inputs.keys().cloned());
        header.extend(first.outputs.keys().cloned());
        let mut table = Self { header, rows: Vec::new() };
        for e in evals {
            let mut row = vec![e.quantity.clone()];
            row.extend(first.inputs.keys().map(|k| e.inputs.get(k).map(cell).unwrap_or_default()));
            row.extend(first.outputs.keys().map(|k| e.outputs.get(k).map(cell).unwrap_or_default()));
            table.rows.push(row);
        }
        table
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
        let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}
