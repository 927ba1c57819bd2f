//! Run configuration: JSON file plus command-line overrides, canonicalized
//! for digesting.

use std::fs;
use std::path::Path;

use almsq_core::scanner::ScanMode;
use almsq_core::{AlmostSquareParams, IntervalSpec, Preset};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

fn default_theta() -> f64 {
    0.5
}

fn default_c() -> f64 {
    1.0
}

fn default_eps() -> f64 {
    0.1
}

fn default_samples() -> u64 {
    1000
}

/// Every knob a subcommand can read. Fields a command does not use are
/// ignored by it but still take part in the digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_c", rename = "C")]
    pub c: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: u64,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<u64>,

    /// Scales `X`; scan and measure accept several.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ScanMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub a_coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, rename = "U", skip_serializing_if = "Option::is_none")]
    pub big_u: Option<f64>,
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub big_l: Option<f64>,
    #[serde(default, rename = "V", skip_serializing_if = "Option::is_none")]
    pub big_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config parses")
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(0.0..=0.5).contains(&self.theta) {
            return Err(CliError::Config(format!("theta = {} outside [0, 1/2]", self.theta)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(CliError::Config(format!("C = {} must be positive", self.c)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(CliError::Config(format!("eps = {} must be positive", self.eps)));
        }
        if self.samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<AlmostSquareParams, CliError> {
        Ok(AlmostSquareParams::new(self.theta, self.c)?)
    }

    /// Interval shape for scans: an explicit preset, or a custom shape when
    /// `A` is given, or the theorem preset.
    pub fn interval_spec(&self) -> Result<IntervalSpec, CliError> {
        match (self.preset, self.a_coef) {
            (Some(Preset::Corollary), _) => Ok(IntervalSpec::corollary(self.eps)),
            (Some(Preset::Conjecture), _) => Ok(IntervalSpec::conjecture(self.theta, self.eps)),
            (Some(Preset::Custom), _) | (None, Some(_)) => Ok(IntervalSpec::custom(
                self.a_coef.unwrap_or(1.0),
                self.gamma.unwrap_or(0.0),
                self.delta.unwrap_or(0.0),
            )?),
            (Some(Preset::Theorem), _) | (None, None) => Ok(IntervalSpec::theorem(self.theta, self.eps)),
        }
    }

    /// Sorted-key JSON with shortest round-trip numbers.
    pub fn canonical(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("config serializes"))
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Config::parse(&text)
}

/// `serde_json::Value` keeps object keys sorted, so printing it compactly
/// is already canonical.
pub fn canonical_json(value: &serde_json::Value) -> String {
    serde_json::to_string(value).expect("value serializes")
}

/// SHA-256 of the canonical JSON of `{command, config, extra}`, hex encoded.
pub fn digest(command: &str, cfg: &Config, extra: Option<&serde_json::Value>) -> String {
    let mut doc = serde_json::json!({
        "command": command,
        "config": serde_json::to_value(cfg).expect("config serializes"),
    });
    if let Some(extra) = extra {
        doc["extra"] = extra.clone();
    }
    hex::encode(Sha256::digest(canonical_json(&doc).as_bytes()))
}
