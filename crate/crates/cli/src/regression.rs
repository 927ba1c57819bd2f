//! Pinned measurements from `data/regression.json`.

use std::collections::BTreeMap;

use almsq_core::oracles::{max_ratio, BoundReport, Lemma};
use serde::Deserialize;

const DATA: &str = include_str!("../data/regression.json");

#[derive(Debug, Clone, Deserialize)]
pub struct Regression {
    /// Relative tolerance for ratio comparisons.
    pub tolerance: f64,
    /// Largest lhs/bound over each lemma's default grid.
    pub verify_max_ratio: BTreeMap<String, f64>,
    /// Exceptional fraction of the coverage trend scan, keyed by X.
    pub coverage_trend: BTreeMap<String, f64>,
    /// max |zeta_afe(t) − ζ(1/2+it)|·t^{1/4} over the 200-point grid on [20, 2000].
    pub afe_constant: f64,
    /// Largest mv_mean_value ratio over the default mean value grid.
    pub mv_constant: f64,
}

pub fn pinned() -> Regression {
    serde_json::from_str(DATA).expect("regression data parses")
}

/// Relative difference `|a − b|/|b|`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Compares the max ratio of `reports` with the pinned value for `lemma`.
pub fn check_lemma(lemma: Lemma, reports: &[BoundReport]) -> Result<(), String> {
    let reg = pinned();
    let Some(&want) = reg.verify_max_ratio.get(lemma.label()) else {
        return Err(format!("no pinned ratio for lemma {}", lemma.label()));
    };
    let got = max_ratio(reports);
    if got.is_finite() && rel_diff(got, want) <= reg.tolerance {
        Ok(())
    } else {
        Err(format!("lemma {}: max ratio {got} vs pinned {want}", lemma.label()))
    }
}
