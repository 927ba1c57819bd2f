//! Coverage of short intervals by almost squares.
//!
//! A sample point `x` is *exceptional* when `[x, x + H(x)]` contains no
//! almost square (theorem mode) or no integer `n = a·b` with
//! `√x/2 ≤ a, b ≤ 2√x` (corollary mode). Sample points are real; the interval
//! test uses the real endpoints.
//!
//! Sampling is reproducible: `seed = 0` gives the evenly spaced points
//! `x_i = X + i·span/samples`, any other seed drives a PCG-64 (XSL-RR 128/64)
//! generator seeded through `seed_from_u64`, mapped to `[0, 1)` by taking the
//! top 53 bits of each output.

use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};
use rand_pcg::Pcg64;

use crate::detector::{corollary_certify, enumerate};
use crate::error::{Error, Result};
use crate::params::{interval_length, AlmostSquareParams, IntervalSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ScanMode {
    Theorem,
    Corollary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanConfig {
    pub big_x: f64,
    /// Length of the scanned range `[X, X + span]`; `None` means `span = X`.
    pub span: Option<f64>,
    pub params: AlmostSquareParams,
    pub spec: IntervalSpec,
    pub samples: u64,
    pub seed: u64,
    pub mode: ScanMode,
}

/// Power-of-two histogram bucket `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HistogramBucket {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
}

/// Result of a coverage scan.
///
/// `max_gap` and `gap_histogram` describe the waiting distance
/// `w(x) = n − x` from each non-exceptional sample to the first qualifying
/// integer `n ≥ x`; the histogram buckets `⌊w⌋` as `[0, 1), [1, 2), [2, 4), …`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverageReport {
    pub sampled: u64,
    pub exceptional: u64,
    pub exceptional_fraction: f64,
    pub max_gap: f64,
    pub gap_histogram: Vec<HistogramBucket>,
}

/// What a single sample point saw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleOutcome {
    /// First qualifying integer is `wait` past `x` (and within `H(x)`).
    Covered { wait: f64 },
    Exceptional,
}

impl ScanConfig {
    pub fn span(&self) -> f64 {
        self.span.unwrap_or(self.big_x)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        let span = self.span();
        if !(self.big_x.is_finite() && span.is_finite() && span > 0.0) {
            return Err(Error::invalid("X and span must be finite, span > 0"));
        }
        if self.big_x + span + self.max_interval_length()? >= 9.2e18 {
            return Err(Error::Range("scan range exceeds 63-bit integers".into()));
        }
        let h = interval_length(self.big_x, &self.spec)?;
        if h < 1.0 {
            return Err(Error::DegenerateInterval(h));
        }
        Ok(())
    }

    /// Largest `H(x)` over the scanned range (`H` is evaluated at both ends;
    /// it is monotone in `x` for the shapes used here).
    pub fn max_interval_length(&self) -> Result<f64> {
        let a = interval_length(self.big_x, &self.spec)?;
        let b = interval_length(self.big_x + self.span(), &self.spec)?;
        Ok(a.max(b))
    }

    /// The sample points in order.
    pub fn sample_points(&self) -> Vec<f64> {
        let span = self.span();
        let count = self.samples as usize;
        if self.seed == 0 {
            (0..self.samples)
                .map(|i| self.big_x + i as f64 * span / self.samples as f64)
                .collect()
        } else {
            let mut rng = Pcg64::seed_from_u64(self.seed);
            (0..count)
                .map(|_| {
                    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                    self.big_x + u * span
                })
                .collect()
        }
    }

    /// Integer range that must be enumerated in theorem mode.
    pub fn enumeration_range(&self) -> Result<(u64, u64)> {
        let lo = libm::ceil(self.big_x).max(1.0) as u64;
        let hi = libm::floor(self.big_x + self.span() + self.max_interval_length()?) as u64;
        Ok((lo, hi.max(lo)))
    }
}

/// Classifies `x` against a sorted list of almost squares covering
/// `[x, x + H(x)]`.
pub fn classify_theorem(x: f64, h: f64, sorted: &[u64]) -> SampleOutcome {
    let start = libm::ceil(x) as u64;
    let idx = sorted.partition_point(|&n| n < start);
    match sorted.get(idx) {
        Some(&n) if (n as f64) <= x + h => SampleOutcome::Covered { wait: n as f64 - x },
        _ => SampleOutcome::Exceptional,
    }
}

/// Classifies `x` by sweeping `[x, x + H(x)]` with [`corollary_certify`].
pub fn classify_corollary(x: f64, h: f64) -> Result<SampleOutcome> {
    let start = libm::ceil(x) as u64;
    let end = libm::floor(x + h) as u64;
    for n in start..=end {
        if corollary_certify(n, x)?.is_some() {
            return Ok(SampleOutcome::Covered { wait: n as f64 - x });
        }
    }
    Ok(SampleOutcome::Exceptional)
}

fn bucket_of(v: u64) -> (u64, u64) {
    if v == 0 {
        (0, 1)
    } else {
        let k = 63 - v.leading_zeros();
        (1u64 << k, 1u64 << (k + 1))
    }
}

fn histogram<I: IntoIterator<Item = u64>>(values: I) -> Vec<HistogramBucket> {
    let mut buckets: Vec<HistogramBucket> = Vec::new();
    for v in values {
        let (lo, hi) = bucket_of(v);
        match buckets.iter_mut().find(|b| b.lo == lo) {
            Some(b) => b.count += 1,
            None => buckets.push(HistogramBucket { lo, hi, count: 1 }),
        }
    }
    buckets.sort_by_key(|b| b.lo);
    buckets
}

impl CoverageReport {
    /// Aggregates per-sample outcomes (in sample order).
    pub fn from_outcomes(outcomes: &[SampleOutcome]) -> Self {
        let sampled = outcomes.len() as u64;
        let mut exceptional = 0;
        let mut max_gap: f64 = 0.0;
        let mut waits = Vec::new();
        for o in outcomes {
            match *o {
                SampleOutcome::Exceptional => exceptional += 1,
                SampleOutcome::Covered { wait } => {
                    max_gap = max_gap.max(wait);
                    waits.push(libm::floor(wait) as u64);
                }
            }
        }
        CoverageReport {
            sampled,
            exceptional,
            exceptional_fraction: if sampled == 0 { 0.0 } else { exceptional as f64 / sampled as f64 },
            max_gap,
            gap_histogram: histogram(waits),
        }
    }
}

/// Estimates the exceptional fraction of `[X, X + span]`.
pub fn coverage_scan(cfg: &ScanConfig) -> Result<CoverageReport> {
    cfg.validate()?;
    let points = cfg.sample_points();
    let mut outcomes = Vec::with_capacity(points.len());
    match cfg.mode {
        ScanMode::Theorem => {
            let (lo, hi) = cfg.enumeration_range()?;
            let ns: Vec<u64> = enumerate(lo, hi, &cfg.params)?.into_iter().map(|w| w.n).collect();
            for x in points {
                let h = interval_length(x, &cfg.spec)?;
                outcomes.push(classify_theorem(x, h, &ns));
            }
        }
        ScanMode::Corollary => {
            for x in points {
                let h = interval_length(x, &cfg.spec)?;
                outcomes.push(classify_corollary(x, h)?);
            }
        }
    }
    Ok(CoverageReport::from_outcomes(&outcomes))
}

/// Gaps between consecutive almost squares in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapStats {
    pub count: u64,
    pub max_gap: u64,
    pub histogram: Vec<HistogramBucket>,
}

/// Gap statistics of an already sorted list of almost squares.
pub fn gap_stats_of(sorted: &[u64]) -> Result<GapStats> {
    if sorted.len() < 2 {
        return Err(Error::InsufficientData(alloc::format!(
            "{} almost square(s) in range, need at least 2",
            sorted.len()
        )));
    }
    let gaps = sorted.windows(2).map(|w| w[1] - w[0]);
    Ok(GapStats {
        count: sorted.len() as u64,
        max_gap: gaps.clone().max().unwrap_or(0),
        histogram: histogram(gaps),
    })
}

pub fn gap_stats(lo: u64, hi: u64, params: &AlmostSquareParams) -> Result<GapStats> {
    let ns: Vec<u64> = enumerate(lo, hi, params)?.into_iter().map(|w| w.n).collect();
    gap_stats_of(&ns)
}

/// Exact Lebesgue measure of `{x ∈ [start, end] : [x, x + h] has no element of
/// sorted}` for a constant length `h`. `sorted` must cover `[start, end + h]`.
pub fn exceptional_measure(sorted: &[u64], start: f64, end: f64, h: f64) -> f64 {
    // x is covered iff some s ∈ [x, x + h], i.e. x ∈ [s − h, s].
    let mut covered = 0.0;
    let mut cur_lo = f64::NAN;
    let mut cur_hi = f64::NAN;
    for &s in sorted {
        let lo = (s as f64 - h).max(start);
        let hi = (s as f64).min(end);
        if lo > hi {
            continue;
        }
        if cur_hi.is_nan() || lo > cur_hi {
            if !cur_hi.is_nan() {
                covered += cur_hi - cur_lo;
            }
            cur_lo = lo;
            cur_hi = hi;
        } else {
            cur_hi = cur_hi.max(hi);
        }
    }
    if !cur_hi.is_nan() {
        covered += cur_hi - cur_lo;
    }
    (end - start) - covered
}

/// Runs [`coverage_scan`] at each `X` with everything else taken from
/// `template`; the span follows `template.span` or defaults to `X`.
pub fn exceptional_trend(xs: &[f64], template: &ScanConfig) -> Result<Vec<(f64, f64)>> {
    xs.iter()
        .map(|&x| {
            let cfg = ScanConfig { big_x: x, ..*template };
            coverage_scan(&cfg).map(|r| (x, r.exceptional_fraction))
        })
        .collect()
}
