//! Worker pool and data-parallel wrappers. Work is split into chunks whose
//! size depends only on the input, and results are merged in input order, so
//! output does not depend on the number of workers.

use almsq_core::detector::{enumerate, Witness};
use almsq_core::scanner::{
    classify_corollary, classify_theorem, CoverageReport, SampleOutcome, ScanConfig, ScanMode,
};
use almsq_core::{interval_length, AlmostSquareParams};
use rayon::prelude::*;

use crate::error::CliError;

/// Worker count from `ALMSQ_THREADS`, or all cores.
pub fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var("ALMSQ_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!("ALMSQ_THREADS = {v:?} is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Chunk size for `len` items: about 256 chunks, at least `min`.
pub fn auto_chunk(len: u64, min: u64) -> u64 {
    len.div_ceil(256).max(min).max(1)
}

/// [`enumerate`] over `[lo, hi]` split into chunks of `chunk` integers.
pub fn par_enumerate(lo: u64, hi: u64, params: &AlmostSquareParams, chunk: u64) -> Result<Vec<Witness>, CliError> {
    if lo == 0 || hi < lo {
        return Ok(enumerate(lo, hi, params)?);
    }
    let chunk = chunk.max(1);
    let count = (hi - lo) / chunk + 1;
    let parts: Vec<_> = (0..count)
        .into_par_iter()
        .map(|i| {
            let a = lo + i * chunk;
            let b = a.saturating_add(chunk - 1).min(hi);
            enumerate(a, b, params)
        })
        .collect();
    let mut out = Vec::new();
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Parallel equivalent of `almsq_core::scanner::coverage_scan`.
pub fn par_coverage(cfg: &ScanConfig, chunk: u64) -> Result<CoverageReport, CliError> {
    cfg.validate()?;
    let points = cfg.sample_points();
    let outcomes: Vec<Result<SampleOutcome, almsq_core::Error>> = match cfg.mode {
        ScanMode::Theorem => {
            let (lo, hi) = cfg.enumeration_range()?;
            let ns: Vec<u64> = par_enumerate(lo, hi, &cfg.params, chunk)?.into_iter().map(|w| w.n).collect();
            points
                .par_iter()
                .with_min_len(256)
                .map(|&x| Ok(classify_theorem(x, interval_length(x, &cfg.spec)?, &ns)))
                .collect()
        }
        ScanMode::Corollary => points
            .par_iter()
            .with_min_len(16)
            .map(|&x| classify_corollary(x, interval_length(x, &cfg.spec)?))
            .collect(),
    };
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(CoverageReport::from_outcomes(&outcomes))
}
