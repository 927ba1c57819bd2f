//! Certification and enumeration of almost squares.
//!
//! [`enumerate`] generates factor pairs near the square root and is the
//! production path; [`enumerate_oracle`] runs [`certify`] on every integer and
//! exists to cross-check it.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact::CertifiedWindow;
use crate::params::AlmostSquareParams;

/// `n = a·b` with `a ≤ b` and both factors inside the window of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub n: u64,
    pub a: u64,
    pub b: u64,
}

/// `n = a·b` with `√x/2 ≤ a ≤ b ≤ 2√x` for an anchor `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorollaryWitness {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub x: f64,
}

/// Smallest `a` (with cofactor) such that both lie in the window of `n`.
pub fn certify(n: u64, params: &AlmostSquareParams) -> Result<Option<Witness>> {
    let cw = CertifiedWindow::new(n, params)?;
    let root = n.isqrt();
    // Conservative floor for the search: a ≥ lo and n/a ≤ hi.
    let slack = cw.radius() + 1.0;
    let from_lo = cw.lower() - slack;
    let from_hi = n as f64 / (cw.upper() + slack) - 1.0;
    let start = from_lo.max(from_hi).max(1.0) as u64;
    let start = start.max(1);
    if start > root {
        return Ok(None);
    }
    let check = |a: u64| -> Result<Option<Witness>> {
        let b = n / a;
        if cw.contains(a)? && cw.contains(b)? {
            Ok(Some(Witness { n, a, b }))
        } else {
            Ok(None)
        }
    };
    if let Ok(n32) = u32::try_from(n) {
        for a in start as u32..=root as u32 {
            if n32 % a == 0 {
                if let Some(w) = check(a as u64)? {
                    return Ok(Some(w));
                }
            }
        }
    } else {
        for a in start..=root {
            if n % a == 0 {
                if let Some(w) = check(a)? {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 || lo > hi || hi > i64::MAX as u64 {
        return Err(Error::invalid(alloc::format!(
            "range needs 1 ≤ lo ≤ hi ≤ 2^63 − 1, got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// All almost squares in `[lo, hi]`, one witness each (smallest `a`), sorted
/// by `n`.
///
/// Walks `a` from `√lo − C·hi^θ` up to `√hi` and, for each `a`, the cofactors
/// `b ≥ a` with `lo ≤ a·b ≤ hi` and `b − a ≤ 2C·hi^θ`; every candidate is
/// verified exactly.
pub fn enumerate(lo: u64, hi: u64, params: &AlmostSquareParams) -> Result<Vec<Witness>> {
    check_range(lo, hi)?;
    let reach = params.c_coef() * libm::pow(hi as f64, params.theta());
    if !reach.is_finite() {
        return Err(Error::Range("C·hi^θ overflows".into()));
    }
    let a_min = (libm::sqrt(lo as f64) - reach - 2.0).max(1.0) as u64;
    let a_max = hi.isqrt();
    let max_gap = (2.0 * reach * (1.0 + 1e-12)) as u64 + 1;

    let mut found = Vec::new();
    for a in a_min.max(1)..=a_max {
        let b_from = a.max(lo.div_ceil(a));
        let b_to = (hi / a).min(a.saturating_add(max_gap));
        for b in b_from..=b_to {
            let n = a * b;
            let cw = CertifiedWindow::new(n, params)?;
            if cw.contains(a)? && cw.contains(b)? {
                found.push(Witness { n, a, b });
            }
        }
    }
    // Stable: for equal n the smallest a was pushed first.
    found.sort_by_key(|w| w.n);
    found.dedup_by_key(|w| w.n);
    Ok(found)
}

/// Same contract as [`enumerate`], by running [`certify`] on every integer.
pub fn enumerate_oracle(lo: u64, hi: u64, params: &AlmostSquareParams) -> Result<Vec<Witness>> {
    check_range(lo, hi)?;
    let mut out = Vec::new();
    for n in lo..=hi {
        if let Some(w) = certify(n, params)? {
            out.push(w);
        }
    }
    Ok(out)
}

/// `v ≤ x` for an integer `v` and a finite non-negative double `x`.
fn int_le(v: u128, x: f64) -> bool {
    if x >= 3.4e38 {
        return true;
    }
    v <= libm::floor(x) as u128
}

/// `v ≥ x` for an integer `v` and a finite non-negative double `x`.
fn int_ge(v: u128, x: f64) -> bool {
    if x >= 3.4e38 {
        return false;
    }
    v >= libm::ceil(x) as u128
}

/// Exact test `√x/2 ≤ f ≤ 2√x`, i.e. `4f² ≥ x` and `f² ≤ 4x`.
fn in_corollary_band(f: u64, x: f64) -> bool {
    let f2 = (f as u128) * (f as u128);
    int_ge(4 * f2, x) && int_le(f2, 4.0 * x)
}

/// Most balanced factorization of `n` (largest `a ≤ √n`) with both factors
/// in `[√x/2, 2√x]`.
pub fn corollary_certify(n: u64, x: f64) -> Result<Option<CorollaryWitness>> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain("anchor x must be positive and finite"));
    }
    let mut a = n.isqrt();
    while a >= 1 {
        if n % a == 0 {
            let b = n / a;
            // b only grows from here on.
            if !int_le((b as u128) * (b as u128), 4.0 * x) {
                return Ok(None);
            }
            if in_corollary_band(a, x) {
                return Ok(Some(CorollaryWitness { n, a, b, x }));
            }
            // a below the band: every smaller a is too.
            return Ok(None);
        }
        a -= 1;
    }
    Ok(None)
}
