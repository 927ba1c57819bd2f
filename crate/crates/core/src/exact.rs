//! Certified comparison of integers against the irrational window endpoints
//! `√n ± C·n^θ`.
//!
//! Decisions are made in three stages:
//!
//! 1. binary64 enclosures with a generous a-priori error radius;
//! 2. an algebraic tie test, since an endpoint can be an exact integer
//!    (e.g. `n = 16, θ = 1/2, C = 1` puts `8` exactly on the upper endpoint);
//! 3. directed-rounding multiprecision enclosures, doubling the mantissa
//!    width from 128 up to [`MAX_PRECISION_BITS`] bits.
//!
//! The tie test rests on the fact that `θ` is a binary64 value, hence a dyadic
//! rational `m / 2^k` with `m` odd. A tie `|a − √n| = C·n^θ` forces `n^θ` into
//! `Q(√n)`, which for `n ≥ 2` requires `n` to be a perfect `2^(k−1)`-th power.
//! With `n < 2^64` this is impossible once `k ≥ 7`, so only `k ≤ 6` needs the
//! exact check; every other ambiguity is an irrational near-miss that a finite
//! precision resolves.

use core::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::params::AlmostSquareParams;

/// Largest mantissa width tried before giving up.
pub const MAX_PRECISION_BITS: usize = 8192;

const START_PRECISION_BITS: usize = 128;

/// Which endpoint of the window is being compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    /// `√n − C·n^θ`
    Lower,
    /// `√n + C·n^θ`
    Upper,
}

/// Binary64 enclosure of both window endpoints of a single `n`.
///
/// `contains` answers exactly; the enclosure is only the fast path.
#[derive(Debug, Clone, Copy)]
pub struct CertifiedWindow {
    n: u64,
    theta: f64,
    c: f64,
    sqrt_n: f64,
    half_width: f64,
    radius: f64,
}

impl CertifiedWindow {
    pub fn new(n: u64, params: &AlmostSquareParams) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        let nf = n as f64;
        let sqrt_n = libm::sqrt(nf);
        let half_width = params.c_coef() * libm::pow(nf, params.theta());
        if !half_width.is_finite() {
            return Err(Error::Range(alloc::format!(
                "C·n^θ overflows for n = {n}, θ = {}, C = {}",
                params.theta(),
                params.c_coef()
            )));
        }
        // Conversion of n, the correctly rounded sqrt, pow (< 1 ulp), the
        // product with C and the final add/sub together stay far below 32 ulp.
        let radius = 32.0 * f64::EPSILON * 0.5 * (sqrt_n + half_width);
        Ok(Self {
            n,
            theta: params.theta(),
            c: params.c_coef(),
            sqrt_n,
            half_width,
            radius,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Floating-point lower endpoint (unclamped).
    pub fn lower(&self) -> f64 {
        self.sqrt_n - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.sqrt_n + self.half_width
    }

    /// Absolute error radius valid for both [`lower`](Self::lower) and
    /// [`upper`](Self::upper).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Exact test `√n − C·n^θ ≤ a ≤ √n + C·n^θ`.
    pub fn contains(&self, a: u64) -> Result<bool> {
        if self.compare(a, Endpoint::Lower)? == Ordering::Less {
            return Ok(false);
        }
        Ok(self.compare(a, Endpoint::Upper)? != Ordering::Greater)
    }

    /// Exact ordering of `a` relative to one endpoint. `Equal` is only
    /// returned for certified ties.
    pub fn compare(&self, a: u64, which: Endpoint) -> Result<Ordering> {
        if let Some(ord) = self.compare_fast(a, which) {
            return Ok(ord);
        }
        if self.n == 1 {
            return Ok(compare_at_one(a, self.c, which));
        }
        if is_exact_tie(a, self.n, self.theta, self.c, which) {
            return Ok(Ordering::Equal);
        }
        compare_multiprecision(a, self.n, self.theta, self.c, which)
    }

    fn compare_fast(&self, a: u64, which: Endpoint) -> Option<Ordering> {
        if a > (1u64 << 53) {
            return None;
        }
        let af = a as f64;
        let mid = match which {
            Endpoint::Lower => self.lower(),
            Endpoint::Upper => self.upper(),
        };
        if af < mid - self.radius {
            Some(Ordering::Less)
        } else if af > mid + self.radius {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

// n = 1: both √n and n^θ are 1, so the endpoints are the dyadic rationals 1 ∓ C.
fn compare_at_one(a: u64, c: f64, which: Endpoint) -> Ordering {
    // a is close to 1 here, so the conversion is exact.
    let d = a as f64 - 1.0;
    let target = match which {
        Endpoint::Lower => -c,
        Endpoint::Upper => c,
    };
    d.partial_cmp(&target).unwrap_or(Ordering::Less)
}

/// Splits a finite non-negative double into `(m, k)` with `x = m / 2^k`, `m`
/// odd (or `x = 0` as `(0, 0)`).
pub(crate) fn dyadic_parts(x: f64) -> (u64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let tz = mant.trailing_zeros();
    mant >>= tz;
    exp += tz as i64;
    (mant, -exp)
}

/// Element `p + q·√n` of `Z[√n]`.
#[derive(Clone)]
struct Quadratic {
    p: BigInt,
    q: BigInt,
}

impl Quadratic {
    fn square(&self, n: &BigInt) -> Self {
        Quadratic {
            p: &self.p * &self.p + &self.q * &self.q * n,
            q: BigInt::from(2u8) * &self.p * &self.q,
        }
    }
}

fn isqrt_exact(n: u64) -> Option<u64> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// True iff `a` equals the chosen endpoint exactly.
fn is_exact_tie(a: u64, n: u64, theta: f64, c: f64, which: Endpoint) -> bool {
    let (m, k) = dyadic_parts(theta);
    if k > 6 {
        return false;
    }
    // D = a − √n (upper) or √n − a (lower) must be positive.
    let a2 = (a as u128) * (a as u128);
    let positive = match which {
        Endpoint::Upper => a2 > n as u128,
        Endpoint::Lower => a2 < n as u128,
    };
    if !positive {
        return false;
    }
    let nb = BigInt::from(n);
    let mut d = match which {
        Endpoint::Upper => Quadratic { p: BigInt::from(a), q: -BigInt::one() },
        Endpoint::Lower => Quadratic { p: -BigInt::from(a), q: BigInt::one() },
    };
    for _ in 0..k {
        d = d.square(&nb);
    }
    // D^(2^k) = C^(2^k) · n^m with C = cm · 2^ce.
    let (cm, cneg_exp) = dyadic_parts(c);
    let power = 1u32 << k;
    let scale = -cneg_exp * power as i64;
    let mut rhs = BigInt::from(BigUint::from(cm).pow(power)) * BigInt::from(n).pow(m as u32);
    if scale >= 0 {
        rhs <<= scale as usize;
    } else {
        let shift = (-scale) as usize;
        d.p <<= shift;
        d.q <<= shift;
    }
    match isqrt_exact(n) {
        Some(r) => d.p + d.q * BigInt::from(r) == rhs,
        None => d.q.is_zero() && d.p == rhs,
    }
}

fn widen(x: &BigFloat, p: usize, up: bool) -> BigFloat {
    // Relative slack of 2^-(p-8) absorbs any last-place error of the
    // transcendental kernels.
    let mut eps = BigFloat::from_word(1, p);
    eps.set_exponent(-(p as i32) + 9);
    let factor = if up {
        BigFloat::from_word(1, p).add(&eps, p, RoundingMode::Up)
    } else {
        BigFloat::from_word(1, p).sub(&eps, p, RoundingMode::Down)
    };
    let rm = if up { RoundingMode::Up } else { RoundingMode::Down };
    x.mul(&factor, p, rm)
}

fn compare_multiprecision(
    a: u64,
    n: u64,
    theta: f64,
    c: f64,
    which: Endpoint,
) -> Result<Ordering> {
    let mut cc = Consts::new().map_err(|_| Error::PrecisionExhausted("constant cache".into()))?;
    let mut p = START_PRECISION_BITS;
    while p <= MAX_PRECISION_BITS {
        let (dn, up) = endpoint_enclosure(n, theta, c, which, p, &mut cc);
        let ab = BigFloat::from_u64(a, p);
        match (ab.cmp(&dn), ab.cmp(&up)) {
            (Some(x), _) if x < 0 => return Ok(Ordering::Less),
            (_, Some(x)) if x > 0 => return Ok(Ordering::Greater),
            _ => {}
        }
        p *= 2;
    }
    Err(Error::PrecisionExhausted(alloc::format!(
        "a = {a} against window of n = {n} (θ = {theta}, C = {c})"
    )))
}

fn endpoint_enclosure(
    n: u64,
    theta: f64,
    c: f64,
    which: Endpoint,
    p: usize,
    cc: &mut Consts,
) -> (BigFloat, BigFloat) {
    use RoundingMode::{Down, Up};
    let nb = BigFloat::from_u64(n, p);
    let s_dn = widen(&nb.sqrt(p, Down), p, false);
    let s_up = widen(&nb.sqrt(p, Up), p, true);
    let th = BigFloat::from_f64(theta, p);
    let cb = BigFloat::from_f64(c, p);
    let e_dn = th.mul(&widen(&nb.ln(p, Down, cc), p, false), p, Down);
    let e_up = th.mul(&widen(&nb.ln(p, Up, cc), p, true), p, Up);
    let w_dn = widen(&e_dn.exp(p, Down, cc), p, false).mul(&cb, p, Down);
    let w_up = widen(&e_up.exp(p, Up, cc), p, true).mul(&cb, p, Up);
    match which {
        Endpoint::Lower => (s_dn.sub(&w_up, p, Down), s_up.sub(&w_dn, p, Up)),
        Endpoint::Upper => (s_dn.add(&w_dn, p, Down), s_up.add(&w_up, p, Up)),
    }
}
