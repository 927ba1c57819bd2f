//! ζ(s), χ(s), the short Dirichlet polynomial `N(s)`, the product counter
//! `Φ(y)` and the discrepancy integral `I_{X,Y}`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::AnalyticConfig;
use crate::quad::midpoints;

/// `s = σ + it`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !(sigma.is_finite() && t.is_finite()) {
            return Err(Error::invalid("s must be finite"));
        }
        Ok(Self { sigma, t })
    }

    pub fn real(sigma: f64) -> Self {
        Self { sigma, t: 0.0 }
    }

    pub fn critical(t: f64) -> Self {
        Self { sigma: 0.5, t }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(s: ComplexPoint) -> Self {
        s.to_complex()
    }
}

/// A ζ value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEval {
    pub value: Complex64,
    pub error_bound: f64,
}

/// `B_{2k}/(2k)!` for `k = 1..=10`.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
];

/// Default number of Bernoulli correction terms.
pub const EM_ORDER: usize = 8;

/// Default cutoff for [`zeta`]: `max(16, ⌈3|t|⌉)`.
pub fn default_terms(t: f64) -> usize {
    libm::ceil(3.0 * libm::fabs(t)).max(16.0) as usize
}

/// `n^{-s}`.
fn n_pow_neg(n: f64, s: Complex64) -> Complex64 {
    let ln = libm::log(n);
    Complex64::from_polar(libm::exp(-s.re * ln), -s.im * ln)
}

/// ζ(s) by Euler–Maclaurin summation with cutoff `terms` and the default
/// number of Bernoulli corrections.
pub fn zeta_em(s: ComplexPoint, terms: usize) -> Result<ZetaEval> {
    zeta_em_order(s, terms, EM_ORDER)
}

/// ζ(s) by Euler–Maclaurin summation:
///
/// `Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2 + Σ_{k=1}^{M} B_{2k}/(2k)! · s(s+1)…(s+2k-2) · N^{-s-2k+1}`.
///
/// The error bound is the first omitted term times `|s+2M+1|/(σ+2M+1)`,
/// valid for `σ > −(2M+1)`, plus an estimate of the floating-point rounding
/// in the direct sum.
pub fn zeta_em_order(s: ComplexPoint, terms: usize, order: usize) -> Result<ZetaEval> {
    if !(s.sigma.is_finite() && s.t.is_finite()) {
        return Err(Error::invalid("s must be finite"));
    }
    if s.sigma == 1.0 && s.t == 0.0 {
        return Err(Error::Pole { sigma: 1.0, t: 0.0 });
    }
    if terms < 10 {
        return Err(Error::invalid("Euler-Maclaurin needs at least 10 terms"));
    }
    if order == 0 || order >= BERNOULLI_OVER_FACTORIAL.len() {
        return Err(Error::invalid("Euler-Maclaurin order must be in 1..=9"));
    }
    let tail_sigma = s.sigma + (2 * order + 1) as f64;
    if tail_sigma <= 0.0 {
        return Err(Error::domain("σ too negative for this Euler-Maclaurin order"));
    }
    let z = s.to_complex();
    let big_n = terms as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for n in 1..terms {
        let v = n_pow_neg(n as f64, z);
        magnitude += v.norm();
        sum += v;
    }
    let n_s = n_pow_neg(big_n, z);
    let integral = n_s * big_n / (z - 1.0);
    magnitude += integral.norm();
    sum += integral;
    sum += n_s * 0.5;

    // poch = s(s+1)…(s+2k−2), power = N^{−s−2k+1}
    let mut poch = z;
    let mut power = n_s / big_n;
    let inv_n2 = 1.0 / (big_n * big_n);
    for (k, coef) in BERNOULLI_OVER_FACTORIAL.iter().take(order).enumerate() {
        sum += poch * power * *coef;
        let j = (2 * k + 1) as f64;
        poch = poch * (z + j) * (z + j + 1.0);
        power *= inv_n2;
    }
    let next = (poch * power * BERNOULLI_OVER_FACTORIAL[order]).norm();
    let truncation = next * (z + (2 * order + 1) as f64).norm() / tail_sigma;
    // Each n^{-s} carries a relative phase error of about |t|·ln n ulps.
    let rounding = (8.0 + 2.0 * libm::fabs(s.t) * libm::log(big_n)) * f64::EPSILON * magnitude;
    let error_bound = truncation + rounding;
    Ok(ZetaEval { value: sum, error_bound })
}

/// ζ(s) with the default cutoff.
pub fn zeta(s: ComplexPoint) -> Result<Complex64> {
    zeta_em(s, default_terms(s.t)).map(|e| e.value)
}

/// `g = 7`, nine-term Lanczos coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Principal branch of `ln Γ(z)` up to a multiple of `2πi` (only `exp` of
/// the result is used). Lanczos approximation on `Re z ≥ 1/2`, reflection
/// below.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(LN_PI, 0.0) - ln_sin(z * PI) - ln_gamma(1.0 - z);
    }
    let z1 = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z1 + i as f64);
    }
    let t = z1 + LANCZOS_G + 0.5;
    (z1 + 0.5) * t.ln() - t + x.ln() + LN_SQRT_2PI
}

/// `ln sin z` without overflow for large `|Im z|`.
fn ln_sin(z: Complex64) -> Complex64 {
    // sin z = (e^{iz} − e^{−iz})/(2i); factor out the dominant exponential.
    let i = Complex64::new(0.0, 1.0);
    if z.im >= 0.0 {
        // dominant: e^{−iz}; sin z = e^{−iz}(e^{2iz} − 1)/(2i)
        -i * z + ((i * z * 2.0).exp() - 1.0).ln() - Complex64::new(core::f64::consts::LN_2, 0.0) - i.ln()
    } else {
        // dominant: e^{iz}; sin z = e^{iz}(1 − e^{−2iz})/(2i)
        i * z + (1.0 - (-i * z * 2.0).exp()).ln() - Complex64::new(core::f64::consts::LN_2, 0.0) - i.ln()
    }
}

/// `ln cos z` without overflow for large `|Im z|`.
fn ln_cos(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if z.im >= 0.0 {
        // cos z = e^{−iz}(1 + e^{2iz})/2
        -i * z + (1.0 + (i * z * 2.0).exp()).ln() - core::f64::consts::LN_2
    } else {
        i * z + (1.0 + (-i * z * 2.0).exp()).ln() - core::f64::consts::LN_2
    }
}

/// χ(s) = (2π)^s / (2 Γ(s) cos(πs/2)), so that ζ(s) = χ(s) ζ(1−s).
///
/// For `Re s ≥ 1/2` the defining expression is evaluated in log space. For
/// `Re s < 1/2` the equivalent form `2^s π^{s−1} sin(πs/2) Γ(1−s)` is used,
/// which has no removable singularities there. Poles are `s = 1, 3, 5, …`.
pub fn chi(s: ComplexPoint) -> Result<Complex64> {
    if !(s.sigma.is_finite() && s.t.is_finite()) {
        return Err(Error::invalid("s must be finite"));
    }
    if s.t == 0.0 && s.sigma >= 1.0 && s.sigma == libm::floor(s.sigma) && (s.sigma as u64) % 2 == 1 {
        return Err(Error::Pole { sigma: s.sigma, t: s.t });
    }
    let z = s.to_complex();
    if s.sigma >= 0.5 {
        let ln = z * LN_2PI - core::f64::consts::LN_2 - ln_gamma(z) - ln_cos(z * (PI / 2.0));
        Ok(ln.exp())
    } else {
        if s.t == 0.0 && s.sigma == libm::floor(s.sigma) && (s.sigma as i64) % 2 == 0 {
            // sin(πs/2) = 0 at even integers ≤ 0
            return Ok(Complex64::new(0.0, 0.0));
        }
        let ln = z * core::f64::consts::LN_2 + (z - 1.0) * LN_PI + ln_sin(z * (PI / 2.0)) + ln_gamma(1.0 - z);
        Ok(ln.exp())
    }
}

/// Number of terms `⌊√(|t|/2π)⌋` in each sum of the approximate functional
/// equation.
pub fn afe_length(t: f64) -> u64 {
    let x = libm::fabs(t) / (2.0 * PI);
    let mut m = libm::floor(libm::sqrt(x)) as u64;
    while ((m + 1) * (m + 1)) as f64 <= x {
        m += 1;
    }
    while m > 0 && (m * m) as f64 > x {
        m -= 1;
    }
    m
}

/// `Σ_{n ≤ m} n^{−1/2−it} + χ(1/2+it) Σ_{n ≤ m} n^{−1/2+it}`, `m = ⌊√(|t|/2π)⌋`.
pub fn zeta_afe(t: f64) -> Result<Complex64> {
    if !t.is_finite() || libm::fabs(t) < 2.0 {
        return Err(Error::domain("approximate functional equation needs |t| ≥ 2"));
    }
    let m = afe_length(t);
    let s = Complex64::new(0.5, t);
    let s_dual = Complex64::new(0.5, -t);
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    for n in 1..=m {
        first += n_pow_neg(n as f64, s);
        second += n_pow_neg(n as f64, s_dual);
    }
    Ok(first + chi(ComplexPoint::critical(t))? * second)
}

/// `|ζ(σ+it)| / ((|t|+2)^{(1−σ)/3} ln|t|)`.
pub fn convexity_ratio(sigma: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&sigma) || !t.is_finite() || libm::fabs(t) < 2.0 {
        return Err(Error::domain("convexity ratio needs 0 ≤ σ ≤ 1 and |t| ≥ 2"));
    }
    let z = zeta(ComplexPoint { sigma, t })?.norm();
    let at = libm::fabs(t);
    Ok(z / (libm::pow(at + 2.0, (1.0 - sigma) / 3.0) * libm::log(at)))
}

/// `N(s) = Σ_{U−L ≤ n ≤ U+L} n^{−s}`.
pub fn dirichlet_n(s: ComplexPoint, cfg: &AnalyticConfig) -> Result<Complex64> {
    dirichlet_n_band(s, cfg.big_u, cfg.big_l)
}

/// [`dirichlet_n`] for a bare band `[U − L, U + L]`.
pub fn dirichlet_n_band(s: ComplexPoint, big_u: f64, big_l: f64) -> Result<Complex64> {
    if !(big_u - big_l >= 0.5) {
        return Err(Error::invalid("N(s) needs U − L ≥ 1/2"));
    }
    let (lo, hi) = crate::params::band_integers(big_u, big_l).ok_or(Error::EmptyWindow {
        lo: big_u - big_l,
        hi: big_u + big_l,
    })?;
    let z = s.to_complex();
    let mut sum = Complex64::new(0.0, 0.0);
    for n in lo..=hi {
        sum += n_pow_neg(n as f64, z);
    }
    Ok(sum)
}

/// Pairs `(n, n′)` with `n ∈ [n_lo, n_hi]`, `n′ ≥ 1` and
/// `y ≤ n·n′ ≤ y + y/V`.
pub fn phi_count_range(y: f64, big_v: f64, n_lo: u64, n_hi: u64) -> u64 {
    if !(y > 0.0) || n_lo > n_hi {
        return 0;
    }
    let top = y + y / big_v;
    let mut count = 0;
    for n in n_lo.max(1)..=n_hi {
        let nf = n as f64;
        let mut k_lo = libm::ceil(y / nf).max(1.0) as u64;
        while k_lo > 1 && ((k_lo - 1) as f64) * nf >= y {
            k_lo -= 1;
        }
        while (k_lo as f64) * nf < y {
            k_lo += 1;
        }
        let mut k_hi = libm::floor(top / nf) as u64;
        while ((k_hi + 1) as f64) * nf <= top {
            k_hi += 1;
        }
        while k_hi > 0 && (k_hi as f64) * nf > top {
            k_hi -= 1;
        }
        if k_hi >= k_lo {
            count += k_hi - k_lo + 1;
        }
    }
    count
}

/// Φ(y): products `n·n′ ∈ [y, y + y/V]` with `n` in the band `[U−L, U+L]`.
pub fn phi_count(y: f64, cfg: &AnalyticConfig) -> u64 {
    match cfg.band_range() {
        Some((lo, hi)) => phi_count_range(y, cfg.big_v, lo, hi),
        None => 0,
    }
}

/// `(y/V)·N(1)`; zero when the band holds no integer.
pub fn main_term(y: f64, cfg: &AnalyticConfig) -> f64 {
    y / cfg.big_v * n_at_one(cfg)
}

fn n_at_one(cfg: &AnalyticConfig) -> f64 {
    match cfg.band_range() {
        Some((lo, hi)) => (lo..=hi).map(|n| 1.0 / n as f64).sum(),
        None => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DiscrepancyMode {
    Quadrature,
    Exact,
}

/// Mean-square discrepancy `(1/Y) ∫_X^{X+Y} |Φ(y) − (y/V)N(1)|² dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscrepancyReport {
    pub i_xy: f64,
    /// `((X/V)·N(1))²`.
    pub main_term_sq: f64,
    pub samples: u64,
    /// Quadrature tolerance (four standard errors of the sample mean); zero
    /// in exact mode.
    pub tolerance: f64,
    pub mode: DiscrepancyMode,
}

fn check_xy(big_x: f64, big_y: f64) -> Result<()> {
    if !(big_x.is_finite() && big_x > 0.0 && big_y.is_finite() && big_y > 0.0) {
        return Err(Error::invalid("discrepancy needs X > 0 and Y > 0"));
    }
    Ok(())
}

/// Midpoint-rule estimate over `samples` equal subintervals.
///
/// Φ is a step function, so this is a sampling proxy rather than a
/// convergent rule of fixed order; the reported tolerance is four standard
/// errors of the sample mean.
pub fn discrepancy(big_x: f64, big_y: f64, cfg: &AnalyticConfig, samples: u64) -> Result<DiscrepancyReport> {
    check_xy(big_x, big_y)?;
    if samples < 2 {
        return Err(Error::invalid("discrepancy needs at least 2 samples"));
    }
    let n1 = n_at_one(cfg);
    let k = n1 / cfg.big_v;
    let band = cfg.band_range();
    let values: Vec<f64> = midpoints(big_x, big_x + big_y, samples as usize)
        .map(|y| {
            let phi = band.map_or(0, |(lo, hi)| phi_count_range(y, cfg.big_v, lo, hi)) as f64;
            let d = phi - k * y;
            d * d
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let scale = big_x / cfg.big_v * n1;
    Ok(DiscrepancyReport {
        i_xy: mean,
        main_term_sq: scale * scale,
        samples,
        tolerance: 4.0 * libm::sqrt(var / n),
        mode: DiscrepancyMode::Quadrature,
    })
}

/// Largest `Y` accepted by [`discrepancy_exact`].
pub const EXACT_MAX_Y: f64 = 1e6;

/// Exact `I_{X,Y}` by sweeping the jump points of Φ.
///
/// A product `p = n·n′` is counted for `y ∈ [p·V/(V+1), p]`, so Φ jumps up
/// at `p·V/(V+1)` and down just after `p`. Between jumps the integrand is
/// `(c − k·y)²` with `k = N(1)/V`, integrated in closed form.
pub fn discrepancy_exact(big_x: f64, big_y: f64, cfg: &AnalyticConfig) -> Result<DiscrepancyReport> {
    check_xy(big_x, big_y)?;
    if big_y > EXACT_MAX_Y {
        return Err(Error::GridTooLarge(alloc::format!(
            "exact discrepancy limited to Y ≤ {EXACT_MAX_Y}, got {big_y}"
        )));
    }
    let n1 = n_at_one(cfg);
    let k = n1 / cfg.big_v;
    let v = cfg.big_v;
    let end = big_x + big_y;
    let shrink = v / (v + 1.0);
    let mut events: Vec<(f64, i64)> = Vec::new();
    let mut current: i64 = 0;
    if let Some((lo, hi)) = cfg.band_range() {
        let p_max = end / shrink;
        for n in lo..=hi {
            let nf = n as f64;
            let first = libm::ceil(big_x / nf).max(1.0) as u64;
            let last = libm::floor(p_max / nf) as u64;
            for m in first..=last {
                let p = nf * m as f64;
                if p < big_x {
                    continue;
                }
                let entry = p * shrink;
                if entry >= end {
                    continue;
                }
                if entry <= big_x {
                    current += 1;
                } else {
                    events.push((entry, 1));
                }
                if p < end {
                    events.push((p, -1));
                }
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let segment = |a: f64, b: f64, c: f64| {
        let da = c - k * a;
        let db = c - k * b;
        (b - a) * (da * da + da * db + db * db) / 3.0
    };
    let mut total = 0.0;
    let mut pos = big_x;
    for (at, delta) in events {
        if at > pos {
            total += segment(pos, at, current as f64);
            pos = at;
        }
        current += delta;
    }
    total += segment(pos, end, current as f64);
    let scale = big_x / cfg.big_v * n1;
    Ok(DiscrepancyReport {
        i_xy: total / big_y,
        main_term_sq: scale * scale,
        samples: 0,
        tolerance: 0.0,
        mode: DiscrepancyMode::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, re: f64, im: f64, tol: f64) -> bool {
        (a - Complex64::new(re, im)).norm() <= tol * (1.0 + Complex64::new(re, im).norm())
    }

    #[test]
    fn zeta_classical_values() {
        let z2 = zeta_em(ComplexPoint::real(2.0), 20).unwrap();
        assert!((z2.value.re - PI * PI / 6.0).abs() < 1e-13);
        assert!(z2.error_bound < 1e-13);
        let z0 = zeta(ComplexPoint::real(0.0)).unwrap();
        assert!((z0.re + 0.5).abs() < 1e-14 && z0.im.abs() < 1e-14);
        let zh = zeta(ComplexPoint::real(0.5)).unwrap();
        assert!((zh.re + 1.460_354_508_809_586_8).abs() < 1e-13);
    }

    #[test]
    fn zeta_against_mpmath() {
        // Reference values from mpmath at 30 digits.
        let cases = [
            (0.5, 50.0, -0.081_712_108_320_979_975, 0.330_792_194_038_661_3),
            (0.7, 1000.0, 0.784_054_443_103_688_65, 0.374_828_892_328_902_96),
            (-0.5, 3.0, 0.352_913_879_819_287_25, 0.012_124_954_416_036_982),
            (1.0, 100.0, 1.632_833_506_686_711_9, -0.068_131_203_841_812_49),
            (0.0, 100.0, 6.517_210_426_253_010_4, 0.181_288_425_337_917_36),
        ];
        for (sigma, t, re, im) in cases {
            let z = zeta(ComplexPoint { sigma, t }).unwrap();
            assert!(close(z, re, im, 1e-11), "ζ({sigma}+{t}i) = {z}");
        }
        let zero = zeta(ComplexPoint::critical(14.134_725_141_734_694)).unwrap();
        assert!(zero.norm() < 1e-12);
    }

    #[test]
    fn zeta_pole_and_arguments() {
        assert!(matches!(zeta_em(ComplexPoint::real(1.0), 20), Err(Error::Pole { .. })));
        assert!(zeta_em(ComplexPoint::real(2.0), 9).is_err());
        assert!(zeta_em(ComplexPoint::critical(10.0), 10).is_ok());
    }

    #[test]
    fn error_bound_shrinks_with_terms() {
        let s = ComplexPoint::critical(30.0);
        let a = zeta_em(s, 15).unwrap();
        let b = zeta_em(s, 30).unwrap();
        assert!(b.error_bound < a.error_bound);
        assert!((a.value - b.value).norm() <= a.error_bound + b.error_bound);
    }

    #[test]
    fn ln_gamma_against_mpmath() {
        let cases = [
            (0.5, 1000.0, -1569.877_388_261_691_9, 5907.755_320_648_806),
            (3.0, 4.0, -1.756_626_784_603_784_1, 4.742_664_438_034_658),
            (0.1, 0.2, 1.419_622_556_608_801_5, -1.189_458_456_191_653_5),
        ];
        for (re, im, want_re, want_im) in cases {
            let g = ln_gamma(Complex64::new(re, im));
            assert!((g.re - want_re).abs() < 1e-9 * (1.0 + want_re.abs()), "{g}");
            // Imaginary part only matters modulo 2π.
            let d = (g.im - want_im) / (2.0 * PI);
            assert!((d - libm::round(d)).abs() < 1e-10, "{g}");
        }
        let g = ln_gamma(Complex64::new(-2.5, 1.0));
        assert!((g.re + 2.344_190_652_465_592_6).abs() < 1e-12);
    }

    #[test]
    fn chi_values() {
        let c = chi(ComplexPoint::critical(0.0)).unwrap();
        assert!(close(c, 1.0, 0.0, 1e-14));
        let cases = [
            (0.3, 5.0, 0.766_019_517_618_818_86, 0.570_415_961_917_553_86),
            (0.5, 100.0, 0.999_885_364_189_613_88, -0.015_141_283_941_701_319),
            (2.0, 3.0, 2.868_270_521_199_586_6, 0.200_075_662_717_535_3),
            (0.5, 1e4, 0.976_391_667_222_279_37, 0.216_007_666_944_712_08),
            (-1.5, 7.0, 0.663_404_100_271_117_35, 1.085_998_987_988_987_7),
            (0.25, -40.0, -0.420_981_232_612_927_34, 1.531_627_461_739_684_5),
        ];
        for (sigma, t, re, im) in cases {
            let c = chi(ComplexPoint { sigma, t }).unwrap();
            assert!(close(c, re, im, 1e-10), "χ({sigma}+{t}i) = {c}");
        }
        let s = ComplexPoint { sigma: 0.3, t: 5.0 };
        let prod = chi(s).unwrap() * chi(ComplexPoint { sigma: 0.7, t: -5.0 }).unwrap();
        assert!(close(prod, 1.0, 0.0, 1e-12));
        assert!(matches!(chi(ComplexPoint::real(3.0)), Err(Error::Pole { .. })));
        assert_eq!(chi(ComplexPoint::real(-2.0)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn chi_unit_modulus_on_critical_line() {
        for t in [2.0, 10.0, 100.0, 1000.0, 1e4, -333.3] {
            let c = chi(ComplexPoint::critical(t)).unwrap();
            assert!((c.norm() - 1.0).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn afe_examples() {
        let t = 2.0 * PI;
        assert_eq!(afe_length(t), 1);
        let v = zeta_afe(t).unwrap();
        assert!(close(v, 1.711_787_287_111_652_4, 0.702_395_086_761_171_8, 1e-12));
        let v = zeta_afe(50.0).unwrap();
        assert!(close(v, 0.001_275_795_634_588_679_4, -0.005_164_757_656_879_341_3, 1e-10));
        let w = zeta_afe(-50.0).unwrap();
        assert!((w - v.conj()).norm() < 1e-15);
        assert!(zeta_afe(1.5).is_err());
    }

    #[test]
    fn conjugate_symmetry() {
        for t in [3.0, 40.0, 700.0] {
            let a = zeta(ComplexPoint { sigma: 0.3, t }).unwrap();
            let b = zeta(ComplexPoint { sigma: 0.3, t: -t }).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn convexity() {
        assert!(convexity_ratio(1.0, 100.0).unwrap() < 1.0);
        assert!(convexity_ratio(1.5, 100.0).is_err());
        assert!(convexity_ratio(0.5, 1.0).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        let cfg = AnalyticConfig::band(100.0, 10.0, 10.0).unwrap();
        assert_eq!(dirichlet_n(ComplexPoint::real(0.0), &cfg).unwrap().re, 21.0);
        let v = dirichlet_n(ComplexPoint::real(1.0), &cfg).unwrap().re;
        assert!((v - 0.210_775_106_506_573_14).abs() < 1e-15);
        let v = dirichlet_n_band(ComplexPoint::real(2.0), 2.0, 1.0).unwrap().re;
        assert!((v - 49.0 / 36.0).abs() < 1e-15);
        assert!(matches!(
            dirichlet_n_band(ComplexPoint::real(1.0), 10.6, 0.2),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn phi_examples() {
        let cfg = AnalyticConfig::band(10.0, 2.0, 10.0).unwrap();
        assert_eq!(phi_count(100.0, &cfg), 6);
        // exhaustive listing
        let mut pairs = Vec::new();
        for n in 8u64..=12 {
            for m in 1u64..=20 {
                let p = (n * m) as f64;
                if (100.0..=110.0).contains(&p) {
                    pairs.push((n, m));
                }
            }
        }
        assert_eq!(pairs, [(8, 13), (9, 12), (10, 10), (10, 11), (11, 10), (12, 9)]);
        let cfg = AnalyticConfig::band(10.0, 0.0, 1000.0).unwrap();
        assert_eq!(phi_count(100.5, &cfg), 0);
        assert_eq!(phi_count(-1.0, &cfg), 0);
    }

    #[test]
    fn main_term_examples() {
        let cfg = AnalyticConfig::band(10.0, 2.0, 10.0).unwrap();
        let m = main_term(100.0, &cfg);
        assert!((m - 5.103_535_353_535_353_5).abs() < 1e-13);
        assert!((main_term(200.0, &cfg) - 2.0 * m).abs() < 1e-13);
        let wide = AnalyticConfig::band(10.0, 2.0, 1e300).unwrap();
        assert!(main_term(100.0, &wide) < 1e-290);
    }

    #[test]
    fn discrepancy_phi_vanishes() {
        // Interval [y, y(1 + 1e-12)] never contains a product at these y.
        let cfg = AnalyticConfig::band(1000.0, 0.0, 1e12).unwrap();
        let r = discrepancy(1e6 + 0.25, 0.5, &cfg, 64).unwrap();
        let k: f64 = 1e-3 / 1e12;
        let expect = (k * (1e6 + 0.5)).powi(2);
        assert!((r.i_xy - expect).abs() < 1e-6 * expect);
        let e = discrepancy_exact(1e6 + 0.25, 0.5, &cfg).unwrap();
        assert!((e.i_xy - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn exact_matches_quadrature() {
        let cfg = AnalyticConfig::band(50.0, 10.0, 20.0).unwrap();
        let exact = discrepancy_exact(1e4, 2e3, &cfg).unwrap();
        let q = discrepancy(1e4, 2e3, &cfg, 20_000).unwrap();
        assert!((exact.i_xy - q.i_xy).abs() <= q.tolerance, "{exact:?} {q:?}");
        assert!(discrepancy_exact(1e4, 2e6, &cfg).unwrap_err().is_infeasible());
    }

    #[test]
    fn exact_brute_force_small() {
        // Fine midpoint grid of the step function with the linear part
        // integrated exactly on each cell agrees closely with the sweep.
        let cfg = AnalyticConfig::band(6.0, 2.0, 4.0).unwrap();
        let (x, y) = (50.0, 30.0);
        let exact = discrepancy_exact(x, y, &cfg).unwrap();
        let q = discrepancy(x, y, &cfg, 600_000).unwrap();
        assert!((exact.i_xy - q.i_xy).abs() < 1e-3 * exact.i_xy, "{} {}", exact.i_xy, q.i_xy);
    }
}
