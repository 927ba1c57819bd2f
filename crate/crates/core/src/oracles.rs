//! Brute-force left-hand sides of the four lemmas and the mean value check,
//! each paired with its stated bound (implied constant 1).
//!
//! The ratio `lhs/bound` is what gets reported; the lemmas only promise that
//! it stays bounded, so no ratio is asserted to be at most 1.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use hashbrown::HashMap;

use crate::analytic::{dirichlet_n_band, zeta, zeta_em, ComplexPoint};
use crate::error::{Error, Result};
use crate::params::{band_integers, choose_parameters, AlmostSquareParams};
use crate::quad::{midpoints, nonneg_simpson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Lemma {
    #[cfg_attr(feature = "serde", serde(rename = "1"))]
    Diagonal,
    #[cfg_attr(feature = "serde", serde(rename = "2"))]
    OffDiagonal,
    #[cfg_attr(feature = "serde", serde(rename = "3"))]
    SecondMoment,
    #[cfg_attr(feature = "serde", serde(rename = "4"))]
    Perron,
    #[cfg_attr(feature = "serde", serde(rename = "mv"))]
    MeanValue,
}

impl Lemma {
    pub const ALL: [Lemma; 5] = [
        Lemma::Diagonal,
        Lemma::OffDiagonal,
        Lemma::SecondMoment,
        Lemma::Perron,
        Lemma::MeanValue,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Lemma::Diagonal => "1",
            Lemma::OffDiagonal => "2",
            Lemma::SecondMoment => "3",
            Lemma::Perron => "4",
            Lemma::MeanValue => "mv",
        }
    }

    pub fn parse(s: &str) -> Option<Lemma> {
        Lemma::ALL.into_iter().find(|l| l.label() == s)
    }
}

/// Parameters of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum GridPoint {
    /// `n₁ ∈ [N₁, 2N₁)`, `n₂ ∈ [N₂, 2N₂)`, `m₁, m₂ ∈ [U−L, U+L]`.
    Sum { n1: u64, n2: u64, u: f64, l: f64 },
    /// Integral over `[1, t]` on the node grid `1 + j·step`.
    Moment { t: f64, u: f64, l: f64, step: f64 },
    Perron { x: f64, y: f64, a: f64, t: f64, u: f64, l: f64, samples: u64 },
}

impl GridPoint {
    /// `key=value` pairs joined by `;`, for tables.
    pub fn describe(&self) -> String {
        match *self {
            GridPoint::Sum { n1, n2, u, l } => format!("N1={n1};N2={n2};U={u};L={l}"),
            GridPoint::Moment { t, u, l, step } => format!("T={t};U={u};L={l};step={step}"),
            GridPoint::Perron { x, y, a, t, u, l, samples } => {
                format!("X={x};Y={y};a={a};T={t};U={u};L={l};samples={samples}")
            }
        }
    }
}

/// A computed left-hand side against its bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub lemma: Lemma,
    pub grid_point: GridPoint,
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    /// The individual terms of the bound; may include terms not counted in
    /// `bound` (see [`second_moment_bound`]).
    pub terms: Vec<f64>,
}

impl BoundReport {
    fn new(lemma: Lemma, grid_point: GridPoint, lhs: f64, bound: f64, terms: Vec<f64>) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::domain(format!("bound {bound} is not positive at {}", grid_point.describe())));
        }
        Ok(Self { lemma, grid_point, lhs, bound, ratio: lhs / bound, terms })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumStrategy {
    /// Group products `n·m` by value and match the groups.
    Hashing,
    /// Loop over all quadruples.
    Exhaustive,
}

/// Limit on `|A₁| + |A₂|` (product lists) for hashing.
pub const HASH_LIMIT: u64 = 50_000_000;
/// Limit on `|A₁|·|A₂|` (candidate pairs) for the exhaustive S₁ loop.
pub const PAIR_LIMIT: u64 = 1_000_000_000;
/// Limit on candidate pairs for exhaustive S₂, which stores every distinct
/// product pair.
pub const S2_EXHAUSTIVE_LIMIT: u64 = 4_000_000;

struct SumShape {
    n1: (u64, u64),
    n2: (u64, u64),
    m: Option<(u64, u64)>,
}

impl SumShape {
    fn new(n1: u64, n2: u64, big_u: f64, big_l: f64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::invalid("N₁ and N₂ must be positive"));
        }
        if !(big_l > 0.0 && big_l <= big_u / 2.0 && big_u.is_finite()) {
            return Err(Error::invalid("need 0 < L ≤ U/2"));
        }
        let n1_hi = n1.checked_mul(2).ok_or_else(|| Error::Range("2N₁ overflows".into()))?;
        let n2_hi = n2.checked_mul(2).ok_or_else(|| Error::Range("2N₂ overflows".into()))?;
        let m = band_integers(big_u, big_l);
        if let Some((_, m_hi)) = m {
            let top = n1_hi.max(n2_hi) as u128 * m_hi as u128;
            if top > u64::MAX as u128 {
                return Err(Error::Range("products exceed 64 bits".into()));
            }
        }
        Ok(Self { n1: (n1, n1_hi - 1), n2: (n2, n2_hi - 1), m })
    }

    fn m_len(&self) -> u64 {
        self.m.map_or(0, |(lo, hi)| hi - lo + 1)
    }

    fn sizes(&self) -> (u64, u64) {
        let m = self.m_len();
        let a1 = (self.n1.1 - self.n1.0 + 1).saturating_mul(m);
        let a2 = (self.n2.1 - self.n2.0 + 1).saturating_mul(m);
        (a1, a2)
    }

    fn products(&self, n: (u64, u64)) -> impl Iterator<Item = u64> + '_ {
        let (m_lo, m_hi) = self.m.unwrap_or((1, 0));
        (n.0..=n.1).flat_map(move |a| (m_lo..=m_hi).map(move |b| a * b))
    }

    /// Distinct products with multiplicities, ascending.
    fn grouped(&self, n: (u64, u64)) -> Vec<(u64, u64)> {
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for p in self.products(n) {
            *counts.entry(p).or_insert(0) += 1;
        }
        let mut out: Vec<(u64, u64)> = counts.into_iter().collect();
        out.sort_unstable();
        out
    }
}

fn too_large(what: &str, size: u64, limit: u64) -> Error {
    Error::GridTooLarge(format!("{what}: {size} exceeds {limit}"))
}

/// `S₁ = Σ 1/√(n₁n₂m₁m₂)` over `n₁m₁ = n₂m₂`, by hashing.
pub fn s1_sum(n1: u64, n2: u64, big_u: f64, big_l: f64) -> Result<f64> {
    s1_sum_with(n1, n2, big_u, big_l, SumStrategy::Hashing)
}

/// `S₁` by the chosen strategy. Both strategies build the same map from
/// each common product `P` to its number of quadruples and sum `count/P` in
/// ascending `P`, so they agree bit for bit.
pub fn s1_sum_with(n1: u64, n2: u64, big_u: f64, big_l: f64, strategy: SumStrategy) -> Result<f64> {
    let shape = SumShape::new(n1, n2, big_u, big_l)?;
    let (a1, a2) = shape.sizes();
    let weights: Vec<(u64, u64)> = match strategy {
        SumStrategy::Hashing => {
            let size = a1.saturating_add(a2);
            if size > HASH_LIMIT {
                return Err(too_large("S₁ product lists", size, HASH_LIMIT));
            }
            let g1 = shape.grouped(shape.n1);
            let g2: HashMap<u64, u64> = shape.grouped(shape.n2).into_iter().collect();
            g1.into_iter()
                .filter_map(|(p, c1)| g2.get(&p).map(|c2| (p, c1 * c2)))
                .collect()
        }
        SumStrategy::Exhaustive => {
            let pairs = a1.saturating_mul(a2);
            if pairs > PAIR_LIMIT {
                return Err(too_large("S₁ candidate pairs", pairs, PAIR_LIMIT));
            }
            let second: Vec<u64> = shape.products(shape.n2).collect();
            let mut map: BTreeMap<u64, u64> = BTreeMap::new();
            for p in shape.products(shape.n1) {
                for &q in &second {
                    if p == q {
                        *map.entry(p).or_insert(0) += 1;
                    }
                }
            }
            map.into_iter().collect()
        }
    };
    Ok(weights.iter().fold(0.0, |acc, &(p, c)| acc + c as f64 / p as f64))
}

/// `((L + U^{1/2})/U)·ln²(N₁N₂U)`.
pub fn s1_bound(n1: u64, n2: u64, big_u: f64, big_l: f64) -> f64 {
    let ln = libm::log(n1 as f64 * n2 as f64 * big_u);
    (big_l + libm::sqrt(big_u)) / big_u * ln * ln
}

/// `1/(√(PQ)·|ln(Q/P)|)` with the logarithm taken as `ln(1 + (big−small)/small)`.
fn s2_term(p: u64, q: u64) -> f64 {
    let (small, big) = if p < q { (p, q) } else { (q, p) };
    let ln = libm::log1p((big - small) as f64 / small as f64);
    1.0 / (libm::sqrt(p as f64 * q as f64) * ln)
}

/// `S₂ = Σ 1/(√(n₁n₂m₁m₂)·|ln(n₂m₂/(n₁m₁))|)` over `n₁m₁ ≠ n₂m₂`, grouped by
/// distinct products.
pub fn s2_sum(n1: u64, n2: u64, big_u: f64, big_l: f64) -> Result<f64> {
    s2_sum_with(n1, n2, big_u, big_l, SumStrategy::Hashing)
}

/// `S₂` by the chosen strategy; both sum `count·term(P, Q)` over distinct
/// pairs `P ≠ Q` in lexicographic order.
pub fn s2_sum_with(n1: u64, n2: u64, big_u: f64, big_l: f64, strategy: SumStrategy) -> Result<f64> {
    let shape = SumShape::new(n1, n2, big_u, big_l)?;
    let (a1, a2) = shape.sizes();
    match strategy {
        SumStrategy::Hashing => {
            let size = a1.saturating_add(a2);
            if size > HASH_LIMIT {
                return Err(too_large("S₂ product lists", size, HASH_LIMIT));
            }
            let g1 = shape.grouped(shape.n1);
            let g2 = shape.grouped(shape.n2);
            let pairs = (g1.len() as u64).saturating_mul(g2.len() as u64);
            if pairs > PAIR_LIMIT {
                return Err(too_large("S₂ distinct product pairs", pairs, PAIR_LIMIT));
            }
            let mut total = 0.0;
            for &(p, c1) in &g1 {
                for &(q, c2) in &g2 {
                    if p != q {
                        total += (c1 * c2) as f64 * s2_term(p, q);
                    }
                }
            }
            Ok(total)
        }
        SumStrategy::Exhaustive => {
            let pairs = a1.saturating_mul(a2);
            if pairs > S2_EXHAUSTIVE_LIMIT {
                return Err(too_large("S₂ candidate pairs", pairs, S2_EXHAUSTIVE_LIMIT));
            }
            let second: Vec<u64> = shape.products(shape.n2).collect();
            let mut map: BTreeMap<(u64, u64), u64> = BTreeMap::new();
            for p in shape.products(shape.n1) {
                for &q in &second {
                    if p != q {
                        *map.entry((p, q)).or_insert(0) += 1;
                    }
                }
            }
            Ok(map.into_iter().fold(0.0, |acc, ((p, q), c)| acc + c as f64 * s2_term(p, q)))
        }
    }
}

/// `(N₁^{1/2}N₂^{1/2}L²/U)·ln(N₁N₂U) + (N₁N₂L²/U²)·ln(N₁N₂U)`, as its two terms.
pub fn s2_bound_terms(n1: u64, n2: u64, big_u: f64, big_l: f64) -> [f64; 2] {
    let nn = n1 as f64 * n2 as f64;
    let ln = libm::log(nn * big_u);
    let l2 = big_l * big_l;
    [libm::sqrt(nn) * l2 / big_u * ln, nn * l2 / (big_u * big_u) * ln]
}

/// Largest node spacing that resolves `|ζN(1/2+it)|²` on `[1, T]`:
/// `π/(ln(U+L) + max(0, ln√(T/2π)))`.
pub fn max_step(big_t: f64, big_u: f64, big_l: f64) -> f64 {
    let zeta_freq = (0.5 * libm::log(big_t / (2.0 * PI))).max(0.0);
    PI / (libm::log(big_u + big_l).max(f64::MIN_POSITIVE) + zeta_freq)
}

fn check_moment(big_t: f64, big_u: f64, big_l: f64, step: f64) -> Result<()> {
    if !(big_t.is_finite() && big_t >= 1.0) {
        return Err(Error::invalid("T must be at least 1"));
    }
    if !(big_l >= 0.0 && big_u - big_l >= 0.5 && big_u.is_finite()) {
        return Err(Error::invalid("need L ≥ 0 and U − L ≥ 1/2"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("step must be positive"));
    }
    let max = max_step(big_t, big_u, big_l);
    if step > max {
        return Err(Error::Resolution { step, max });
    }
    Ok(())
}

/// `I(T) = ∫₁^T |ζ(1/2+it)·N(1/2+it)|² dt` by positivity-preserving Simpson
/// on the nodes `1 + j·step`, hence non-decreasing in `T`.
pub fn second_moment(big_t: f64, big_u: f64, big_l: f64, step: f64) -> Result<f64> {
    check_moment(big_t, big_u, big_l, step)?;
    if big_t == 1.0 {
        return Ok(0.0);
    }
    dirichlet_n_band(ComplexPoint::critical(1.0), big_u, big_l)?;
    let mut failure = None;
    let value = nonneg_simpson(
        |t| {
            let s = ComplexPoint::critical(t);
            match (zeta(s), dirichlet_n_band(s, big_u, big_l)) {
                (Ok(z), Ok(n)) => (z * n).norm_sqr(),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        1.0,
        big_t,
        step,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `[(TL/U)·ln²(TU), (T^{1/2}L²/U)·ln(TU), (TL²/U²)·ln(TU)]`. The stated
/// bound is the sum of the first two; the third appears in the estimate of
/// the diagonal part and is reported alongside.
pub fn second_moment_bound(big_t: f64, big_u: f64, big_l: f64) -> [f64; 3] {
    let ln = libm::log(big_t * big_u);
    [
        big_t * big_l / big_u * ln * ln,
        libm::sqrt(big_t) * big_l * big_l / big_u * ln,
        big_t * big_l * big_l / (big_u * big_u) * ln,
    ]
}

/// `I(u) = ∫₁^u |N(1/2+it)|² dt`, same quadrature as [`second_moment`].
pub fn mv_mean_value(u: f64, big_u: f64, big_l: f64, step: f64) -> Result<f64> {
    check_moment(u, big_u, big_l, step)?;
    if u == 1.0 {
        return Ok(0.0);
    }
    let (lo, hi) = band_integers(big_u, big_l).ok_or(Error::EmptyWindow {
        lo: big_u - big_l,
        hi: big_u + big_l,
    })?;
    let logs: Vec<(f64, f64)> = (lo..=hi)
        .map(|n| {
            let nf = n as f64;
            (libm::log(nf), 1.0 / libm::sqrt(nf))
        })
        .collect();
    Ok(nonneg_simpson(
        |t| {
            let (mut re, mut im) = (0.0, 0.0);
            for &(ln, w) in &logs {
                let (sin, cos) = libm::sincos(t * ln);
                re += w * cos;
                im -= w * sin;
            }
            re * re + im * im
        },
        1.0,
        u,
        step,
    ))
}

/// `u·L/U + L`.
pub fn mv_bound(u: f64, big_u: f64, big_l: f64) -> f64 {
    u * big_l / big_u + big_l
}

/// The truncation error majorant of Perron's formula at `x` for
/// `a_n = #{m | n : U−L ≤ m ≤ U+L}`:
///
/// `Σ_{x/2 < n < 2x, n ≠ x} a_n min(1, x/(T|x−n|)) + ((4x)^c/T)·Σ_m m^{−c}·ζ(c)`,
/// `c = 1 + 1/ln x`.
pub fn perron_majorant(x: f64, big_t: f64, big_u: f64, big_l: f64) -> Result<f64> {
    Ok(perron_near_sum(x, big_t, big_u, big_l)? + perron_tail(x, big_t, big_u, big_l)?)
}

fn check_perron(x: f64, big_t: f64) -> Result<()> {
    if !(x.is_finite() && x > 2.0) {
        return Err(Error::invalid("Perron majorant needs x > 2"));
    }
    if !(big_t.is_finite() && big_t >= 1.0) {
        return Err(Error::invalid("Perron majorant needs T ≥ 1"));
    }
    Ok(())
}

/// First sum of [`perron_majorant`], sieving multiples of each `m` in the
/// band.
pub fn perron_near_sum(x: f64, big_t: f64, big_u: f64, big_l: f64) -> Result<f64> {
    check_perron(x, big_t)?;
    let Some((m_lo, m_hi)) = band_integers(big_u, big_l) else {
        return Ok(0.0);
    };
    let lo = x / 2.0;
    let hi = 2.0 * x;
    let mut total = 0.0;
    for m in m_lo..=m_hi {
        let mf = m as f64;
        let mut k = libm::floor(lo / mf) as u64 + 1;
        loop {
            let n = (k * m) as f64;
            if n >= hi {
                break;
            }
            if n > lo && n != x {
                total += (x / (big_t * libm::fabs(x - n))).min(1.0);
            }
            k += 1;
        }
    }
    Ok(total)
}

/// Tail term of [`perron_majorant`].
pub fn perron_tail(x: f64, big_t: f64, big_u: f64, big_l: f64) -> Result<f64> {
    check_perron(x, big_t)?;
    let Some((m_lo, m_hi)) = band_integers(big_u, big_l) else {
        return Ok(0.0);
    };
    let c = 1.0 + 1.0 / libm::log(x);
    let dirichlet: f64 = (m_lo..=m_hi).map(|m| libm::pow(m as f64, -c)).sum();
    let zeta_c = zeta_em(ComplexPoint::real(c), 64)?.value.re;
    Ok(libm::pow(4.0 * x, c) / big_t * dirichlet * zeta_c)
}

/// Mean of `R_{ay}²` over `samples` midpoints `y` of `[X, X+Y]`.
#[allow(clippy::too_many_arguments)]
pub fn perron_mean_square(
    big_x: f64,
    big_y: f64,
    a: f64,
    big_t: f64,
    big_u: f64,
    big_l: f64,
    samples: u64,
) -> Result<f64> {
    if !(1.0..=2.0).contains(&a) {
        return Err(Error::invalid("need 1 ≤ a ≤ 2"));
    }
    if !(big_y > 0.0 && big_y <= big_x && big_t >= 1.0) {
        return Err(Error::invalid("need 0 < Y ≤ X and T ≥ 1"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let mut total = 0.0;
    for y in midpoints(big_x, big_x + big_y, samples as usize) {
        let r = perron_majorant(a * y, big_t, big_u, big_l)?;
        total += r * r;
    }
    Ok(total / samples as f64)
}

/// `[(L²X²/(U²T²))·ln²X, (XL²/(TY))·ln²X]`.
pub fn perron_bound_terms(big_x: f64, big_y: f64, big_t: f64, big_u: f64, big_l: f64) -> [f64; 2] {
    let ln2 = libm::log(big_x) * libm::log(big_x);
    let l2 = big_l * big_l;
    [
        l2 * big_x * big_x / (big_u * big_u * big_t * big_t) * ln2,
        big_x * l2 / (big_t * big_y) * ln2,
    ]
}

/// The four-term bound on the exceptional measure at scale `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasureBound {
    pub big_x: f64,
    pub big_y: f64,
    /// `T(U/L)ln³X`, `T^{1/2}U ln²X`, `(YV²/T²)ln²X`, `(V²U²/(XT))ln²X`.
    pub terms: [f64; 4],
    pub total: f64,
    /// `total / Y`.
    pub fraction: f64,
    /// The bound says nothing at this scale (`fraction ≥ 1`).
    pub vacuous: bool,
}

pub fn measure_bound(big_x: f64, params: &AlmostSquareParams, eps: f64) -> Result<MeasureBound> {
    let choice = choose_parameters(big_x, params, eps)?;
    let cfg = choice.config;
    let ln = libm::log(big_x);
    let (t, u, l, v, y) = (cfg.big_t, cfg.big_u, cfg.big_l, cfg.big_v, choice.big_y);
    let terms = [
        t * (u / l) * ln * ln * ln,
        libm::sqrt(t) * u * ln * ln,
        y * v * v / (t * t) * ln * ln,
        v * v * u * u / (big_x * t) * ln * ln,
    ];
    let total: f64 = terms.iter().sum();
    let fraction = total / y;
    Ok(MeasureBound { big_x, big_y: y, terms, total, fraction, vacuous: fraction >= 1.0 })
}

/// Grid of evaluation points. For the sum lemmas `n1_ranges`/`n2_ranges`
/// hold the `N` of each dyadic range `[N, 2N)`; `t_values` are the
/// integration heights (or `u` for the mean value check). The Perron grid
/// also uses `x_values`, `y_values`, `a_values` and `samples`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct LemmaGrid {
    #[cfg_attr(feature = "serde", serde(default))]
    pub n1_ranges: Vec<u64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub n2_ranges: Vec<u64>,
    pub u_values: Vec<f64>,
    pub l_values: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub t_values: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default = "default_beta"))]
    pub beta: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub x_values: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub y_values: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub a_values: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default = "default_samples"))]
    pub samples: u64,
    /// Quadrature step as a fraction of [`max_step`].
    #[cfg_attr(feature = "serde", serde(default = "default_step_fraction"))]
    pub step_fraction: f64,
}

#[cfg(feature = "serde")]
fn default_beta() -> f64 {
    0.4
}

#[cfg(feature = "serde")]
fn default_samples() -> u64 {
    50
}

#[cfg(feature = "serde")]
fn default_step_fraction() -> f64 {
    0.5
}

impl LemmaGrid {
    fn empty() -> Self {
        Self {
            n1_ranges: Vec::new(),
            n2_ranges: Vec::new(),
            u_values: Vec::new(),
            l_values: Vec::new(),
            t_values: Vec::new(),
            beta: 0.4,
            x_values: Vec::new(),
            y_values: Vec::new(),
            a_values: Vec::new(),
            samples: 50,
            step_fraction: 0.5,
        }
    }

    /// The shipped default grid for a lemma.
    pub fn default_for(lemma: Lemma) -> Self {
        let v = |xs: &[f64]| xs.to_vec();
        match lemma {
            Lemma::Diagonal => Self {
                n1_ranges: alloc::vec![4, 16, 64, 256],
                n2_ranges: alloc::vec![4, 16, 64, 256],
                u_values: v(&[32.0, 128.0, 512.0]),
                l_values: v(&[4.0, 16.0, 64.0, 256.0]),
                ..Self::empty()
            },
            Lemma::OffDiagonal => Self {
                n1_ranges: alloc::vec![2, 8, 32],
                n2_ranges: alloc::vec![2, 8, 32],
                u_values: v(&[32.0, 128.0]),
                l_values: v(&[8.0, 16.0, 32.0, 64.0]),
                beta: 0.4,
                ..Self::empty()
            },
            Lemma::SecondMoment => Self {
                u_values: v(&[16.0, 64.0]),
                l_values: v(&[8.0, 16.0, 32.0]),
                t_values: v(&[50.0, 200.0, 800.0]),
                beta: 0.5,
                ..Self::empty()
            },
            Lemma::Perron => Self {
                u_values: v(&[100.0, 300.0]),
                l_values: v(&[10.0, 30.0, 100.0]),
                t_values: v(&[100.0, 1000.0]),
                x_values: v(&[1e4, 1e5]),
                y_values: v(&[100.0, 1000.0]),
                a_values: v(&[1.0, 2.0]),
                samples: 50,
                ..Self::empty()
            },
            Lemma::MeanValue => Self {
                u_values: v(&[100.0, 1000.0]),
                l_values: v(&[10.0, 50.0, 250.0]),
                t_values: v(&[100.0, 1000.0]),
                ..Self::empty()
            },
        }
    }

    /// Whether `(U, L)` meets the lemma's hypothesis on the window width.
    pub fn admissible(&self, lemma: Lemma, big_u: f64, big_l: f64) -> bool {
        let half = big_l <= big_u / 2.0;
        match lemma {
            Lemma::Diagonal => big_l > 0.0 && half,
            Lemma::OffDiagonal | Lemma::SecondMoment => big_l > libm::pow(big_u, self.beta) && half,
            Lemma::Perron | Lemma::MeanValue => big_l >= 0.0 && half,
        }
    }

    fn check_beta(&self, lemma: Lemma) -> Result<()> {
        let ok = match lemma {
            Lemma::OffDiagonal => self.beta > 0.0 && self.beta < 0.5,
            Lemma::SecondMoment => (0.5..=1.0).contains(&self.beta),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("β = {} outside the range of lemma {}", self.beta, lemma.label())))
        }
    }

    fn bands(&self, lemma: Lemma) -> Result<Vec<(f64, f64)>> {
        self.check_beta(lemma)?;
        let mut out = Vec::new();
        for &l in &self.l_values {
            let mut used = false;
            for &u in &self.u_values {
                if self.admissible(lemma, u, l) {
                    out.push((u, l));
                    used = true;
                }
            }
            if !used {
                return Err(Error::invalid(format!(
                    "L = {l} meets the hypothesis of lemma {} for no U",
                    lemma.label()
                )));
            }
        }
        // Order by U, then L, as listed.
        let pos = |v: f64, list: &[f64]| list.iter().position(|&x| x == v).unwrap_or(0);
        out.sort_by_key(|&(u, l)| (pos(u, &self.u_values), pos(l, &self.l_values)));
        Ok(out)
    }

    /// The evaluation points for `lemma`, in grid order.
    pub fn points(&self, lemma: Lemma) -> Result<Vec<GridPoint>> {
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(Error::invalid("step_fraction must be in (0, 1]"));
        }
        let bands = self.bands(lemma)?;
        let mut out = Vec::new();
        match lemma {
            Lemma::Diagonal | Lemma::OffDiagonal => {
                for &n1 in &self.n1_ranges {
                    for &n2 in &self.n2_ranges {
                        for &(u, l) in &bands {
                            out.push(GridPoint::Sum { n1, n2, u, l });
                        }
                    }
                }
            }
            Lemma::SecondMoment | Lemma::MeanValue => {
                for &t in &self.t_values {
                    for &(u, l) in &bands {
                        let step = self.step_fraction * max_step(t, u, l);
                        out.push(GridPoint::Moment { t, u, l, step });
                    }
                }
            }
            Lemma::Perron => {
                for &x in &self.x_values {
                    for &y in &self.y_values {
                        for &a in &self.a_values {
                            for &t in &self.t_values {
                                for &(u, l) in &bands {
                                    out.push(GridPoint::Perron { x, y, a, t, u, l, samples: self.samples });
                                }
                            }
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::invalid(format!("grid for lemma {} has no points", lemma.label())));
        }
        Ok(out)
    }
}

/// Evaluates one grid point.
pub fn evaluate(lemma: Lemma, point: &GridPoint) -> Result<BoundReport> {
    match (lemma, *point) {
        (Lemma::Diagonal, GridPoint::Sum { n1, n2, u, l }) => {
            let lhs = s1_sum(n1, n2, u, l)?;
            let b = s1_bound(n1, n2, u, l);
            BoundReport::new(lemma, *point, lhs, b, alloc::vec![b])
        }
        (Lemma::OffDiagonal, GridPoint::Sum { n1, n2, u, l }) => {
            let lhs = s2_sum(n1, n2, u, l)?;
            let terms = s2_bound_terms(n1, n2, u, l);
            BoundReport::new(lemma, *point, lhs, terms[0] + terms[1], terms.to_vec())
        }
        (Lemma::SecondMoment, GridPoint::Moment { t, u, l, step }) => {
            let lhs = second_moment(t, u, l, step)?;
            let terms = second_moment_bound(t, u, l);
            BoundReport::new(lemma, *point, lhs, terms[0] + terms[1], terms.to_vec())
        }
        (Lemma::MeanValue, GridPoint::Moment { t, u, l, step }) => {
            let lhs = mv_mean_value(t, u, l, step)?;
            let b = mv_bound(t, u, l);
            BoundReport::new(lemma, *point, lhs, b, alloc::vec![b])
        }
        (Lemma::Perron, GridPoint::Perron { x, y, a, t, u, l, samples }) => {
            let lhs = perron_mean_square(x, y, a, t, u, l, samples)?;
            let terms = perron_bound_terms(x, y, t, u, l);
            BoundReport::new(lemma, *point, lhs, terms[0] + terms[1], terms.to_vec())
        }
        _ => Err(Error::invalid(format!(
            "grid point {} does not belong to lemma {}",
            point.describe(),
            lemma.label()
        ))),
    }
}

/// Evaluates a whole grid in order.
pub fn run_grid(lemma: Lemma, grid: &LemmaGrid) -> Result<Vec<BoundReport>> {
    grid.points(lemma)?.iter().map(|p| evaluate(lemma, p)).collect()
}

/// Largest ratio of a report list.
pub fn max_ratio(reports: &[BoundReport]) -> f64 {
    reports.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_labels_round_trip() {
        for l in Lemma::ALL {
            assert_eq!(Lemma::parse(l.label()), Some(l));
        }
        assert_eq!(Lemma::parse("5"), None);
    }

    #[test]
    fn s1_impossible_regime() {
        assert_eq!(s1_sum(1000, 100, 100.0, 50.0).unwrap().to_bits(), 0.0f64.to_bits());
        assert_eq!(s1_sum_with(700, 100, 100.0, 50.0, SumStrategy::Exhaustive).unwrap(), 0.0);
    }

    #[test]
    fn s1_tiny_by_hand() {
        // n ∈ {2, 3}, m ∈ {2..6}: products 4,6,8,10,12 and 6,9,12,15,18.
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        let prods: Vec<u64> = [2u64, 3].iter().flat_map(|n| (2..=6).map(move |m| n * m)).collect();
        for &p in &prods {
            for &q in &prods {
                if p == q {
                    *counts.entry(p).or_insert(0) += 1;
                }
            }
        }
        let want: f64 = counts.iter().map(|(&p, &c)| c as f64 / p as f64).sum();
        assert_eq!(s1_sum(2, 2, 4.0, 2.0).unwrap(), want);
        // 6 and 12 occur twice, so 4 quadruples each.
        assert_eq!(counts[&6], 4);
    }

    #[test]
    fn s1_diagonal_lower_bound() {
        let diag: f64 = (8u64..16)
            .flat_map(|n| (20u64..=30).map(move |m| 1.0 / (n * m) as f64))
            .sum();
        assert!(s1_sum(8, 8, 25.0, 5.0).unwrap() >= diag);
    }

    #[test]
    fn s1_rejects_bad_band() {
        assert!(s1_sum(4, 4, 10.0, 6.0).is_err());
        assert!(s1_sum(0, 4, 10.0, 2.0).is_err());
        let err = s1_sum_with(1 << 20, 1 << 20, 2000.0, 1000.0, SumStrategy::Exhaustive).unwrap_err();
        assert!(err.is_infeasible());
    }

    #[test]
    fn s2_strategies_agree() {
        for (n1, n2, u, l) in [(4, 4, 10.0, 4.0), (1, 1, 10.0, 3.0), (3, 7, 20.0, 6.0)] {
            let a = s2_sum(n1, n2, u, l).unwrap();
            let b = s2_sum_with(n1, n2, u, l, SumStrategy::Exhaustive).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
            assert!(a > 0.0);
        }
    }

    #[test]
    fn s2_single_pair() {
        // n₁ = n₂ = 1: terms are m₁ ≠ m₂ over m ∈ [7, 13].
        let mut want = 0.0;
        for p in 7u64..=13 {
            for q in 7u64..=13 {
                if p != q {
                    want += 1.0 / (((p * q) as f64).sqrt() * ((q as f64) / (p as f64)).ln().abs());
                }
            }
        }
        let got = s2_sum(1, 1, 10.0, 3.0).unwrap();
        assert!((got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn s2_separated_ranges() {
        let s2 = s2_sum(100, 10, 20.0, 5.0).unwrap();
        let mut flat = 0.0;
        for n1 in 100u64..200 {
            for n2 in 10u64..20 {
                for m1 in 15u64..=25 {
                    for m2 in 15u64..=25 {
                        flat += 1.0 / ((n1 * n2 * m1 * m2) as f64).sqrt();
                    }
                }
            }
        }
        flat /= (4.0f64 / 3.0).ln();
        assert!(s2 <= flat);
    }

    #[test]
    fn moment_edge_cases() {
        assert_eq!(second_moment(1.0, 50.0, 10.0, 0.1).unwrap(), 0.0);
        assert_eq!(mv_mean_value(1.0, 50.0, 10.0, 0.1).unwrap(), 0.0);
        assert!(matches!(second_moment(100.0, 50.0, 10.0, 2.0), Err(Error::Resolution { .. })));
        // One-integer window: |N|² = 1/U.
        let v = mv_mean_value(500.0, 37.0, 0.0, 0.3).unwrap();
        assert!((v - 499.0 / 37.0).abs() < 1e-12);
    }

    #[test]
    fn second_moment_positive_and_monotone() {
        let step = 0.5 * max_step(60.0, 20.0, 5.0);
        let mut prev = 0.0;
        for t in [1.5, 7.0, 20.0, 33.3, 60.0] {
            let v = second_moment(t, 20.0, 5.0, step).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn perron_examples() {
        assert_eq!(perron_majorant(1000.0, 10.0, 10.6, 0.2).unwrap(), 0.0);
        let a = perron_majorant(1e5 + 0.5, 1e3, 300.0, 30.0).unwrap();
        let b = perron_majorant(1e5 + 0.5, 2e3, 300.0, 30.0).unwrap();
        assert!(a.is_finite() && b <= a);
        assert_eq!(perron_mean_square(1e4, 10.0, 1.0, 10.0, 10.6, 0.2, 5).unwrap(), 0.0);
        assert!(perron_mean_square(1e4, 10.0, 3.0, 10.0, 100.0, 5.0, 5).is_err());
    }

    #[test]
    fn perron_first_sum_brute_force() {
        // Divisor-count form of the first sum.
        let (x, t) = (200.5f64, 3.0);
        let mut want = 0.0;
        for n in 101u64..401 {
            let a_n = (8u64..=12).filter(|m| n % m == 0).count() as f64;
            want += a_n * (x / (t * (x - n as f64).abs())).min(1.0);
        }
        let got = perron_near_sum(x, t, 10.0, 2.0).unwrap();
        assert!((got - want).abs() < 1e-12 * want, "{got} {want}");
        let tail = perron_tail(x, t, 10.0, 2.0).unwrap();
        assert!((perron_majorant(x, t, 10.0, 2.0).unwrap() - got - tail).abs() < 1e-12 * want);
    }

    #[test]
    fn measure_bound_terms() {
        let p = AlmostSquareParams::new(0.45, 1.0).unwrap();
        let m = measure_bound(1e20, &p, 0.1).unwrap();
        assert!(m.terms.iter().all(|t| t.is_finite() && *t > 0.0));
        assert_eq!(m.vacuous, m.fraction >= 1.0);
    }

    #[test]
    fn grid_hypotheses() {
        let g = LemmaGrid::default_for(Lemma::OffDiagonal);
        for p in g.points(Lemma::OffDiagonal).unwrap() {
            let GridPoint::Sum { u, l, .. } = p else { panic!() };
            assert!(l > libm::pow(u, 0.4) && l <= u / 2.0);
        }
        let mut bad = g.clone();
        bad.beta = 0.6;
        assert!(bad.points(Lemma::OffDiagonal).is_err());
        let mut bad = g;
        bad.l_values.push(100.0);
        assert!(bad.points(Lemma::OffDiagonal).is_err());
        assert_eq!(LemmaGrid::default_for(Lemma::MeanValue).points(Lemma::MeanValue).unwrap().len(), 10);
    }

    #[test]
    fn evaluate_rejects_mismatched_point() {
        let p = GridPoint::Sum { n1: 1, n2: 1, u: 10.0, l: 2.0 };
        assert!(evaluate(Lemma::SecondMoment, &p).is_err());
    }
}
