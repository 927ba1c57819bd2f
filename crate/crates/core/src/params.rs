//! Parameter objects and window arithmetic shared by the other modules.

use core::f64::consts::E;

use crate::error::{Error, Result};
use crate::exact::CertifiedWindow;

/// The `(θ, C)` pair that fixes the factor window `[√n − C·n^θ, √n + C·n^θ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlmostSquareParams {
    theta: f64,
    c_coef: f64,
}

impl AlmostSquareParams {
    pub fn new(theta: f64, c_coef: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=0.5).contains(&theta) {
            return Err(Error::invalid(alloc::format!("theta = {theta} outside [0, 1/2]")));
        }
        if !c_coef.is_finite() || c_coef <= 0.0 {
            return Err(Error::invalid(alloc::format!("C = {c_coef} must be finite and > 0")));
        }
        Ok(Self { theta, c_coef })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn c_coef(&self) -> f64 {
        self.c_coef
    }
}

/// Floating-point view of a window, clamped at zero on the left.
///
/// `radius` bounds the absolute evaluation error of both endpoints; exact
/// membership goes through [`in_window`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub radius: f64,
}

impl Window {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

pub fn window_of(n: u64, params: &AlmostSquareParams) -> Result<Window> {
    let cw = CertifiedWindow::new(n, params)?;
    Ok(Window {
        lo: cw.lower().max(0.0),
        hi: cw.upper(),
        radius: cw.radius(),
    })
}

/// Exact membership `√n − C·n^θ ≤ a ≤ √n + C·n^θ`.
pub fn in_window(a: u64, n: u64, params: &AlmostSquareParams) -> Result<bool> {
    if a == 0 {
        return Err(Error::invalid("a must be at least 1"));
    }
    CertifiedWindow::new(n, params)?.contains(a)
}

/// Which statement an [`IntervalSpec`] was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Preset {
    Theorem,
    Corollary,
    Conjecture,
    Custom,
}

/// Interval length `H(x) = A·x^γ·(ln x)^δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntervalSpec {
    pub coef: f64,
    pub pow: f64,
    pub logpow: f64,
    pub preset: Preset,
}

impl IntervalSpec {
    /// `x^{1−2θ}·(ln x)^{5+ε}`.
    pub fn theorem(theta: f64, eps: f64) -> Self {
        Self { coef: 1.0, pow: 1.0 - 2.0 * theta, logpow: 5.0 + eps, preset: Preset::Theorem }
    }

    /// `(ln x)^{5+ε}`.
    pub fn corollary(eps: f64) -> Self {
        Self { coef: 1.0, pow: 0.0, logpow: 5.0 + eps, preset: Preset::Corollary }
    }

    /// `x^{1/2−θ+ε}`, the half-length of the conjectured interval.
    pub fn conjecture(theta: f64, eps: f64) -> Self {
        Self { coef: 1.0, pow: 0.5 - theta + eps, logpow: 0.0, preset: Preset::Conjecture }
    }

    pub fn custom(coef: f64, pow: f64, logpow: f64) -> Result<Self> {
        if !(coef.is_finite() && coef > 0.0) || !pow.is_finite() || !logpow.is_finite() {
            return Err(Error::invalid("interval spec needs A > 0 and finite exponents"));
        }
        Ok(Self { coef, pow, logpow, preset: Preset::Custom })
    }
}

pub fn interval_length(x: f64, spec: &IntervalSpec) -> Result<f64> {
    if !(x > E) {
        return Err(Error::domain(alloc::format!("interval length needs x > e, got {x}")));
    }
    let h = spec.coef * libm::pow(x, spec.pow) * libm::pow(libm::log(x), spec.logpow);
    if !h.is_finite() {
        return Err(Error::Range(alloc::format!("H({x}) overflows")));
    }
    Ok(h)
}

/// Parameters of the counting apparatus: the factor band `[U − L, U + L]`,
/// the relative interval width `1/V`, the truncation height `T`, the abscissa
/// `η` of the shifted contour and Perron's `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnalyticConfig {
    pub big_u: f64,
    pub big_l: f64,
    pub big_v: f64,
    pub big_t: f64,
    pub eta: f64,
    pub perron_c: f64,
}

impl AnalyticConfig {
    /// Checked constructor enforcing `1/2 ≤ L ≤ U`, `V ≥ 2`, `T ≥ 2` and
    /// `1/2 ≤ η < 1 < c`.
    pub fn new(big_u: f64, big_l: f64, big_v: f64, big_t: f64, eta: f64, perron_c: f64) -> Result<Self> {
        let cfg = Self { big_u, big_l, big_v, big_t, eta, perron_c };
        let violations = cfg.violations();
        match violations.first() {
            None => Ok(cfg),
            Some(v) => Err(Error::invalid(*v)),
        }
    }

    /// A band-only configuration used by the counting functions, where `T`,
    /// `η` and `c` play no role.
    pub fn band(big_u: f64, big_l: f64, big_v: f64) -> Result<Self> {
        if !(big_u.is_finite() && big_l.is_finite() && big_l >= 0.0 && big_u - big_l >= 0.5) {
            return Err(Error::invalid("band needs L ≥ 0 and U − L ≥ 1/2"));
        }
        if !(big_v.is_finite() && big_v > 0.0) {
            return Err(Error::invalid("V must be positive"));
        }
        Ok(Self { big_u, big_l, big_v, big_t: 2.0, eta: 0.5, perron_c: 2.0 })
    }

    /// Every hypothesis on the parameters that fails, as messages.
    pub fn violations(&self) -> alloc::vec::Vec<&'static str> {
        let mut out = alloc::vec::Vec::new();
        let all_finite = [self.big_u, self.big_l, self.big_v, self.big_t, self.eta, self.perron_c]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            out.push("parameters must be finite");
            return out;
        }
        if !(0.5 <= self.big_l && self.big_l <= self.big_u) {
            out.push("need 1/2 ≤ L ≤ U");
        }
        if self.big_v < 2.0 {
            out.push("need V ≥ 2");
        }
        if self.big_t < 2.0 {
            out.push("need T ≥ 2");
        }
        if !(0.5 <= self.eta && self.eta < 1.0 && 1.0 < self.perron_c) {
            out.push("need 1/2 ≤ η < 1 < c");
        }
        out
    }

    /// Integers of the band `[U − L, U + L]` as an inclusive range.
    pub fn band_range(&self) -> Option<(u64, u64)> {
        band_integers(self.big_u, self.big_l)
    }
}

/// Inclusive integer range of `[U − L, U + L] ∩ [1, ∞)`, or `None` if empty.
pub fn band_integers(big_u: f64, big_l: f64) -> Option<(u64, u64)> {
    let lo = libm::ceil(big_u - big_l).max(1.0);
    let hi = libm::floor(big_u + big_l);
    (lo <= hi && hi < 1.8e19).then_some((lo as u64, hi as u64))
}

/// The parameter formulas evaluated at a given `X`, together with the
/// interval length `Y = X^{1/2}·L`, before any hypothesis is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParameterChoice {
    pub big_x: f64,
    pub config: AnalyticConfig,
    pub big_y: f64,
}

impl ParameterChoice {
    /// `U = X^{1/2}`, `L = C·X^θ/(2C+3)`, `T = X^{2θ}/(ln X)^{4+ε/2}`,
    /// `V = X^{2θ}/(ln X)^{5+ε}`, `Y = X^{1/2}·L`, `η = 1/2`, `c = 1 + 1/ln X`.
    pub fn derive(big_x: f64, params: &AlmostSquareParams, eps: f64) -> Result<Self> {
        if !(big_x.is_finite() && big_x > E) {
            return Err(Error::domain("X must exceed e"));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::invalid("eps must be positive"));
        }
        let theta = params.theta();
        let c = params.c_coef();
        let ln_x = libm::log(big_x);
        let big_u = libm::sqrt(big_x);
        let x_theta = libm::pow(big_x, theta);
        let big_l = c * x_theta / (2.0 * c + 3.0);
        let x_2theta = libm::pow(big_x, 2.0 * theta);
        let big_t = x_2theta / libm::pow(ln_x, 4.0 + eps / 2.0);
        let big_v = x_2theta / libm::pow(ln_x, 5.0 + eps);
        let config = AnalyticConfig {
            big_u,
            big_l,
            big_v,
            big_t,
            eta: 0.5,
            perron_c: 1.0 + 1.0 / ln_x,
        };
        Ok(Self { big_x, config, big_y: big_u * big_l })
    }

    /// Fails with "X too small" when `V < 2` or `T < 2`, and with an invalid
    /// parameter error for any other violated hypothesis.
    pub fn validate(self) -> Result<Self> {
        let cfg = &self.config;
        if cfg.big_v < 2.0 || cfg.big_t < 2.0 {
            return Err(Error::XTooSmall(alloc::format!(
                "X = {}: V = {:.6}, T = {:.6} (both must be ≥ 2)",
                self.big_x,
                cfg.big_v,
                cfg.big_t
            )));
        }
        if let Some(v) = cfg.violations().first() {
            return Err(Error::invalid(*v));
        }
        Ok(self)
    }

    /// Warning for the side condition `2 ≤ y/(U·T^{1/3}) ≤ X`, `T ≤ X` over
    /// `y ∈ [X, X+Y]`. Reported, never enforced.
    pub fn contour_condition_holds(&self) -> bool {
        let cfg = &self.config;
        let scale = cfg.big_u * libm::cbrt(cfg.big_t);
        let low = self.big_x / scale;
        let high = (self.big_x + self.big_y) / scale;
        low >= 2.0 && high <= self.big_x && cfg.big_t <= self.big_x
    }
}

/// Parameter choice for scale `X`, rejecting scales where `V < 2` or `T < 2`.
pub fn choose_parameters(big_x: f64, params: &AlmostSquareParams, eps: f64) -> Result<ParameterChoice> {
    if !(params.theta() > 0.25) {
        return Err(Error::invalid("parameter choice needs 1/4 < θ ≤ 1/2"));
    }
    ParameterChoice::derive(big_x, params, eps)?.validate()
}
