//! Quadrature helpers.

/// `∫_a^b f(t) dt` for a non-negative integrand, on the fixed node grid
/// `a + j·h`.
///
/// Each pair of panels uses Simpson's rule (the exact integral of the
/// quadratic interpolant). When that interpolant dips below zero inside the
/// pair, the pair falls back to the piecewise-linear interpolant. The result
/// is therefore the integral of one fixed non-negative function, so it is
/// non-negative and non-decreasing in `b`. A trailing partial pair integrates
/// the same interpolant up to `b`.
pub fn nonneg_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, h: f64) -> f64 {
    if !(b > a) || !(h > 0.0) {
        return 0.0;
    }
    let mut total = 0.0;
    let mut k = 0u64;
    let mut f0 = f(a);
    loop {
        let t0 = a + (2 * k) as f64 * h;
        if t0 >= b {
            break;
        }
        let f1 = f(t0 + h);
        let f2 = f(a + (2 * k + 2) as f64 * h);
        let s = (b - t0).min(2.0 * h);
        total += pair_integral(f0, f1, f2, h, s);
        f0 = f2;
        k += 1;
    }
    total
}

/// Integral over `[0, s]`, `0 < s ≤ 2h`, of the interpolant through
/// `(0, f0), (h, f1), (2h, f2)`.
fn pair_integral(f0: f64, f1: f64, f2: f64, h: f64, s: f64) -> f64 {
    let lin = 0.5 * (-3.0 * f0 + 4.0 * f1 - f2) / h;
    let quad = 0.5 * (f0 - 2.0 * f1 + f2) / (h * h);
    let dips = quad > 0.0 && {
        let u = -lin / (2.0 * quad);
        u > 0.0 && u < 2.0 * h && f0 - lin * lin / (4.0 * quad) < 0.0
    };
    if !dips {
        if s == 2.0 * h {
            return h / 3.0 * (f0 + 4.0 * f1 + f2);
        }
        return s * (f0 + s * (lin / 2.0 + s * quad / 3.0));
    }
    // Piecewise linear through the three nodes.
    if s <= h {
        let fs = f0 + (f1 - f0) * s / h;
        0.5 * s * (f0 + fs)
    } else {
        let r = s - h;
        let fs = f1 + (f2 - f1) * r / h;
        0.5 * h * (f0 + f1) + 0.5 * r * (f1 + fs)
    }
}

/// Midpoint nodes `a + (i + 1/2)·(b − a)/n`, `i = 0..n`.
pub fn midpoints(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = (b - a) / n as f64;
    (0..n).map(move |i| a + (i as f64 + 0.5) * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = nonneg_simpson(|t| t * t, 0.0, 2.0, 0.25);
        assert!((v - 8.0 / 3.0).abs() < 1e-13);
        // Partial trailing pair is still exact for quadratics.
        let v = nonneg_simpson(|t| 1.0 + t * t, 1.0, 3.3, 0.5);
        let want = (3.3 + 3.3f64.powi(3) / 3.0) - (1.0 + 1.0 / 3.0);
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn empty_and_reversed() {
        assert_eq!(nonneg_simpson(|_| 1.0, 1.0, 1.0, 0.1), 0.0);
        assert_eq!(nonneg_simpson(|_| 1.0, 2.0, 1.0, 0.1), 0.0);
    }

    #[test]
    fn oscillatory_nonneg() {
        // ∫ sin² t dt = t/2 − sin(2t)/4
        let exact = 50.0 - 200.0f64.sin() / 4.0;
        let v = nonneg_simpson(|t| t.sin().powi(2), 0.0, 100.0, 0.05);
        assert!((v - exact).abs() < 1e-5, "{v} vs {exact}");
    }

    #[test]
    fn monotone_in_upper_limit() {
        // Narrow spikes make the quadratic interpolant negative.
        let f = |t: f64| (10.0 * t).sin().powi(8);
        let mut prev = 0.0;
        for i in 0..400 {
            let b = 1.0 + i as f64 * 0.037;
            let v = nonneg_simpson(f, 1.0, b, 0.3);
            assert!(v >= prev, "b={b}");
            prev = v;
        }
    }
}
