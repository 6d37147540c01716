//! Scalar minimization and root finding.

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
///
/// Returns `(x, f(x))`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Evaluate `f` on `n + 1` equispaced points of `[a, b]` and return a bracket
/// `[x_{i-1}, x_{i+1}]` around the smallest sample.
pub fn scan_bracket<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> (f64, f64) {
    let h = (b - a) / n as f64;
    let mut best = (0, f64::INFINITY);
    for i in 0..=n {
        let v = f(a + i as f64 * h);
        if v < best.1 {
            best = (i, v);
        }
    }
    let lo = a + best.0.saturating_sub(1) as f64 * h;
    let hi = a + (best.0 + 1).min(n) as f64 * h;
    (lo, hi)
}

/// Secant iteration for `g(x) = 0` started from `x0, x1`.
///
/// Returns `None` when the iteration leaves `[lo, hi]` or stalls.
pub fn secant<F: FnMut(f64) -> f64>(mut g: F, mut x0: f64, mut x1: f64, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let mut g0 = g(x0);
    let mut g1 = g(x1);
    for _ in 0..60 {
        if g1 == g0 {
            return if g1.abs() < tol { Some(x1) } else { None };
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        if !(lo..=hi).contains(&x2) || !x2.is_finite() {
            return None;
        }
        if (x2 - x1).abs() < tol {
            return Some(x2);
        }
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g(x1);
    }
    None
}

/// Bisection for a sign change of `g` on `[a, b]`.
pub fn bisect<F: FnMut(f64) -> f64>(mut g: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut ga = g(a);
    let gb = g(b);
    if ga * gb > 0.0 {
        return None;
    }
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return Some(m);
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}
