//! Special functions not provided by `std`.
//!
//! Bessel functions of the first kind and `erfc` come from `libm`.

pub use libm::{erfc, j0, j1, jn};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn expint_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs a positive argument");
    if x <= 1.0 {
        // Power series.
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // Lentz continued fraction.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// `e^{-x} I0(x)` for `x ≥ 0`, by the trapezoid rule on the periodic
/// integral representation (exponentially convergent).
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    let m = (2.0 * x.sqrt() + 40.0).ceil() as usize;
    // (1/π)∫_0^π exp(x(cos t - 1)) dt; the integrand is even and periodic.
    let h = std::f64::consts::PI / m as f64;
    let mut s = 0.5 * (1.0 + (-2.0 * x).exp());
    for k in 1..m {
        s += (x * ((k as f64 * h).cos() - 1.0)).exp();
    }
    s / m as f64
}

pub const fn euler_gamma() -> f64 {
    EULER_GAMMA
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_reference_values() {
        // Abramowitz & Stegun table 5.1.
        assert!((expint_e1(0.5) - 0.559_773_594_776_160_8).abs() < 1e-14);
        assert!((expint_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((expint_e1(2.0) - 0.048_900_510_708_061_12).abs() < 1e-15);
        assert!((expint_e1(10.0) - 4.156_968_929_685_324e-6).abs() < 1e-19);
    }

    #[test]
    fn i0_scaled_reference() {
        assert!((bessel_i0_scaled(0.0) - 1.0).abs() < 1e-15);
        // I0(1) = 1.2660658777520082
        assert!((bessel_i0_scaled(1.0) - 1.266_065_877_752_008_2 * (-1f64).exp()).abs() < 1e-15);
        // large argument: e^{-x}I0(x) ≈ 1/sqrt(2πx)(1 + 1/(8x))
        let x = 400.0;
        let approx = (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / (2.0 * std::f64::consts::PI * x).sqrt();
        assert!((bessel_i0_scaled(x) - approx).abs() < 1e-9);
    }
}
