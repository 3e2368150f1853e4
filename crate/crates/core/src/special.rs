//! Special functions used by the entropy estimator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Digamma function `Ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
///
/// Shifts the argument to `x ≥ 6` with `Ψ(x) = Ψ(x+1) − 1/x`, then sums the
/// asymptotic expansion through the `x⁻¹⁴` term. Absolute error is below
/// 1e-12 on `(0, 1e6]`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "digamma needs a positive finite argument, got {x}"
        )));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 6.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_2j / (2j x^2j), j = 1..7
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(shift + x.ln() - 0.5 * inv - series)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Natural log of the volume of the Euclidean unit ball in `d` dimensions.
pub fn ln_unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let half = d as f64 / 2.0;
    Ok(std::f64::consts::LN_2 + half * PI.ln() - (d as f64).ln() - ln_gamma(half))
}

/// `c1(d) = 2π^{d/2} / (d Γ(d/2))`, the volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    ln_unit_ball_volume(d).map(f64::exp)
}
