//! Special functions needed by the kNN estimators.

use crate::error::{Error, Result};

/// Asymptotic expansion is used at and above this argument.
const ASYMPTOTIC_FROM: f64 = 6.0;

/// Digamma function ψ(x) for x > 0.
///
/// Small arguments are shifted upward with ψ(x) = ψ(x + 1) − 1/x, then the
/// Bernoulli asymptotic series is evaluated. Terms through x⁻¹⁴ keep the
/// truncation error under 1e-12 at x = 6.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::DigammaDomain(x));
    }
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < ASYMPTOTIC_FROM {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/12 - 1/(120x²) + 1/(252x⁴) - 1/(240x⁶) + 1/(132x⁸) - 691/(32760x¹⁰) + 1/(12x¹²)
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
    x.ln() - 0.5 * inv - series - shift
}

/// ln Γ(n/2) for a positive integer n, exact up to rounding of the sum.
pub fn ln_gamma_half(n: u32) -> f64 {
    assert!(n > 0, "ln_gamma_half needs n >= 1");
    // Γ(1) = 1, Γ(1/2) = √π, then Γ(z + 1) = z Γ(z).
    let (mut acc, mut z) = if n.is_multiple_of(2) {
        (0.0, 1.0)
    } else {
        (0.5 * std::f64::consts::PI.ln(), 0.5)
    };
    while 2.0 * z < n as f64 {
        acc += z.ln();
        z += 1.0;
    }
    acc
}
