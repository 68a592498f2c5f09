//! Log-gamma, digamma, trigamma and Pochhammer symbols for positive real
//! arguments.
//!
//! Each function shifts the argument upward by recurrence until it reaches
//! [`ASYMPTOTIC_FROM`] and then sums the Bernoulli asymptotic series, whose
//! truncation error there is far below one ulp.

use crate::{Error, Real, Result};

const ASYMPTOTIC_FROM: f64 = 15.0;

/// `B₂ₘ / (2m(2m−1))` for m = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `B₂ₘ / 2m` for m = 1..8.
const DIGAMMA: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// `B₂ₘ` for m = 1..8.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

fn check_positive<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            name,
            format!("{x} must be positive and finite"),
        ))
    }
}

/// Odd-power series `Σ coeffs[m] · w^{2m+1}` in `w = 1/x`, Horner form.
fn odd_series<T: Real>(coeffs: &[f64], w: T) -> T {
    let w2 = w * w;
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * w2 + T::c(c))
        * w
}

/// Advances `x` to at least [`ASYMPTOTIC_FROM`], returning the shifted
/// argument and the product `x(x+1)…` of the skipped factors.
fn shift_up<T: Real>(x: T) -> (T, T) {
    let mut y = x;
    let mut prod = T::one();
    while y < T::c(ASYMPTOTIC_FROM) {
        prod = prod * y;
        y = y + T::one();
    }
    (y, prod)
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    check_positive("x", x)?;
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked<T: Real>(x: T) -> T {
    let (y, prod) = shift_up(x);
    let half = T::c(0.5);
    let stirling = (y - half) * y.ln() - y
        + half * (T::c(2.0) * T::PI()).ln()
        + odd_series(&STIRLING, y.recip());
    stirling - prod.ln()
}

/// `Γ(x)` for `x > 0`, through [`log_gamma`].
pub fn gamma<T: Real>(x: T) -> Result<T> {
    Ok(log_gamma(x)?.exp())
}

/// `ψ(x) = Γ′(x)/Γ(x)` for `x > 0`.
pub fn digamma<T: Real>(x: T) -> Result<T> {
    check_positive("x", x)?;
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked<T: Real>(x: T) -> T {
    let mut y = x;
    let mut shift = T::zero();
    while y < T::c(ASYMPTOTIC_FROM) {
        shift = shift + y.recip();
        y = y + T::one();
    }
    let w = y.recip();
    // ln y − 1/(2y) − Σ B₂ₘ/(2m y^{2m})
    let tail = odd_series(&DIGAMMA, w) * w;
    y.ln() - T::c(0.5) * w - tail - shift
}

/// `ψ′(x)` for `x > 0`.
pub fn trigamma<T: Real>(x: T) -> Result<T> {
    check_positive("x", x)?;
    Ok(trigamma_unchecked(x))
}

pub(crate) fn trigamma_unchecked<T: Real>(x: T) -> T {
    let mut y = x;
    let mut shift = T::zero();
    while y < T::c(ASYMPTOTIC_FROM) {
        shift = shift + (y * y).recip();
        y = y + T::one();
    }
    let w = y.recip();
    // 1/y + 1/(2y²) + Σ B₂ₘ / y^{2m+1}
    let tail = odd_series(&BERNOULLI, w) * w * w;
    w + T::c(0.5) * w * w + tail + shift
}

/// Rising factorial `(x)ₙ = x(x+1)…(x+n−1)`; `(x)₀ = 1`.
pub fn pochhammer<T: Real>(x: T, n: u32) -> T {
    (0..n).fold(T::one(), |acc, i| acc * (x + T::c(i as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn log_gamma_reference_values() {
        assert!(rel(log_gamma(0.1).unwrap(), 2.252712651734206) < 1e-14);
        assert!(rel(log_gamma(33.3).unwrap(), 82.60372358165495) < 1e-14);
        assert!(log_gamma(1.0f64).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0f64).unwrap().abs() < 1e-14);
        assert!(rel(log_gamma(0.5).unwrap(), 0.5 * PI.ln()) < 1e-14);
        assert!(rel(log_gamma(11.0).unwrap(), 3628800f64.ln()) < 1e-14);
    }

    #[test]
    fn reflection_at_one_sixth() {
        let v = (log_gamma(1.0f64 / 6.0).unwrap() + log_gamma(5.0f64 / 6.0).unwrap()).exp();
        assert!(rel(v, 2.0 * PI) < 1e-14);
    }

    #[test]
    fn digamma_reference_values() {
        assert!(rel(digamma(0.3).unwrap(), -3.502524222200133) < 1e-14);
        assert!(rel(digamma(7.5).unwrap(), 1.946757484246087) < 1e-14);
        let euler = 0.577_215_664_901_532_9;
        assert!(rel(digamma(1.0).unwrap(), -euler) < 1e-14);
        assert!((digamma(4.0f64).unwrap() - digamma(2.0f64).unwrap() - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn trigamma_reference_values() {
        assert!(rel(trigamma(1.0).unwrap(), PI * PI / 6.0) < 1e-14);
        assert!(rel(trigamma(0.5).unwrap(), PI * PI / 2.0) < 1e-14);
        // ψ′(x) − ψ′(x+1) = 1/x²
        let x = 3.7f64;
        assert!((trigamma(x).unwrap() - trigamma(x + 1.0).unwrap() - 1.0 / (x * x)).abs() < 1e-15);
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(0.5f64, 2), 0.75);
        assert_eq!(pochhammer(3.0f64, 0), 1.0);
        assert_eq!(pochhammer(1.0f64, 5), 120.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_gamma(0.0f64).is_err());
        assert!(digamma(-1.5f64).is_err());
        assert!(trigamma(f64::NAN).is_err());
        assert!(gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn single_precision() {
        let v: f32 = log_gamma(0.1f32).unwrap();
        assert!((v - 2.252_712_7).abs() < 1e-5);
        let d: f32 = digamma(7.5f32).unwrap();
        assert!((d - 1.946_757_5).abs() < 1e-5);
    }
}
