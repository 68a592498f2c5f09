//! Density and distribution function of `|J|` under `μₖ`.
//!
//! With `X = 27Q = 108J²` and `x = √X = 6√3|J| ∈ [0, 1]`, the density of `X`
//! is
//!
//! `f(X) = cₖ(k−½) X^{k−3/2} ∫_X^1 F(1−t) t^{−1/2} dt`,
//!
//! where `F = ₂F₁(1/3, 2/3; 1; ·)`, `cₖ = Γ(k+⅓)Γ(k+⅔)/Γ(k)²` and the full
//! integral `∫₀¹ F(1−t) t^{−1/2} dt` equals 3. The density of `x` is
//! `f₀(x) = 2x f(x²)`.
//!
//! Three evaluation routes are provided:
//!
//! * near 0, the logarithmic expansion of `F(1−t)` integrated term by term;
//! * near 1, the product of the power series of `F(1−t)` and `t^{−1/2}` in
//!   `u = 1−t`, whose coefficients `d_N = Σ_{n+m=N} cₙ (½)ₘ/m!` are positive
//!   and at most `N+1`;
//! * adaptive quadrature of `∫_x^1 2F(1−u²) du`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::closed_form::{check_k, volume_ratio};
use super::hypergeometric::{f_complement, log_prefactor, Coefficients};
use super::quadrature::{integrate, Tolerance};
use super::special::log_gamma_unchecked;
use super::{SeriesEvaluation, SeriesMethod};
use crate::{Error, Result};

/// Default absolute tolerance for series and quadrature routes.
pub const DEFAULT_TOL: f64 = 1e-14;

/// `x` above which the automatic routes leave the small-`x` series.
pub const SERIES_SWITCH: f64 = 0.75;

/// Largest `|J|` over U(3), `1/(6√3)`.
pub const J_MAX: f64 = 0.096_225_044_864_937_63;

const MAX_TERMS: usize = 2000;

/// A measured value with asymmetric uncertainties.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Measurement {
    pub value: f64,
    pub plus: f64,
    pub minus: f64,
}

/// Observed quark-sector Jarlskog invariant.
pub const J_OBS: Measurement = Measurement {
    value: 3.08e-5,
    plus: 0.16e-5,
    minus: 0.18e-5,
};

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("tol", format!("{tol} must be positive")))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain("x", format!("{x} not in (0, 1]")))
    }
}

/// `cₖ = Γ(k+⅓)Γ(k+⅔)/Γ(k)²`.
pub fn c_k(k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(c_k_unchecked(k))
}

fn c_k_unchecked(k: f64) -> f64 {
    (log_gamma_unchecked(k + 1.0 / 3.0) + log_gamma_unchecked(k + 2.0 / 3.0)
        - 2.0 * log_gamma_unchecked(k))
    .exp()
}

/// Density of the product `X₁X₂`: `cₖ x^{k−1} F(1−x)` on `(0, 1]`.
pub fn density_f12(k: f64, x: f64) -> Result<f64> {
    check_k(k)?;
    check_x(x)?;
    Ok(c_k_unchecked(k) * x.powf(k - 1.0) * f_complement(x))
}

/// `∫₀¹ F(1−t) t^{−1/2} dt`, computed as `∫₀¹ 2F(1−u²) du`.
pub fn lemma_integral(tol: f64) -> Result<SeriesEvaluation> {
    check_tol(tol)?;
    let r = integrate(
        |u| 2.0 * f_complement(u * u),
        0.0,
        1.0,
        Tolerance::absolute(tol),
    )?;
    Ok(SeriesEvaluation {
        value: r.value,
        method: SeriesMethod::Quadrature,
        terms_used: r.intervals,
        error_bound: r.error_estimate,
    })
}

/// `d_N` coefficients of `F(1−t) t^{−1/2}` in powers of `u = 1−t`.
fn near_one_coefficients() -> &'static [f64] {
    static D: OnceLock<Vec<f64>> = OnceLock::new();
    D.get_or_init(|| {
        let mut c = Vec::with_capacity(MAX_TERMS);
        let mut half = Vec::with_capacity(MAX_TERMS);
        let mut coef = Coefficients::new();
        let mut a = 1.0;
        for m in 0..MAX_TERMS {
            c.push(coef.current().1);
            coef.advance();
            half.push(a);
            a *= (m as f64 + 0.5) / (m as f64 + 1.0);
        }
        (0..MAX_TERMS)
            .map(|n| (0..=n).map(|i| c[i] * half[n - i]).sum())
            .collect()
    })
}

/// `∫_X^1 F(1−t) t^{−1/2} dt` as `Σ d_N u^{N+1}/(N+1)`, `u = 1 − X`, with
/// the remainder bound `u^{N+2}/X`.
fn complement_integral_near_one(big_x: f64, u: f64, tol: f64) -> (f64, usize, f64) {
    let d = near_one_coefficients();
    let mut sum = 0.0;
    let mut power = u;
    let mut bound = f64::INFINITY;
    let mut terms = 0;
    for (n, &dn) in d.iter().enumerate() {
        sum += dn * power / (n as f64 + 1.0);
        terms += 1;
        power *= u;
        bound = power / big_x;
        if bound < tol || power == 0.0 {
            if power == 0.0 {
                bound = 0.0;
            }
            break;
        }
    }
    (sum, terms, bound)
}

fn density_near_zero(k: f64, x: f64, tol: f64) -> SeriesEvaluation {
    let scale = 2.0 * c_k_unchecked(k) * (k - 0.5) * x.powf(2.0 * k - 2.0);
    let pre = log_prefactor();
    let log_term = -2.0 * x.ln();
    let x2 = x * x;
    let mut coef = Coefficients::new();
    let mut power = x;
    let mut sum = 0.0;
    let mut terms = 0;
    let mut bound = f64::INFINITY;
    let term = |n: usize, c: f64, a: f64, p: f64| {
        let m = 2.0 * n as f64 + 1.0;
        c * 2.0 * p / m * (log_term + a + 2.0 / m)
    };
    while terms < MAX_TERMS {
        let (n, c, a) = coef.current();
        sum += term(n, c, a, power);
        terms += 1;
        coef.advance();
        power *= x2;
        let (n, c, a) = coef.current();
        bound = scale * pre * term(n, c, a, power) / (1.0 - x2);
        if bound < 0.1 * tol.min(f64::EPSILON * scale * (3.0 - pre * sum)) {
            break;
        }
    }
    SeriesEvaluation {
        value: scale * (3.0 - pre * sum),
        method: SeriesMethod::SeriesNear0,
        terms_used: terms,
        error_bound: bound,
    }
}

fn density_near_one(k: f64, x: f64, tol: f64) -> SeriesEvaluation {
    let big_x = x * x;
    // 1 − x² without cancellation
    let u = (1.0 - x) * (1.0 + x);
    let scale = 2.0 * x * c_k_unchecked(k) * (k - 0.5) * big_x.powf(k - 1.5);
    let (s, terms, bound) = complement_integral_near_one(big_x, u, 0.1 * tol / scale.max(1e-300));
    SeriesEvaluation {
        value: scale * s,
        method: SeriesMethod::SeriesNear1,
        terms_used: terms,
        error_bound: scale * bound,
    }
}

fn density_quadrature(k: f64, x: f64, tol: f64) -> Result<SeriesEvaluation> {
    let scale = 2.0 * x * c_k_unchecked(k) * (k - 0.5) * (x * x).powf(k - 1.5);
    let r = integrate(
        |u| 2.0 * f_complement(u * u),
        x,
        1.0,
        Tolerance::absolute(tol / scale.max(1e-300)),
    )?;
    Ok(SeriesEvaluation {
        value: scale * r.value,
        method: SeriesMethod::Quadrature,
        terms_used: r.intervals,
        error_bound: scale * r.error_estimate,
    })
}

/// Density `f₀(x)` of `x = 6√3|J|` on `(0, 1]`, choosing the small-`x`
/// series up to [`SERIES_SWITCH`] and the near-1 series above it.
pub fn density_absj(k: f64, x: f64, tol: f64) -> Result<SeriesEvaluation> {
    let method = if x <= SERIES_SWITCH {
        SeriesMethod::SeriesNear0
    } else {
        SeriesMethod::SeriesNear1
    };
    density_absj_with(k, x, tol, method)
}

/// [`density_absj`] through a chosen route. The small-`x` series requires
/// `x < 1`; the near-1 series converges on all of `(0, 1]` but slowly for
/// small `x`.
pub fn density_absj_with(
    k: f64,
    x: f64,
    tol: f64,
    method: SeriesMethod,
) -> Result<SeriesEvaluation> {
    check_k(k)?;
    check_x(x)?;
    check_tol(tol)?;
    match method {
        SeriesMethod::SeriesNear0 => {
            if x >= 1.0 {
                return Err(Error::domain("x", "small-x series needs x < 1"));
            }
            Ok(density_near_zero(k, x, tol))
        }
        SeriesMethod::SeriesNear1 => Ok(density_near_one(k, x, tol)),
        SeriesMethod::Quadrature => density_quadrature(k, x, tol),
    }
}

/// Density of `|J|` itself: `6√3 f₀(6√3 y)`.
pub fn jarlskog_density(k: f64, y: f64, tol: f64) -> Result<SeriesEvaluation> {
    let s = 6.0 * 3f64.sqrt();
    let x = scaled(y)?;
    if x == 0.0 {
        return Err(Error::domain("y", "density needs y > 0"));
    }
    let r = density_absj(k, x, tol / s)?;
    Ok(SeriesEvaluation {
        value: s * r.value,
        error_bound: s * r.error_bound,
        ..r
    })
}

/// `x = 6√3 y`, with `y` allowed to exceed [`J_MAX`] by rounding only.
fn scaled(y: f64) -> Result<f64> {
    if !(0.0..=J_MAX * (1.0 + 1e-12)).contains(&y) {
        return Err(Error::domain("y", format!("{y} not in [0, 1/(6 sqrt 3)]")));
    }
    Ok((6.0 * 3f64.sqrt() * y).min(1.0))
}

fn cdf_near_zero(k: f64, x: f64, tol: f64) -> SeriesEvaluation {
    let scale = 2.0 * c_k_unchecked(k) * (k - 0.5) * x.powf(2.0 * k - 1.0);
    let pre = log_prefactor();
    let log_term = -2.0 * x.ln();
    let x2 = x * x;
    let term = |n: usize, c: f64, a: f64, p: f64| {
        let m = 2.0 * n as f64 + 1.0;
        let nk = n as f64 + k;
        c * p / (m * nk) * (log_term + a + 2.0 / m + 1.0 / nk)
    };
    let mut coef = Coefficients::new();
    let mut power = x;
    let mut sum = 0.0;
    let mut terms = 0;
    let mut bound = f64::INFINITY;
    while terms < MAX_TERMS {
        let (n, c, a) = coef.current();
        sum += term(n, c, a, power);
        terms += 1;
        coef.advance();
        power *= x2;
        let (n, c, a) = coef.current();
        bound = scale * pre * term(n, c, a, power) / (1.0 - x2);
        let value = scale * (3.0 / (2.0 * k - 1.0) - pre * sum);
        if bound < 0.1 * tol.min(f64::EPSILON * value) {
            break;
        }
    }
    SeriesEvaluation {
        value: scale * (3.0 / (2.0 * k - 1.0) - pre * sum),
        method: SeriesMethod::SeriesNear0,
        terms_used: terms,
        error_bound: bound,
    }
}

/// `1 − ∫_x^1 f₀` with the near-1 density series as integrand.
fn cdf_upper(k: f64, x: f64, tol: f64) -> Result<SeriesEvaluation> {
    let inner = 0.01 * tol;
    let r = integrate(
        |s| density_near_one(k, s, inner).value,
        x,
        1.0,
        Tolerance::absolute(0.5 * tol),
    )?;
    Ok(SeriesEvaluation {
        value: 1.0 - r.value,
        method: SeriesMethod::Quadrature,
        terms_used: r.intervals,
        error_bound: r.error_estimate + inner * (1.0 - x),
    })
}

/// `P{|J| ≤ y}` under `μₖ`, for `y ∈ [0, 1/(6√3)]`. On the series branch
/// the truncation error is also kept below one ulp of the value, so small
/// probabilities come out with full relative precision.
pub fn cdf_absj(k: f64, y: f64, tol: f64) -> Result<SeriesEvaluation> {
    check_k(k)?;
    check_tol(tol)?;
    let x = scaled(y)?;
    if x == 0.0 || x == 1.0 {
        return Ok(SeriesEvaluation {
            value: x,
            method: SeriesMethod::SeriesNear0,
            terms_used: 0,
            error_bound: 0.0,
        });
    }
    if x <= SERIES_SWITCH {
        Ok(cdf_near_zero(k, x, tol))
    } else {
        cdf_upper(k, x, tol)
    }
}

/// `P{|J| ≤ y}` by direct quadrature of `f₀` over `[0, x]`, substituting
/// `s = x w^{1/(2k−1)}` to absorb the `s^{2k−2}` endpoint behaviour.
pub fn cdf_absj_quadrature(k: f64, y: f64, tol: f64) -> Result<SeriesEvaluation> {
    check_k(k)?;
    check_tol(tol)?;
    let x = scaled(y)?;
    if x == 0.0 {
        return Ok(SeriesEvaluation {
            value: 0.0,
            method: SeriesMethod::Quadrature,
            terms_used: 0,
            error_bound: 0.0,
        });
    }
    let p = 1.0 / (2.0 * k - 1.0);
    let inner = 0.01 * tol;
    let integrand = |w: f64| {
        let s = x * w.powf(p);
        if s <= 0.0 {
            return 0.0;
        }
        let d = density_absj(k, s.min(1.0), inner)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        d * x * p * w.powf(p - 1.0)
    };
    let r = integrate(integrand, 0.0, 1.0, Tolerance::absolute(0.5 * tol))?;
    Ok(SeriesEvaluation {
        value: r.value,
        method: SeriesMethod::Quadrature,
        terms_used: r.intervals,
        error_bound: r.error_estimate + inner * x,
    })
}

/// Ratio of the `|J|` densities under `μ₁` and under the flat measure on
/// ℬ₃ restricted to 𝒰₃ (weight `8π²/105` times the `μ₃/₂` density).
pub fn likelihood_ratio_at(y: f64) -> Result<f64> {
    let x = scaled(y)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain("y", format!("{y} not in (0, 1/(6 sqrt 3))")));
    }
    let haar = density_absj(1.0, x, DEFAULT_TOL)?.value;
    let flat = density_absj(1.5, x, DEFAULT_TOL)?.value;
    Ok(haar / (volume_ratio() * flat))
}

#[allow(dead_code)]
fn leading_ratio(y: f64) -> f64 {
    8.0 * PI / (volume_ratio() * 840.0 * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn constants() {
        assert!(rel(c_k(1.0).unwrap(), 4.0 * PI * 3f64.sqrt() / 27.0) < 5e-14);
        assert!(rel(J_MAX, 1.0 / (6.0 * 3f64.sqrt())) < 1e-15);
        assert!(c_k(0.5).is_err());
    }

    #[test]
    fn lemma_value() {
        let r = lemma_integral(1e-12).unwrap();
        assert!((r.value - 3.0).abs() < 1e-10);
    }

    #[test]
    fn density_reference_values() {
        let cases = [
            (1.0, 0.1, 1.978154034616024),
            (1.0, 0.5, 0.920894491963473),
            (1.0, 0.75, 0.428091318595100),
            (1.0, 0.9, 0.164963500026295),
            (1.5, 0.1, 0.636191196012758),
            (1.5, 0.5, 1.480837583908182),
            (1.5, 0.75, 1.032583622965539),
            (1.5, 0.9, 0.477483007335652),
        ];
        for (k, x, v) in cases {
            for method in [
                SeriesMethod::SeriesNear0,
                SeriesMethod::SeriesNear1,
                SeriesMethod::Quadrature,
            ] {
                let r = density_absj_with(k, x, 1e-13, method).unwrap();
                assert!(rel(r.value, v) < 1e-11, "{method} k={k} x={x}: {}", r.value);
            }
            let auto = density_absj(k, x, 1e-14).unwrap();
            assert!(rel(auto.value, v) < 1e-13, "k={k} x={x}");
            assert!(auto.error_bound < 1e-13);
        }
    }

    #[test]
    fn density_endpoints() {
        let small = density_absj(1.0, 1e-12, 1e-14).unwrap().value;
        assert!(rel(small, 3.0 * c_k(1.0).unwrap()) < 1e-9);
        assert_eq!(density_absj(1.0, 1.0, 1e-14).unwrap().value, 0.0);
        // slope at x = 1 is −2c₁ for k = 1
        let h = 1e-6;
        let near = density_absj(1.0, 1.0 - h, 1e-14).unwrap().value;
        assert!(rel(near / h, 2.0 * c_k(1.0).unwrap()) < 1e-5);
        let y = 1e-12;
        assert!(rel(jarlskog_density(1.0, y, 1e-14).unwrap().value, 8.0 * PI) < 1e-9);
        assert!(density_absj(1.0, 0.0, 1e-14).is_err());
        assert!(density_absj(1.0, 1.1, 1e-14).is_err());
    }

    #[test]
    fn cdf_reference_values() {
        let cases = [
            (1.0, 3.08e-5, 7.735_786_755_425_409e-4),
            (1.0, 1e-4, 2.508_465_869_989_225e-3),
            (1.5, 3.08e-5, 3.980_841_760_298_073_4e-7),
            (1.0, 0.01, 0.225_343_457_577_392_88),
            (1.5, 0.01, 0.036_388_335_950_847_42),
            (2.0, 0.02, 0.035_884_616_097_195_47),
        ];
        for (k, y, v) in cases {
            let r = cdf_absj(k, y, 1e-15).unwrap();
            assert!(rel(r.value, v) < 1e-12, "k={k} y={y}: {}", r.value);
            let q = cdf_absj_quadrature(k, y, 1e-14).unwrap();
            assert!(
                rel(q.value, v) < 1e-8,
                "quadrature k={k} y={y}: {}",
                q.value
            );
        }
    }

    #[test]
    fn cdf_endpoints_and_branches() {
        for k in [0.75, 1.0, 1.5, 2.0] {
            assert_eq!(cdf_absj(k, 0.0, 1e-14).unwrap().value, 0.0);
            assert_eq!(cdf_absj(k, J_MAX, 1e-14).unwrap().value, 1.0);
            let y = SERIES_SWITCH / (6.0 * 3f64.sqrt());
            let series = cdf_near_zero(k, SERIES_SWITCH, 1e-15).value;
            let upper = cdf_upper(k, SERIES_SWITCH, 1e-14).unwrap().value;
            assert!((series - upper).abs() < 1e-12, "k={k}");
            assert!((cdf_absj(k, y, 1e-14).unwrap().value - series).abs() < 1e-12);
        }
        assert!(cdf_absj(1.0, -1e-3, 1e-14).is_err());
        assert!(cdf_absj(1.0, 0.2, 1e-14).is_err());
    }

    #[test]
    fn likelihood_ratio() {
        let r = likelihood_ratio_at(J_OBS.value).unwrap();
        assert!(rel(r, 1291.842070551098) < 1e-10);
        // leading behaviour 8π / ((8π²/105)·840y) at small y
        let y = 1e-9;
        assert!(rel(likelihood_ratio_at(y).unwrap(), leading_ratio(y)) < 1e-3);
        assert!(likelihood_ratio_at(0.0).is_err());
        assert!(likelihood_ratio_at(J_MAX).is_err());
    }
}
