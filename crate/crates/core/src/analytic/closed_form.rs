//! Normalizations, mean entropies and moments of `Q`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::jarlskog::{
    c_k, cdf_absj, jarlskog_density, likelihood_ratio_at, DEFAULT_TOL, J_MAX, J_OBS,
};
use super::quadrature::{integrate, Tolerance};
use super::special::{digamma_unchecked, log_gamma_unchecked, pochhammer, trigamma_unchecked};
use crate::bistochastic::{
    b3_polynomial_integral, birkhoff_volume_exact, max_ball_radius, q_polynomial,
};
use crate::{Error, Rational, Result};

/// Below this distance from `q = 1` the generalized entropy mean switches
/// to its second-order Taylor expansion.
const Q_TAYLOR_RADIUS: f64 = 1e-5;

pub(crate) fn check_k(k: f64) -> Result<()> {
    if k > 0.5 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("k", format!("{k} must be finite and > 1/2")))
    }
}

fn ln_h(k: f64) -> f64 {
    PI.ln() + 3.0 * log_gamma_unchecked(k) - log_gamma_unchecked(3.0 * k) - (2.0 * k - 1.0).ln()
}

/// Normalization of `μₖ`: `h_k = πΓ(k)³/((2k−1)Γ(3k))`.
pub fn h_k(k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(ln_h(k).exp())
}

/// Fraction of ℬ₃ occupied by 𝒰₃ in the flat measure, `8π²/105`.
pub fn volume_ratio() -> f64 {
    8.0 * PI * PI / 105.0
}

/// `⟨S⟩ₖ = ψ(3k+1) − ψ(k+1)`.
pub fn mean_entropy_mu(k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(digamma_unchecked(3.0 * k + 1.0) - digamma_unchecked(k + 1.0))
}

/// `⟨S_q⟩ₖ = (1 − 3Γ(k+q)Γ(3k)/(Γ(k)Γ(3k+q)))/(q − 1)`, continued to
/// `q = 1` by [`mean_entropy_mu`].
pub fn mean_generalized_entropy_mu(k: f64, q: f64) -> Result<f64> {
    check_k(k)?;
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::domain("q", format!("{q} must be finite and >= 0")));
    }
    let h = q - 1.0;
    if h.abs() < Q_TAYLOR_RADIUS {
        // E(q) = ln(3Γ(k+q)Γ(3k)/(Γ(k)Γ(3k+q))) vanishes at q = 1
        let e1 = digamma_unchecked(k + 1.0) - digamma_unchecked(3.0 * k + 1.0);
        let e2 = trigamma_unchecked(k + 1.0) - trigamma_unchecked(3.0 * k + 1.0);
        return Ok(-(e1 + 0.5 * h * (e2 + e1 * e1)));
    }
    let e = 3f64.ln() + log_gamma_unchecked(k + q) + log_gamma_unchecked(3.0 * k)
        - log_gamma_unchecked(k)
        - log_gamma_unchecked(3.0 * k + q);
    Ok(-e.exp_m1() / h)
}

/// `(1/6)∫₀¹ f(b)(1+5b)(1−b)² db`: the integral over ℬ₃ of any function of
/// a single entry, in b-coordinates.
pub fn b3_integral<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let r = integrate(
        |b| f(b) * (1.0 + 5.0 * b) * (1.0 - b) * (1.0 - b) / 6.0,
        0.0,
        1.0,
        Tolerance::absolute(1e-12),
    )?;
    Ok(r.value)
}

/// Mean Tsallis entropy over ℬ₃ with the flat measure:
/// `2/(q+1) + 4/(q+2) − 9/(q+3) + 4/(q+4)`. Continuous at `q = 1`.
pub fn mean_generalized_entropy_b3(q: f64) -> Result<f64> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::domain("q", format!("{q} must be finite and >= 0")));
    }
    Ok(2.0 / (q + 1.0) + 4.0 / (q + 2.0) - 9.0 / (q + 3.0) + 4.0 / (q + 4.0))
}

/// Mean Shannon entropy over ℬ₃, `53/60`.
pub fn mean_entropy_b3() -> f64 {
    53.0 / 60.0
}

/// `⟨Qⁿ⟩ₖ = h_{k+n}/h_k`.
pub fn q_moments(k: f64, n: u32) -> Result<f64> {
    check_k(k)?;
    if n == 0 {
        return Ok(1.0);
    }
    Ok((ln_h(k + n as f64) - ln_h(k)).exp())
}

/// `⟨Qⁿ⟩ₖ = 3^{−3n}(k−½)(k)ₙ² / ((k+n−½)(k+⅓)ₙ(k+⅔)ₙ)`.
pub fn q_moments_pochhammer(k: f64, n: u32) -> Result<f64> {
    check_k(k)?;
    let kn = pochhammer(k, n);
    Ok(27f64.powi(-(n as i32)) * (k - 0.5) * kn * kn
        / ((k + n as f64 - 0.5) * pochhammer(k + 1.0 / 3.0, n) * pochhammer(k + 2.0 / 3.0, n)))
}

/// First two moments of `Q` under the flat measure on ℬ₃.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BQIntegrals {
    pub mean: f64,
    pub second: f64,
    pub sigma: f64,
    pub mean_exact: Rational,
    pub second_exact: Rational,
}

/// Exact `⟨Q⟩` and `⟨Q²⟩` over ℬ₃ by integrating the polynomials over the
/// triangulation, with `σ_Q = √(⟨Q²⟩ − ⟨Q⟩²)`.
pub fn b3_q_integrals() -> BQIntegrals {
    static CACHE: OnceLock<BQIntegrals> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let q = q_polynomial();
            let volume = birkhoff_volume_exact() / Rational::from_integer(9);
            let mean_exact = b3_polynomial_integral(&q) / volume;
            let second_exact = b3_polynomial_integral(&q.pow(2)) / volume;
            let to_f = |r: &Rational| r.to_f64().expect("finite rational");
            let mean = to_f(&mean_exact);
            let second = to_f(&second_exact);
            BQIntegrals {
                mean,
                second,
                sigma: to_f(&(second_exact - mean_exact * mean_exact)).sqrt(),
                mean_exact,
                second_exact,
            }
        })
        .clone()
}

/// Per-`k` summary of the `μₖ` closed forms. `volume` is the total mass of
/// the unnormalized density in b-coordinates, which equals `h_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormTable {
    pub k: f64,
    pub h_k: f64,
    pub volume: f64,
    pub mean_entropy: f64,
    pub mean_j2: f64,
}

pub fn closed_form_table(k: f64) -> Result<ClosedFormTable> {
    let h = h_k(k)?;
    Ok(ClosedFormTable {
        k,
        h_k: h,
        volume: h,
        mean_entropy: mean_entropy_mu(k)?,
        mean_j2: q_moments(k, 1)? / 4.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedConstant {
    pub name: String,
    pub expression: String,
    pub value: f64,
    pub description: String,
}

/// Every tabulated constant, evaluated by the library routines.
pub fn constants_table() -> Result<Vec<NamedConstant>> {
    let bq = b3_q_integrals();
    let rows: Vec<(&str, &str, f64, &str)> = vec![
        ("b_volume", "1/8", 0.125, "volume of B3 in b-coordinates"),
        (
            "birkhoff_volume",
            "9/8",
            birkhoff_volume_exact().to_f64().unwrap_or(f64::NAN),
            "volume of B3 in the nine-entry embedding",
        ),
        (
            "unistochastic_volume",
            "pi^2/105",
            h_k(1.5)?,
            "volume of U3 in b-coordinates",
        ),
        (
            "volume_ratio",
            "8 pi^2/105",
            volume_ratio(),
            "P{Q >= 0} under the flat measure on B3",
        ),
        ("h_1", "pi/2", h_k(1.0)?, "normalization of mu_1"),
        ("h_3/2", "pi^2/105", h_k(1.5)?, "normalization of mu_3/2"),
        ("h_2", "pi/360", h_k(2.0)?, "normalization of mu_2"),
        (
            "mean_entropy_mu1",
            "5/6",
            mean_entropy_mu(1.0)?,
            "mean entropy under mu_1",
        ),
        (
            "mean_entropy_mu3/2",
            "286/315",
            mean_entropy_mu(1.5)?,
            "mean entropy under mu_3/2",
        ),
        (
            "mean_entropy_mu2",
            "19/20",
            mean_entropy_mu(2.0)?,
            "mean entropy under mu_2",
        ),
        (
            "mean_entropy_b3",
            "53/60",
            mean_entropy_b3(),
            "mean entropy under the flat measure on B3",
        ),
        ("mean_q_mu1", "1/180", q_moments(1.0, 1)?, "<Q> under mu_1"),
        (
            "mean_j2_mu1",
            "1/720",
            q_moments(1.0, 1)? / 4.0,
            "<J^2> under mu_1",
        ),
        (
            "mean_q_mu3/2",
            "3/286",
            q_moments(1.5, 1)?,
            "<Q> under mu_3/2",
        ),
        (
            "mean_j2_mu3/2",
            "3/1144",
            q_moments(1.5, 1)? / 4.0,
            "<J^2> under mu_3/2",
        ),
        (
            "mean_q_b3",
            "1/168",
            bq.mean,
            "<Q> under the flat measure on B3",
        ),
        (
            "second_q_b3",
            "1/5940",
            bq.second,
            "<Q^2> under the flat measure on B3",
        ),
        (
            "sigma_q_b3",
            "sqrt(1/5940 - 1/168^2)",
            bq.sigma,
            "standard deviation of Q on B3",
        ),
        (
            "q_min",
            "-1/16",
            -1.0 / 16.0,
            "minimum of Q on B3, attained at the Schur matrix",
        ),
        (
            "q_max",
            "1/27",
            1.0 / 27.0,
            "maximum of Q on B3, attained at the flat matrix",
        ),
        ("j_max", "1/(6 sqrt 3)", J_MAX, "largest |J| over U(3)"),
        (
            "j2_fourier",
            "1/108",
            1.0 / 108.0,
            "J^2 of the Fourier matrix",
        ),
        (
            "ball_radius",
            "sqrt(2)/3",
            max_ball_radius::<f64>(),
            "radius of the largest Hilbert-Schmidt ball about W inside U3",
        ),
        (
            "c_1",
            "4 pi sqrt(3)/27",
            c_k(1.0)?,
            "normalization of the k = 1 product density",
        ),
        (
            "absj_density_at_zero_mu1",
            "8 pi",
            8.0 * PI,
            "limit of the |J| density under mu_1 as |J| -> 0",
        ),
        (
            "j_obs",
            "3.08e-5",
            J_OBS.value,
            "observed quark-sector Jarlskog invariant",
        ),
        (
            "j_obs_plus",
            "1.6e-6",
            J_OBS.plus,
            "upper uncertainty of j_obs",
        ),
        (
            "j_obs_minus",
            "1.8e-6",
            J_OBS.minus,
            "lower uncertainty of j_obs",
        ),
        (
            "p_absj_leq_jobs_mu1",
            "F_0(6 sqrt 3 j_obs), k = 1",
            cdf_absj(1.0, J_OBS.value, DEFAULT_TOL)?.value,
            "P{|J| <= j_obs} under mu_1",
        ),
        (
            "p_absj_leq_jobs_mu3/2",
            "F_0(6 sqrt 3 j_obs), k = 3/2",
            cdf_absj(1.5, J_OBS.value, DEFAULT_TOL)?.value,
            "P{|J| <= j_obs} under mu_3/2",
        ),
        (
            "likelihood_ratio_jobs",
            "p_1(j_obs)/((8 pi^2/105) p_3/2(j_obs))",
            likelihood_ratio_at(J_OBS.value)?,
            "ratio of |J| densities at j_obs",
        ),
        (
            "absj_density_jobs_mu1",
            "p_1(j_obs)",
            jarlskog_density(1.0, J_OBS.value, DEFAULT_TOL)?.value,
            "|J| density under mu_1 at j_obs",
        ),
    ];
    Ok(rows
        .into_iter()
        .map(|(name, expression, value, description)| NamedConstant {
            name: name.into(),
            expression: expression.into(),
            value,
            description: description.into(),
        })
        .collect())
}
