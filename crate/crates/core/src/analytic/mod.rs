//! Closed forms for the `μₖ` family and the flat measure on ℬ₃, and the
//! distribution of the Jarlskog invariant.

mod closed_form;
mod hypergeometric;
mod jarlskog;
pub mod quadrature;
mod special;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use closed_form::{
    b3_integral, b3_q_integrals, closed_form_table, constants_table, h_k, mean_entropy_b3,
    mean_entropy_mu, mean_generalized_entropy_b3, mean_generalized_entropy_mu, q_moments,
    q_moments_pochhammer, volume_ratio, BQIntegrals, ClosedFormTable, NamedConstant,
};
pub use hypergeometric::{
    gauss_2f1_onethird, gauss_2f1_onethird_complement, series_near_one, series_near_zero,
    BRANCH_POINT,
};
pub use jarlskog::{
    c_k, cdf_absj, cdf_absj_quadrature, density_absj, density_absj_with, density_f12,
    jarlskog_density, lemma_integral, likelihood_ratio_at, Measurement, DEFAULT_TOL, J_MAX, J_OBS,
    SERIES_SWITCH,
};
pub use special::{digamma, gamma, log_gamma, pochhammer, trigamma};

/// How a [`SeriesEvaluation`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesMethod {
    #[serde(rename = "series-near-0")]
    SeriesNear0,
    #[serde(rename = "series-near-1")]
    SeriesNear1,
    #[serde(rename = "quadrature")]
    Quadrature,
}

impl fmt::Display for SeriesMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesMethod::SeriesNear0 => "series-near-0",
            SeriesMethod::SeriesNear1 => "series-near-1",
            SeriesMethod::Quadrature => "quadrature",
        })
    }
}

/// A value with the method that produced it and a bound on its absolute
/// error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEvaluation {
    pub value: f64,
    pub method: SeriesMethod,
    pub terms_used: usize,
    pub error_bound: f64,
}
