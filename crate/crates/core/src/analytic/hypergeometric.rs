//! `₂F₁(1/3, 2/3; 1; z)` on `[0, 1)`.
//!
//! For `z ≤ 1/2` the defining power series is summed. Otherwise the
//! logarithmic expansion about `z = 1` is used, with `t = 1 − z`:
//!
//! `F = (√3/2π) Σ cₙ (Aₙ − ln t) tⁿ`, `cₙ = (1/3)ₙ(2/3)ₙ/(n!)²`,
//! `Aₙ = 3 ln 3 − Σ_{j=n+1}^{3n} 3/j`.
//!
//! Both series have positive terms whose successive ratios fall below the
//! expansion variable, which gives the geometric remainder bounds reported
//! in [`SeriesEvaluation::error_bound`].

use super::{SeriesEvaluation, SeriesMethod};
use crate::{Error, Result};

pub const BRANCH_POINT: f64 = 0.5;

const MAX_TERMS: usize = 10_000;

/// `cₙ` coefficients of the power series.
#[derive(Clone, Debug)]
pub(crate) struct Coefficients {
    n: usize,
    c: f64,
    a: f64,
}

impl Coefficients {
    pub(crate) fn new() -> Self {
        Coefficients {
            n: 0,
            c: 1.0,
            a: 3.0 * 3f64.ln(),
        }
    }

    /// `(n, cₙ, Aₙ)` for the current index.
    pub(crate) fn current(&self) -> (usize, f64, f64) {
        (self.n, self.c, self.a)
    }

    pub(crate) fn advance(&mut self) {
        let n = self.n as f64;
        self.c *= (n + 1.0 / 3.0) * (n + 2.0 / 3.0) / ((n + 1.0) * (n + 1.0));
        self.a += 2.0 / (n + 1.0) - 3.0 / (3.0 * n + 1.0) - 3.0 / (3.0 * n + 2.0);
        self.n += 1;
    }
}

/// `√3/(2π) = 1/(Γ(1/3)Γ(2/3))`.
pub(crate) fn log_prefactor() -> f64 {
    3f64.sqrt() / (2.0 * std::f64::consts::PI)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("tol", format!("{tol} must be positive")))
    }
}

/// `₂F₁(1/3, 2/3; 1; z)` within `tol`, choosing the branch by `z`.
pub fn gauss_2f1_onethird(z: f64, tol: f64) -> Result<SeriesEvaluation> {
    check_tol(tol)?;
    if !(0.0..1.0).contains(&z) {
        return Err(Error::domain("z", format!("{z} not in [0, 1)")));
    }
    if z <= BRANCH_POINT {
        Ok(series_near_zero(z, tol))
    } else {
        Ok(series_near_one(1.0 - z, tol))
    }
}

/// `₂F₁(1/3, 2/3; 1; 1 − t)` for `t ∈ (0, 1]`, taking `t` directly so that
/// small `t` loses no precision.
pub fn gauss_2f1_onethird_complement(t: f64, tol: f64) -> Result<SeriesEvaluation> {
    check_tol(tol)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain("t", format!("{t} not in (0, 1]")));
    }
    if t >= 1.0 - BRANCH_POINT {
        Ok(series_near_zero(1.0 - t, tol))
    } else {
        Ok(series_near_one(t, tol))
    }
}

/// Forces the power series branch; valid for `z ∈ [0, 1)`.
pub fn series_near_zero(z: f64, tol: f64) -> SeriesEvaluation {
    let mut coef = Coefficients::new();
    let mut power = 1.0;
    let mut sum = 0.0;
    let mut terms = 0;
    let mut bound = f64::INFINITY;
    while terms < MAX_TERMS {
        let (_, c, _) = coef.current();
        sum += c * power;
        terms += 1;
        coef.advance();
        power *= z;
        bound = coef.current().1 * power / (1.0 - z);
        if bound < 0.1 * tol {
            break;
        }
    }
    SeriesEvaluation {
        value: sum,
        method: SeriesMethod::SeriesNear0,
        terms_used: terms,
        error_bound: bound,
    }
}

/// Forces the logarithmic branch in `t = 1 − z`; valid for `t ∈ (0, 1)`.
pub fn series_near_one(t: f64, tol: f64) -> SeriesEvaluation {
    let pre = log_prefactor();
    let log_t = t.ln();
    let mut coef = Coefficients::new();
    let mut power = 1.0;
    let mut sum = 0.0;
    let mut terms = 0;
    let mut bound = f64::INFINITY;
    while terms < MAX_TERMS {
        let (_, c, a) = coef.current();
        sum += c * (a - log_t) * power;
        terms += 1;
        coef.advance();
        power *= t;
        let (_, c, a) = coef.current();
        bound = pre * c * (a - log_t) * power / (1.0 - t);
        if bound < 0.1 * tol {
            break;
        }
    }
    SeriesEvaluation {
        value: pre * sum,
        method: SeriesMethod::SeriesNear1,
        terms_used: terms,
        error_bound: bound,
    }
}

/// Full-precision value of `₂F₁(1/3, 2/3; 1; 1 − t)` for `t ∈ (0, 1]`.
pub(crate) fn f_complement(t: f64) -> f64 {
    if t >= 1.0 - BRANCH_POINT {
        series_near_zero(1.0 - t, 1e-17).value
    } else {
        series_near_one(t, 1e-17).value
    }
}
