use super::matrix::{BistochasticMatrix, Scalar};
use crate::{Error, Real, Result};

/// `S(B) = −(1/3) Σ B_ij ln B_ij`, the mean Shannon entropy of the rows,
/// with `0 ln 0 = 0`.
pub fn entropy<T: Real + Scalar>(m: &BistochasticMatrix<T>) -> T {
    let mut s = T::zero();
    for &x in m.entries().iter().flatten() {
        if x > T::zero() {
            s = s - x * x.ln();
        }
    }
    s / T::c(3.0)
}

/// `S_q(B) = (1/(3(q−1))) Σ (B_ij − B_ij^q)`; `q = 1` gives [`entropy`].
///
/// Zero entries contribute nothing for every `q`, so `S₀` counts the support.
pub fn generalized_entropy<T: Real + Scalar>(m: &BistochasticMatrix<T>, q: T) -> Result<T> {
    if !(q >= T::zero()) {
        return Err(Error::domain("q", format!("must be >= 0, got {q}")));
    }
    if q == T::one() {
        return Ok(entropy(m));
    }
    let qm1 = q - T::one();
    let mut s = T::zero();
    for &x in m.entries().iter().flatten() {
        if x > T::zero() {
            // x − x^q = −x·expm1((q−1) ln x), free of cancellation near q = 1
            s = s - x * (qm1 * x.ln()).exp_m1();
        }
    }
    Ok(s / (T::c(3.0) * qm1))
}
