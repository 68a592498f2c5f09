//! Unistochastic matrices of order three.
//!
//! The crate covers the full pipeline around the set 𝒰₃ ⊂ ℬ₃ of 3×3
//! unistochastic matrices:
//!
//! * [`bistochastic`]: the Birkhoff-polytope data model, the `Q` polynomial
//!   deciding unistochasticity, matrix entropies and polytope geometry.
//! * [`unitary`]: the angle parametrization of U(3), the Jarlskog invariant
//!   and reconstruction of a unitary from a unistochastic matrix.
//! * [`sampling`]: seeded samplers for Haar unitaries, the `μₖ` family and
//!   the flat measure on ℬ₃.
//! * [`analytic`]: special functions, normalizations, mean entropies,
//!   moments of `Q` and the distribution of `|J|`.
//! * [`estimators`]: a deterministic parallel Monte Carlo harness and
//!   Kolmogorov–Smirnov machinery.
//!
//! The matrix and unitary types are generic over the scalar. Floating-point
//! code is written against [`Real`] (implemented for `f32` and `f64`), and the
//! polynomial parts of the data model also accept exact rationals, which is
//! how the named matrices and the polytope volume are evaluated exactly.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bistochastic;
pub mod error;
pub mod estimators;
pub mod sampling;
pub mod scalar;
pub mod unitary;

pub use error::{Error, Result};
pub use scalar::Real;

pub use bistochastic::{
    BVector, BistochasticMatrix, NamedMatrix, StochasticityClass, UnistochasticityVerdict,
};
pub use sampling::{MeasureSpec, RngStream};
pub use unitary::{AngleParams, ReconstructionResult, Unitary3};

/// Exact rational scalar used for named matrices and polytope geometry.
pub type Rational = num_rational::Ratio<i128>;

pub type BVector64 = BVector<f64>;
pub type BVector32 = BVector<f32>;
pub type ExactBVector = BVector<Rational>;

pub type Bistochastic64 = BistochasticMatrix<f64>;
pub type Bistochastic32 = BistochasticMatrix<f32>;
pub type ExactBistochastic = BistochasticMatrix<Rational>;

pub type Verdict64 = UnistochasticityVerdict<f64>;

pub type Unitary64 = Unitary3<f64>;
pub type Unitary32 = Unitary3<f32>;
pub type Angles64 = AngleParams<f64>;
pub type Reconstruction64 = ReconstructionResult<f64>;
