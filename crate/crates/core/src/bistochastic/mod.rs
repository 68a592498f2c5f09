//! Bistochastic 3×3 matrices and the geometry of the Birkhoff polytope ℬ₃.
//!
//! A point of ℬ₃ is addressed by the upper-left 2×2 minor `b = (b₁,b₂,b₃,b₄)`;
//! the remaining five entries follow from the unit row and column sums.

mod entropy;
mod exact;
mod extreme;
mod matrix;
mod named;
mod polytope;
mod q;

pub use entropy::{entropy, generalized_entropy};
pub use exact::Polynomial;
pub use extreme::{extreme_q_search, extreme_q_search_zero_slice, q_reduced, ExtremeQ};
pub use matrix::{BVector, BistochasticMatrix, MatrixInput, Scalar};
pub use named::{max_ball_radius, NamedMatrix};
pub use polytope::{
    b3_polynomial_integral, birkhoff_volume_exact, birkhoff_volume_triangulation,
    embedding_gram_determinant, embedding_gram_matrix, embedding_jacobian, simplex_vertices,
    triangulation_simplex_volumes,
};
pub use q::{
    all_link_triples, chain_link_feasible, class_of_q, classify, hilbert_schmidt_distance,
    link_lengths, q_of, q_polynomial, LinkPair, StochasticityClass, UnistochasticityVerdict,
};
