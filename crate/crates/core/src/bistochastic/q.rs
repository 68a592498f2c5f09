use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::exact::Polynomial;
use super::matrix::{BVector, BistochasticMatrix, Scalar};
use crate::{Error, Rational, Real, Result};

/// `Q(b) = 4 b₁b₂b₃b₄ − (b₁+b₂+b₃+b₄ − 1 − b₁b₄ − b₂b₃)²`.
///
/// `Q = 16 A²` where `A` is the area of the unitarity triangle, and
/// `Q = 4 J²` for the Jarlskog invariant of any unitary witness.
#[inline]
pub fn q_of<T: Scalar>(b: &BVector<T>) -> T {
    let BVector { b1, b2, b3, b4 } = *b;
    let four = T::one() + T::one() + T::one() + T::one();
    let r = b1 + b2 + b3 + b4 - T::one() - b1 * b4 - b2 * b3;
    four * b1 * b2 * b3 * b4 - r * r
}

/// `Q` as an exact polynomial in `(b₁,b₂,b₃,b₄)`.
pub fn q_polynomial() -> Polynomial {
    let b: Vec<Polynomial> = (0..4).map(|i| Polynomial::variable(4, i)).collect();
    let one = Polynomial::constant(4, Rational::from_integer(1));
    let r = b[0].clone() + b[1].clone() + b[2].clone() + b[3].clone()
        - one
        - b[0].clone() * b[3].clone()
        - b[1].clone() * b[2].clone();
    let quartic = (b[0].clone() * b[1].clone() * b[2].clone() * b[3].clone())
        .scale(Rational::from_integer(4));
    quartic - r.clone() * r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StochasticityClass {
    /// `Q > tol`: a complex unitary witness exists and none is real.
    Unistochastic,
    /// `|Q| ≤ tol`: boundary of 𝒰₃, witnessed by a real orthogonal matrix.
    Orthostochastic,
    /// `Q < -tol`: the three links cannot close into a triangle.
    NotUnistochastic,
}

impl StochasticityClass {
    pub fn is_unistochastic(self) -> bool {
        !matches!(self, StochasticityClass::NotUnistochastic)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnistochasticityVerdict<T> {
    pub q_value: T,
    pub class: StochasticityClass,
    /// Links of the column-1/column-2 unitarity triangle.
    pub link_lengths: [T; 3],
}

/// Classifies a `Q` value with the scalar's tolerance.
pub fn class_of_q<T: Scalar>(q: T) -> StochasticityClass {
    let tol = T::classification_tolerance();
    if q > tol {
        StochasticityClass::Unistochastic
    } else if q < T::zero() - tol {
        StochasticityClass::NotUnistochastic
    } else {
        StochasticityClass::Orthostochastic
    }
}

pub fn classify<T: Real + Scalar>(m: &BistochasticMatrix<T>) -> UnistochasticityVerdict<T> {
    let q = q_of(&m.bvec());
    UnistochasticityVerdict {
        q_value: q,
        class: class_of_q(q),
        link_lengths: link_lengths(m, LinkPair::Columns(0, 1)),
    }
}

/// Which pair of columns or rows of the unitary the links are formed from.
/// Indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkPair {
    Columns(usize, usize),
    Rows(usize, usize),
}

/// `L_m = √(B_{m i} B_{m j})` for a column pair, or the transposed
/// construction for a row pair.
pub fn link_lengths<T: Real + Scalar>(m: &BistochasticMatrix<T>, pair: LinkPair) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for (k, l) in out.iter_mut().enumerate() {
        let p = match pair {
            LinkPair::Columns(i, j) => m.get(k, i) * m.get(k, j),
            LinkPair::Rows(i, j) => m.get(i, k) * m.get(j, k),
        };
        *l = Float::sqrt(p);
    }
    out
}

/// The six link triples: three column pairs followed by three row pairs.
pub fn all_link_triples<T: Real + Scalar>(m: &BistochasticMatrix<T>) -> [[T; 3]; 6] {
    [
        link_lengths(m, LinkPair::Columns(0, 1)),
        link_lengths(m, LinkPair::Columns(0, 2)),
        link_lengths(m, LinkPair::Columns(1, 2)),
        link_lengths(m, LinkPair::Rows(0, 1)),
        link_lengths(m, LinkPair::Rows(0, 2)),
        link_lengths(m, LinkPair::Rows(1, 2)),
    ]
}

/// Chain-link condition: after sorting, the longest link is at most the sum
/// of the others (within the classification tolerance), so the links can
/// close into a polygon.
pub fn chain_link_feasible<T: Scalar>(lengths: &[T]) -> Result<bool> {
    if lengths.is_empty() {
        return Err(Error::domain("lengths", "empty sequence"));
    }
    if let Some(bad) = lengths.iter().find(|l| !(**l >= T::zero())) {
        return Err(Error::domain("lengths", format!("negative length {bad:?}")));
    }
    let mut longest = lengths[0];
    let mut total = T::zero();
    for &l in lengths {
        total = total + l;
        if l > longest {
            longest = l;
        }
    }
    Ok(longest <= total - longest + T::classification_tolerance())
}

/// Hilbert–Schmidt distance `√Tr (A−B)(A−B)ᵀ`.
pub fn hilbert_schmidt_distance<T: Real + Scalar>(
    a: &BistochasticMatrix<T>,
    b: &BistochasticMatrix<T>,
) -> T {
    let mut s = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            let d = a.get(i, j) - b.get(i, j);
            s = s + d * d;
        }
    }
    Float::sqrt(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bistochastic::NamedMatrix;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn q_exact_at_named_points() {
        let schur = NamedMatrix::Schur.matrix();
        assert_eq!(q_of(&schur.bvec()), r(-1, 16));
        let w = NamedMatrix::W.matrix();
        assert_eq!(q_of(&w.bvec()), r(1, 27));
        assert_eq!(q_of(&NamedMatrix::Identity.matrix().bvec()), r(0, 1));
        let quarter = BVector::new(r(1, 4), r(1, 4), r(1, 4), r(1, 4)).unwrap();
        assert_eq!(q_of(&quarter), r(0, 1));
    }

    #[test]
    fn quarter_point_has_degenerate_triangle() {
        let m = BVector::new(0.25, 0.25, 0.25, 0.25).unwrap().matrix();
        let l = link_lengths(&m, LinkPair::Columns(0, 1));
        assert!((l[0] - 0.25).abs() < 1e-15);
        assert!((l[1] - 0.25).abs() < 1e-15);
        assert!((l[2] - 0.5).abs() < 1e-15);
        assert_eq!(classify(&m).class, StochasticityClass::Orthostochastic);
    }

    #[test]
    fn classify_named_matrices() {
        let v = classify(&NamedMatrix::Schur.matrix().to_f64());
        assert_eq!(v.class, StochasticityClass::NotUnistochastic);
        assert_eq!(v.q_value, -1.0 / 16.0);
        let v = classify(&NamedMatrix::W.matrix().to_f64());
        assert_eq!(v.class, StochasticityClass::Unistochastic);
        assert!((v.q_value - 1.0 / 27.0).abs() < 1e-15);
        for p in NamedMatrix::PERMUTATIONS {
            let v = classify(&p.matrix().to_f64());
            assert_eq!(v.class, StochasticityClass::Orthostochastic);
            assert_eq!(v.q_value, 0.0);
        }
    }

    #[test]
    fn chain_links() {
        assert!(chain_link_feasible(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap());
        assert!(!chain_link_feasible(&[0.9, 0.3, 0.3]).unwrap());
        assert!(chain_link_feasible(&[0.3, 0.9, 0.6]).unwrap());
        assert!(chain_link_feasible(&[0.0]).unwrap());
        assert!(chain_link_feasible::<f64>(&[]).is_err());
        assert!(chain_link_feasible(&[0.1, -0.1]).is_err());
        // four links: only the longest against the rest
        assert!(chain_link_feasible(&[0.5, 0.2, 0.2, 0.2]).unwrap());
    }

    #[test]
    fn schur_links_do_not_close() {
        let m = NamedMatrix::Schur.matrix().to_f64();
        for l in all_link_triples(&m) {
            assert!(!chain_link_feasible(&l).unwrap());
        }
    }

    #[test]
    fn polynomial_matches_direct_evaluation() {
        let p = q_polynomial();
        let b = [r(1, 5), r(2, 7), r(1, 3), r(3, 11)];
        let bv = BVector::new(b[0], b[1], b[2], b[3]).unwrap();
        assert_eq!(p.eval(&b), q_of(&bv));
    }
}
