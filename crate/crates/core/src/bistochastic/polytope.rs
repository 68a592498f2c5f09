use num_traits::{One, Signed, ToPrimitive, Zero};

use super::exact::Polynomial;
use super::matrix::{BVector, Scalar};
use super::named::NamedMatrix;
use crate::Rational;

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant<T: Scalar, const N: usize>(mut a: [[T; N]; N]) -> T {
    let abs = |x: T| if x < T::zero() { T::zero() - x } else { x };
    let mut det = T::one();
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| {
                abs(a[i][col])
                    .partial_cmp(&abs(a[j][col]))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = T::zero() - det;
        }
        det = det * a[col][col];
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
        }
    }
    det
}

fn vertex(m: NamedMatrix) -> BVector<Rational> {
    m.matrix().bvec()
}

/// Vertices (in b-coordinates) of the three 4-simplices triangulating ℬ₃:
/// the triangle `{𝟙, P, P²}` joined with each side of `{P₁₂, P₁₃, P₂₃}`.
pub fn simplex_vertices() -> [[BVector<Rational>; 5]; 3] {
    use NamedMatrix::*;
    let base = [vertex(Identity), vertex(P), vertex(P2)];
    let sides = [(P12, P13), (P13, P23), (P12, P23)];
    sides.map(|(a, b)| [base[0], base[1], base[2], vertex(a), vertex(b)])
}

fn edge_matrix(s: &[BVector<Rational>; 5]) -> [[Rational; 4]; 4] {
    let v0 = s[0].to_array();
    let mut m = [[Rational::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        let vi = s[i + 1].to_array();
        for (j, x) in row.iter_mut().enumerate() {
            *x = vi[j] - v0[j];
        }
    }
    m
}

/// Volumes of the three simplices in b-coordinates (each `|det|/4!`).
pub fn triangulation_simplex_volumes() -> [Rational; 3] {
    simplex_vertices().map(|s| determinant(edge_matrix(&s)).abs() / Rational::from_integer(24))
}

/// Gram matrix of the images of the b-coordinate unit vectors in ℝ⁹.
pub fn embedding_gram_matrix() -> [[Rational; 4]; 4] {
    let zero = BVector::new_unchecked(
        Rational::zero(),
        Rational::zero(),
        Rational::zero(),
        Rational::zero(),
    );
    let origin = zero.entries();
    let images: Vec<[[Rational; 3]; 3]> = (0..4)
        .map(|i| {
            let mut a = zero.to_array();
            a[i] = Rational::one();
            let e = BVector::new_unchecked(a[0], a[1], a[2], a[3]).entries();
            let mut d = e;
            for r in 0..3 {
                for c in 0..3 {
                    d[r][c] = e[r][c] - origin[r][c];
                }
            }
            d
        })
        .collect();
    let mut g = [[Rational::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = Rational::zero();
            for r in 0..3 {
                for c in 0..3 {
                    s += images[i][r][c] * images[j][r][c];
                }
            }
            g[i][j] = s;
        }
    }
    g
}

pub fn embedding_gram_determinant() -> Rational {
    determinant(embedding_gram_matrix())
}

/// `√det G`, the volume scale from b-coordinates to ℝ⁹.
pub fn embedding_jacobian() -> Rational {
    let det = embedding_gram_determinant();
    assert!(det.is_integer(), "Gram determinant is an integer");
    let n = det.to_integer();
    let root = (n as f64).sqrt().round() as i128;
    assert_eq!(root * root, n, "Gram determinant is a perfect square");
    Rational::from_integer(root)
}

/// The 4-volume of ℬ₃ as a subset of ℝ⁹, exactly.
pub fn birkhoff_volume_exact() -> Rational {
    let b_volume: Rational = triangulation_simplex_volumes().iter().copied().sum();
    b_volume * embedding_jacobian()
}

pub fn birkhoff_volume_triangulation() -> f64 {
    birkhoff_volume_exact().to_f64().unwrap()
}

/// `∫_{ℬ₃} p(b) db` over b-coordinates, exactly, by integrating over each
/// simplex of the triangulation in barycentric form.
pub fn b3_polynomial_integral(p: &Polynomial) -> Rational {
    assert_eq!(p.vars(), 4, "polynomial in (b1, b2, b3, b4)");
    let mut total = Rational::zero();
    for s in simplex_vertices() {
        let v0 = s[0].to_array();
        let edges = edge_matrix(&s);
        // b_j = v0_j + Σ_i λ_i (v_i − v0)_j
        let subs: Vec<Polynomial> = (0..4)
            .map(|j| {
                let mut b = Polynomial::constant(4, v0[j]);
                for (i, e) in edges.iter().enumerate() {
                    b = b + Polynomial::variable(4, i).scale(e[j]);
                }
                b
            })
            .collect();
        let jac = determinant(edges).abs();
        total += jac * p.compose(&subs).integrate_standard_simplex();
    }
    total
}
