use std::fmt::Debug;

use num_traits::{Num, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::{Error, Rational, Result};

/// Scalar usable in the bistochastic data model: the floating-point types
/// and exact rationals.
pub trait Scalar: Num + Copy + PartialOrd + Debug + ToPrimitive {
    /// Negative entries down to `-construction_slack()` are clamped to zero.
    fn construction_slack() -> Self;
    /// Allowed deviation of a row or column sum from one.
    fn sum_tolerance() -> Self;
    /// `|Q|` at or below this value classifies as orthostochastic.
    fn classification_tolerance() -> Self;
}

impl Scalar for f64 {
    fn construction_slack() -> Self {
        1e-12
    }
    fn sum_tolerance() -> Self {
        1e-10
    }
    fn classification_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn construction_slack() -> Self {
        1e-6
    }
    fn sum_tolerance() -> Self {
        1e-5
    }
    fn classification_tolerance() -> Self {
        1e-6
    }
}

impl Scalar for Rational {
    fn construction_slack() -> Self {
        Rational::from_integer(0)
    }
    fn sum_tolerance() -> Self {
        Rational::from_integer(0)
    }
    fn classification_tolerance() -> Self {
        Rational::from_integer(0)
    }
}

fn abs<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        T::zero() - x
    } else {
        x
    }
}

/// Coordinates of a point of ℬ₃: the upper-left 2×2 minor of the matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BVector<T> {
    pub b1: T,
    pub b2: T,
    pub b3: T,
    pub b4: T,
}

impl<T: Scalar> BVector<T> {
    /// Validated constructor: all nine entries of the induced matrix must be
    /// nonnegative (up to the scalar's construction slack).
    pub fn new(b1: T, b2: T, b3: T, b4: T) -> Result<Self> {
        let b = Self::new_unchecked(b1, b2, b3, b4);
        b.check()?;
        Ok(b)
    }

    pub const fn new_unchecked(b1: T, b2: T, b3: T, b4: T) -> Self {
        BVector { b1, b2, b3, b4 }
    }

    pub fn from_array(a: [T; 4]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.b1, self.b2, self.b3, self.b4]
    }

    /// The nine entries of the induced matrix, row-major.
    pub fn entries(&self) -> [[T; 3]; 3] {
        let one = T::one();
        let BVector { b1, b2, b3, b4 } = *self;
        [
            [b1, b2, one - b1 - b2],
            [b3, b4, one - b3 - b4],
            [one - b1 - b3, one - b2 - b4, b1 + b2 + b3 + b4 - one],
        ]
    }

    /// Whether every induced entry is `>= -slack`.
    pub fn is_valid(&self) -> bool {
        self.check().is_ok()
    }

    fn check(&self) -> Result<()> {
        let slack = T::construction_slack();
        let floor = T::zero() - slack;
        for (i, row) in self.entries().iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                // NaN fails the comparison as well.
                if !(v >= floor) {
                    return Err(Error::InvalidBVector(format!(
                        "entry ({},{}) = {:?} is negative",
                        i + 1,
                        j + 1,
                        v
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn map<U, F: Fn(T) -> U>(&self, f: F) -> BVector<U> {
        BVector {
            b1: f(self.b1),
            b2: f(self.b2),
            b3: f(self.b3),
            b4: f(self.b4),
        }
    }

    pub fn to_f64(&self) -> BVector<f64> {
        self.map(|v| v.to_f64().unwrap_or(f64::NAN))
    }

    pub fn matrix(&self) -> BistochasticMatrix<T> {
        BistochasticMatrix::from_b(*self)
    }
}

/// A 3×3 matrix with nonnegative entries and unit row and column sums.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BistochasticMatrix<T> {
    entries: [[T; 3]; 3],
}

impl<T: Scalar> BistochasticMatrix<T> {
    /// Builds a matrix from rows. Entries in `[-slack, 0)` are clamped to zero;
    /// sums are checked against the scalar's tolerance and never adjusted.
    pub fn from_rows(rows: [[T; 3]; 3]) -> Result<Self> {
        let slack = T::construction_slack();
        let mut entries = rows;
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if !(*v >= T::zero() - slack) {
                    return Err(Error::NotBistochastic(format!(
                        "entry ({},{}) = {:?} is negative",
                        i + 1,
                        j + 1,
                        *v
                    )));
                }
                if *v < T::zero() {
                    *v = T::zero();
                }
            }
        }
        let m = BistochasticMatrix { entries };
        m.check_sums()?;
        Ok(m)
    }

    /// Builds the matrix induced by a b-vector.
    pub fn from_b(b: BVector<T>) -> Self {
        let mut entries = b.entries();
        for v in entries.iter_mut().flatten() {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        BistochasticMatrix { entries }
    }

    fn check_sums(&self) -> Result<()> {
        let tol = T::sum_tolerance();
        for i in 0..3 {
            let row = self.entries[i][0] + self.entries[i][1] + self.entries[i][2];
            let col = self.entries[0][i] + self.entries[1][i] + self.entries[2][i];
            if abs(row - T::one()) > tol {
                return Err(Error::NotBistochastic(format!(
                    "row {} sums to {:?}",
                    i + 1,
                    row
                )));
            }
            if abs(col - T::one()) > tol {
                return Err(Error::NotBistochastic(format!(
                    "column {} sums to {:?}",
                    i + 1,
                    col
                )));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[[T; 3]; 3] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i][j]
    }

    pub fn bvec(&self) -> BVector<T> {
        let e = &self.entries;
        BVector::new_unchecked(e[0][0], e[0][1], e[1][0], e[1][1])
    }

    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        let mut t = *e;
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = e[j][i];
            }
        }
        BistochasticMatrix { entries: t }
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: [usize; 3]) -> Self {
        let e = &self.entries;
        BistochasticMatrix {
            entries: [e[perm[0]], e[perm[1]], e[perm[2]]],
        }
    }

    /// Column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_cols(&self, perm: [usize; 3]) -> Self {
        let e = &self.entries;
        let mut out = *e;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = e[i][perm[j]];
            }
        }
        BistochasticMatrix { entries: out }
    }

    /// All 72 images under row permutations, column permutations and
    /// transposition.
    pub fn symmetry_images(&self) -> Vec<Self> {
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut out = Vec::with_capacity(72);
        for base in [*self, self.transpose()] {
            for r in PERMS {
                for c in PERMS {
                    out.push(base.permute_rows(r).permute_cols(c));
                }
            }
        }
        out
    }

    pub fn map<U: Scalar, F: Fn(T) -> U>(&self, f: F) -> BistochasticMatrix<U> {
        let mut out = [[U::zero(); 3]; 3];
        for (i, row) in self.entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out[i][j] = f(v);
            }
        }
        BistochasticMatrix { entries: out }
    }

    pub fn to_f64(&self) -> BistochasticMatrix<f64> {
        self.map(|v| v.to_f64().unwrap_or(f64::NAN))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let d = abs(self.entries[i][j] - other.entries[i][j]);
                if d > m {
                    m = d;
                }
            }
        }
        m
    }
}

impl BistochasticMatrix<f64> {
    /// Alternately rescales rows and columns (Sinkhorn iteration) until all
    /// sums are within tolerance. Only used on explicit request.
    pub fn from_rows_renormalized(rows: [[f64; 3]; 3], max_iterations: usize) -> Result<Self> {
        let mut e = rows;
        for v in e.iter_mut().flatten() {
            if *v < 0.0 && *v >= -f64::construction_slack() {
                *v = 0.0;
            }
            if !(*v >= 0.0) {
                return Err(Error::NotBistochastic(format!("negative entry {v}")));
            }
        }
        for _ in 0..max_iterations {
            for row in e.iter_mut() {
                let s: f64 = row.iter().sum();
                if s <= 0.0 {
                    return Err(Error::NotBistochastic("zero row".into()));
                }
                row.iter_mut().for_each(|v| *v /= s);
            }
            for j in 0..3 {
                let s = e[0][j] + e[1][j] + e[2][j];
                if s <= 0.0 {
                    return Err(Error::NotBistochastic("zero column".into()));
                }
                (0..3).for_each(|i| e[i][j] /= s);
            }
            if let Ok(m) = Self::from_rows(e) {
                if m.check_sums_strict() {
                    return Ok(m);
                }
            }
        }
        Self::from_rows(e)
    }

    fn check_sums_strict(&self) -> bool {
        (0..3).all(|i| {
            let r: f64 = self.entries[i].iter().sum();
            let c: f64 = (0..3).map(|k| self.entries[k][i]).sum();
            (r - 1.0).abs() <= 1e-14 && (c - 1.0).abs() <= 1e-14
        })
    }
}

/// Matrix JSON input: exactly one of `rows` (3×3) or `b` (4 numbers).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<[[f64; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 4]>,
}

impl MatrixInput {
    pub fn from_matrix(m: &BistochasticMatrix<f64>) -> Self {
        MatrixInput {
            rows: Some(*m.entries()),
            b: None,
        }
    }

    pub fn into_matrix(self) -> Result<BistochasticMatrix<f64>> {
        match (self.rows, self.b) {
            (Some(rows), None) => BistochasticMatrix::from_rows(rows),
            (None, Some(b)) => Ok(BVector::from_array(b)?.matrix()),
            (Some(_), Some(_)) => Err(Error::Json(
                "keys \"rows\" and \"b\" are mutually exclusive".into(),
            )),
            (None, None) => Err(Error::Json("expected key \"rows\" or \"b\"".into())),
        }
    }
}
