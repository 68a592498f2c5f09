use std::fmt;
use std::str::FromStr;

use super::matrix::BistochasticMatrix;
use crate::{Error, Rational, Real};

/// Distinguished points of ℬ₃, all with exact rational entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedMatrix {
    /// Flat (van der Waerden) matrix, all entries 1/3.
    W,
    /// `(P + P²)/2`, the bistochastic matrix farthest from 𝒰₃.
    Schur,
    Identity,
    /// Cyclic shift with ones at (1,2), (2,3), (3,1).
    P,
    P2,
    P12,
    P13,
    P23,
}

impl NamedMatrix {
    pub const ALL: [NamedMatrix; 8] = [
        NamedMatrix::W,
        NamedMatrix::Schur,
        NamedMatrix::Identity,
        NamedMatrix::P,
        NamedMatrix::P2,
        NamedMatrix::P12,
        NamedMatrix::P13,
        NamedMatrix::P23,
    ];

    /// The six vertices of ℬ₃: the even triple first, then the transpositions.
    pub const PERMUTATIONS: [NamedMatrix; 6] = [
        NamedMatrix::Identity,
        NamedMatrix::P,
        NamedMatrix::P2,
        NamedMatrix::P12,
        NamedMatrix::P13,
        NamedMatrix::P23,
    ];

    /// Column index of the unit entry in each row, for permutations.
    pub fn permutation(self) -> Option<[usize; 3]> {
        match self {
            NamedMatrix::Identity => Some([0, 1, 2]),
            NamedMatrix::P => Some([1, 2, 0]),
            NamedMatrix::P2 => Some([2, 0, 1]),
            NamedMatrix::P12 => Some([1, 0, 2]),
            NamedMatrix::P13 => Some([2, 1, 0]),
            NamedMatrix::P23 => Some([0, 2, 1]),
            NamedMatrix::W | NamedMatrix::Schur => None,
        }
    }

    pub fn matrix(self) -> BistochasticMatrix<Rational> {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        let rows = match self {
            NamedMatrix::W => [[Rational::new(1, 3); 3]; 3],
            NamedMatrix::Schur => {
                let h = Rational::new(1, 2);
                [[zero, h, h], [h, zero, h], [h, h, zero]]
            }
            _ => {
                let perm = self.permutation().expect("permutation");
                let mut rows = [[zero; 3]; 3];
                for (i, &j) in perm.iter().enumerate() {
                    rows[i][j] = one;
                }
                rows
            }
        };
        BistochasticMatrix::from_rows(rows).expect("named matrices are bistochastic")
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedMatrix::W => "W",
            NamedMatrix::Schur => "Schur",
            NamedMatrix::Identity => "Identity",
            NamedMatrix::P => "P",
            NamedMatrix::P2 => "P2",
            NamedMatrix::P12 => "P12",
            NamedMatrix::P13 => "P13",
            NamedMatrix::P23 => "P23",
        }
    }
}

impl fmt::Display for NamedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        NamedMatrix::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain("name", format!("unknown matrix `{s}`")))
    }
}

/// Radius `√2/3` of the largest Hilbert–Schmidt ball around `W` contained
/// in 𝒰₃.
pub fn max_ball_radius<T: Real>() -> T {
    T::SQRT_2() / T::c(3.0)
}
