//! Unitary matrices of order three and their relation to ℬ₃.
//!
//! `f(U)_ij = |U_ij|²` maps U(3) onto 𝒰₃. The map is invariant under
//! `U ↦ D₁ U D₂` for diagonal unitaries, and [`reconstruct`] inverts it up to
//! that equivalence and complex conjugation, returning the representative
//! with a real nonnegative first row and column and `Im U₂₂ > 0`.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bistochastic::{class_of_q, q_of, BistochasticMatrix, Scalar, StochasticityClass};
use crate::{Error, Real, Result};

/// Smallest entry of `B` for which the phase formulas are used.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

fn unitarity_tolerance<T: Real>() -> T {
    T::c(1e-10).max(T::epsilon() * T::c(1e3))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary3<T> {
    entries: [[Complex<T>; 3]; 3],
}

impl<T: Real> Unitary3<T> {
    /// Validated constructor: `‖U U† − 𝟙‖_max` must not exceed the
    /// unitarity tolerance (1e-10 in double precision).
    pub fn new(entries: [[Complex<T>; 3]; 3]) -> Result<Self> {
        let u = Unitary3 { entries };
        let defect = u.unitarity_defect();
        if !(defect <= unitarity_tolerance()) {
            return Err(Error::NotUnitary {
                defect: defect.to_f64_lossy(),
            });
        }
        Ok(u)
    }

    pub fn new_unchecked(entries: [[Complex<T>; 3]; 3]) -> Self {
        Unitary3 { entries }
    }

    pub fn identity() -> Self {
        let mut e = [[Complex::zero(); 3]; 3];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = Complex::new(T::one(), T::zero());
        }
        Unitary3 { entries: e }
    }

    /// The Fourier matrix `F₃`, `(F₃)_jk = ω^{jk}/√3` with `ω = e^{2πi/3}`.
    pub fn fourier() -> Self {
        let norm = T::one() / T::c(3.0).sqrt();
        let mut e = [[Complex::zero(); 3]; 3];
        for (j, row) in e.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                let angle = T::c(2.0) * T::PI() * T::c(((j * k) % 3) as f64) / T::c(3.0);
                *v = Complex::from_polar(norm, angle);
            }
        }
        Unitary3 { entries: e }
    }

    /// Real matrix promoted to complex; validated for orthogonality.
    pub fn from_real(rows: [[T; 3]; 3]) -> Result<Self> {
        Self::new(rows.map(|r| r.map(|v| Complex::new(v, T::zero()))))
    }

    /// The standard angle parametrization.
    pub fn from_angles(p: &AngleParams<T>) -> Self {
        let (s12, c12) = p.theta12.sin_cos();
        let (s13, c13) = p.theta13.sin_cos();
        let (s23, c23) = p.theta23.sin_cos();
        let ed = Complex::from_polar(T::one(), p.delta);
        let re = |v: T| Complex::new(v, T::zero());
        Unitary3 {
            entries: [
                [re(c12), re(s12 * c13), re(s12 * s13)],
                [
                    re(s12 * c23),
                    re(-c12 * c13 * c23) - ed * (s13 * s23),
                    ed * (c13 * s23) - re(c12 * c23 * s13),
                ],
                [
                    re(s12 * s23),
                    ed * (c23 * s13) - re(c12 * c13 * s23),
                    re(-c12 * s13 * s23) - ed * (c13 * c23),
                ],
            ],
        }
    }

    pub fn entries(&self) -> &[[Complex<T>; 3]; 3] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i][j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = [[Complex::zero(); 3]; 3];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).fold(Complex::zero(), |acc, k| {
                    acc + self.entries[i][k] * other.entries[k][j]
                });
            }
        }
        Unitary3 { entries: e }
    }

    pub fn adjoint(&self) -> Self {
        let mut e = self.entries;
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.entries[j][i].conj();
            }
        }
        Unitary3 { entries: e }
    }

    /// Entrywise complex conjugate; maps to the same bistochastic matrix and
    /// flips the sign of `J`.
    pub fn conj(&self) -> Self {
        Unitary3 {
            entries: self.entries.map(|r| r.map(|v| v.conj())),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut e = self.entries;
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.entries[j][i];
            }
        }
        Unitary3 { entries: e }
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: [usize; 3]) -> Self {
        let e = &self.entries;
        Unitary3 {
            entries: [e[perm[0]], e[perm[1]], e[perm[2]]],
        }
    }

    /// Column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_cols(&self, perm: [usize; 3]) -> Self {
        let mut out = self.entries;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.entries[i][perm[j]];
            }
        }
        Unitary3 { entries: out }
    }

    /// `D₁ U D₂` with `D₁ = diag(e^{iα})`, `D₂ = diag(e^{iβ})`.
    pub fn rephase(&self, alpha: [T; 3], beta: [T; 3]) -> Self {
        let mut out = self.entries;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = *v * Complex::from_polar(T::one(), alpha[i] + beta[j]);
            }
        }
        Unitary3 { entries: out }
    }

    pub fn scale_phase(&self, alpha: T) -> Self {
        self.rephase([alpha; 3], [T::zero(); 3])
    }

    /// `‖U U† − 𝟙‖_max`.
    pub fn unitarity_defect(&self) -> T {
        let p = self.mul(&self.adjoint());
        let mut m = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { T::one() } else { T::zero() };
                let d = (p.entries[i][j] - Complex::new(target, T::zero())).norm();
                if d > m || d.is_nan() {
                    m = d;
                }
            }
        }
        m
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> T {
        self.entries
            .iter()
            .flatten()
            .fold(T::zero(), |m, v| m.max(v.im.abs()))
    }

    /// `J = Im(U₁₁ U₂₂ U₁₂* U₂₁*)`.
    pub fn jarlskog(&self) -> T {
        let e = &self.entries;
        (e[0][0] * e[1][1] * e[0][1].conj() * e[1][0].conj()).im
    }

    /// Areas of the six unitarity triangles (column pairs then row pairs).
    pub fn unitarity_triangle_areas(&self) -> [T; 6] {
        let e = &self.entries;
        let half = T::c(0.5);
        let col = |a: usize, b: usize| {
            let z1 = e[0][a] * e[0][b].conj();
            let z2 = e[1][a] * e[1][b].conj();
            half * (z1 * z2.conj()).im.abs()
        };
        let row = |a: usize, b: usize| {
            let z1 = e[a][0] * e[b][0].conj();
            let z2 = e[a][1] * e[b][1].conj();
            half * (z1 * z2.conj()).im.abs()
        };
        [
            col(0, 1),
            col(0, 2),
            col(1, 2),
            row(0, 1),
            row(0, 2),
            row(1, 2),
        ]
    }

    /// Representative of `{D₁ U D₂}` with first row and column real and
    /// nonnegative. Rows are rephased by the first column, then columns by
    /// the first row.
    pub fn dephase_canonical(&self) -> Self {
        let phase = |z: Complex<T>| {
            if z.norm() > T::zero() {
                z.arg()
            } else {
                T::zero()
            }
        };
        let alpha = [0, 1, 2].map(|i| -phase(self.entries[i][0]));
        let step = self.rephase(alpha, [T::zero(); 3]);
        let beta = [0, 1, 2].map(|j| -phase(step.entries[0][j]));
        let mut out = step.rephase([T::zero(); 3], beta);
        // the rephased first row and column are real up to rounding
        for k in 0..3 {
            out.entries[k][0] = Complex::new(out.entries[k][0].norm(), T::zero());
            out.entries[0][k] = Complex::new(out.entries[0][k].norm(), T::zero());
        }
        out
    }

    /// Whether the first row and column are real and nonnegative within `tol`.
    pub fn is_canonical(&self, tol: T) -> bool {
        (0..3).all(|k| {
            let a = self.entries[k][0];
            let b = self.entries[0][k];
            a.im.abs() <= tol && b.im.abs() <= tol && a.re >= -tol && b.re >= -tol
        })
    }
}

impl<T: Real + Scalar> Unitary3<T> {
    /// `B_ij = |U_ij|²`, with row and column sums checked.
    pub fn to_bistochastic(&self) -> Result<BistochasticMatrix<T>> {
        BistochasticMatrix::from_rows(self.entries.map(|r| r.map(|v| v.norm_sqr())))
    }
}

/// `(θ₁₂, θ₁₃, θ₂₃, δ)` with `θ ∈ [0, π/2]` and `δ ∈ (−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleParams<T> {
    pub theta12: T,
    pub theta13: T,
    pub theta23: T,
    pub delta: T,
}

impl<T: Real> AngleParams<T> {
    pub fn new(theta12: T, theta13: T, theta23: T, delta: T) -> Result<Self> {
        let half_pi = T::FRAC_PI_2();
        for (name, v) in [
            ("theta12", theta12),
            ("theta13", theta13),
            ("theta23", theta23),
        ] {
            if !(v >= T::zero() && v <= half_pi) {
                return Err(Error::domain(name, format!("{v} not in [0, pi/2]")));
            }
        }
        // δ = −π is accepted as the same point as δ = π
        if !(delta >= -T::PI() && delta <= T::PI()) {
            return Err(Error::domain("delta", format!("{delta} not in (-pi, pi]")));
        }
        Ok(AngleParams {
            theta12,
            theta13,
            theta23,
            delta,
        })
    }
}

/// `J = −c₁₂ c₂₃ c₁₃ s₁₂² s₂₃ s₁₃ sin δ`.
pub fn jarlskog_from_angles<T: Real>(p: &AngleParams<T>) -> T {
    let (s12, c12) = p.theta12.sin_cos();
    let (s13, c13) = p.theta13.sin_cos();
    let (s23, c23) = p.theta23.sin_cos();
    -c12 * c23 * c13 * s12 * s12 * s23 * s13 * p.delta.sin()
}

/// The four interior phases of a reconstructed unitary, in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phases<T> {
    pub phi22: T,
    pub phi23: T,
    pub phi32: T,
    pub phi33: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructionResult<T> {
    pub unitary: Unitary3<T>,
    pub phases: Phases<T>,
    /// Set on the orthostochastic boundary, where the result is real
    /// orthogonal and every phase is 0 or π.
    pub degenerate: bool,
}

/// Recovers a unitary `U` with `|U_ij|² = B_ij`.
///
/// In the nondegenerate case the interior angles of the column-(1,2) and
/// column-(1,3) unitarity triangles fix the phases:
/// `φ₂₂ = π − θ₃`, `φ₃₂ = θ₂ − π` and the analogous pair for column 3, with
/// signs `Im U₂₂ > 0`, `Im U₃₂ < 0`, `Im U₂₃ < 0`, `Im U₃₃ > 0`. Angles are
/// evaluated as `atan2(√Q, N)` where `N = 2 L_a L_b cos θ`, since
/// `2 L_a L_b sin θ = 4A = √Q` for every triangle.
pub fn reconstruct<T: Real + Scalar>(m: &BistochasticMatrix<T>) -> Result<ReconstructionResult<T>> {
    let q = q_of(&m.bvec());
    let class = class_of_q(q);
    if class == StochasticityClass::NotUnistochastic {
        return Err(Error::NotUnistochastic {
            q_value: q.to_f64_lossy(),
        });
    }
    let e = m.entries();
    let min_entry = e.iter().flatten().fold(T::infinity(), |a, &b| a.min(b));
    if class == StochasticityClass::Orthostochastic || min_entry <= T::c(DEGENERACY_THRESHOLD) {
        return Ok(reconstruct_orthogonal(m));
    }

    let (b1, b2, b3, b4) = (e[0][0], e[0][1], e[1][0], e[1][1]);
    let (b13, b23, b31, b32, b33) = (e[0][2], e[1][2], e[2][0], e[2][1], e[2][2]);
    let root_q = q.sqrt();
    let pi = T::PI();

    let theta3 = root_q.atan2(b1 * b2 + b3 * b4 - b31 * b32);
    let theta2 = root_q.atan2(b1 * b2 + b31 * b32 - b3 * b4);
    let theta3_c = root_q.atan2(b1 * b13 + b3 * b23 - b31 * b33);
    let theta2_c = root_q.atan2(b1 * b13 + b31 * b33 - b3 * b23);
    let phases = Phases {
        phi22: pi - theta3,
        phi32: theta2 - pi,
        phi23: theta3_c - pi,
        phi33: pi - theta2_c,
    };

    let modulus = e.map(|r| r.map(|v| v.sqrt()));
    let mut u = modulus.map(|r| r.map(|v| Complex::new(v, T::zero())));
    u[1][1] = Complex::from_polar(modulus[1][1], phases.phi22);
    u[1][2] = Complex::from_polar(modulus[1][2], phases.phi23);
    u[2][1] = Complex::from_polar(modulus[2][1], phases.phi32);
    u[2][2] = Complex::from_polar(modulus[2][2], phases.phi33);
    Ok(ReconstructionResult {
        unitary: Unitary3::new_unchecked(u),
        phases,
        degenerate: false,
    })
}

/// Boundary case: among the 16 sign patterns of the lower-right 2×2 block
/// (first row and column kept nonnegative) pick the first with the smallest
/// orthogonality defect. The tight triangle inequality determines which
/// links reverse, and the search finds exactly that pattern.
fn reconstruct_orthogonal<T: Real + Scalar>(m: &BistochasticMatrix<T>) -> ReconstructionResult<T> {
    let modulus = m.entries().map(|r| r.map(|v| v.sqrt()));
    let mut best: Option<(T, Unitary3<T>, [bool; 4])> = None;
    for pattern in 0u8..16 {
        let flips = [0, 1, 2, 3].map(|bit| pattern & (1 << bit) != 0);
        let mut o = modulus;
        for (k, &(i, j)) in [(1, 1), (1, 2), (2, 1), (2, 2)].iter().enumerate() {
            if flips[k] {
                o[i][j] = -o[i][j];
            }
        }
        let u = Unitary3::new_unchecked(o.map(|r| r.map(|v| Complex::new(v, T::zero()))));
        let defect = u.unitarity_defect();
        if best.as_ref().is_none_or(|(d, _, _)| defect < *d) {
            best = Some((defect, u, flips));
        }
    }
    let (_, unitary, flips) = best.expect("sixteen candidates");
    let phase = |f: bool| if f { T::PI() } else { T::zero() };
    ReconstructionResult {
        unitary,
        phases: Phases {
            phi22: phase(flips[0]),
            phi23: phase(flips[1]),
            phi32: phase(flips[2]),
            phi33: phase(flips[3]),
        },
        degenerate: true,
    }
}

/// Complex matrix JSON: `{"re": [[..];3], "im": [[..];3]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixJson {
    pub re: [[f64; 3]; 3],
    pub im: [[f64; 3]; 3],
}

impl From<&Unitary3<f64>> for ComplexMatrixJson {
    fn from(u: &Unitary3<f64>) -> Self {
        ComplexMatrixJson {
            re: u.entries.map(|r| r.map(|v| v.re)),
            im: u.entries.map(|r| r.map(|v| v.im)),
        }
    }
}

impl ComplexMatrixJson {
    pub fn into_unitary(self) -> Result<Unitary3<f64>> {
        let mut e = [[Complex::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                e[i][j] = Complex::new(self.re[i][j], self.im[i][j]);
            }
        }
        Unitary3::new(e)
    }
}
