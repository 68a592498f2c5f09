//! Seeded samplers for Haar unitaries, the `μₖ` family and the flat measure
//! on ℬ₃.
//!
//! Randomness comes from [`RngStream`] values: a `(seed, stream_index)` pair
//! that deterministically selects a ChaCha8 keystream. Samplers take any
//! `rand::Rng`, so a stream is turned into a generator with
//! [`RngStream::rng`] and then consumed sequentially.
//!
//! Beta variates use `rand_distr::Beta` (Cheng's BB/BC rejection algorithms
//! in rand_distr 0.5). Together with ChaCha8 this is sampling algorithm
//! version [`ALGORITHM_VERSION`]; any change to either bumps the version.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bistochastic::{BVector, BistochasticMatrix};
use crate::unitary::Unitary3;
use crate::{Error, Result};

pub const ALGORITHM_VERSION: u32 = 1;

/// Probability law on ℬ₃ (or U(3)) used for sampling and for analytic
/// references.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MeasureSpec {
    /// Haar measure on U(3); induces `μ₁` on 𝒰₃.
    Haar,
    /// The `μₖ` family on 𝒰₃, `k > 1/2`. `μ₃/₂` is flat on 𝒰₃.
    MuK(f64),
    /// Lebesgue measure on ℬ₃ in the coordinates `(b₁, b₂, b₃, b₄)`.
    FlatB3,
}

impl MeasureSpec {
    pub fn mu_k(k: f64) -> Result<Self> {
        if !(k > 0.5 && k.is_finite()) {
            return Err(Error::domain("k", format!("{k} must be finite and > 1/2")));
        }
        Ok(MeasureSpec::MuK(k))
    }

    /// The `μₖ` exponent of the induced law on 𝒰₃, if any.
    pub fn k(&self) -> Option<f64> {
        match *self {
            MeasureSpec::Haar => Some(1.0),
            MeasureSpec::MuK(k) => Some(k),
            MeasureSpec::FlatB3 => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let MeasureSpec::MuK(k) = *self {
            Self::mu_k(k)?;
        }
        Ok(())
    }

    /// A sampler of b-vectors under this law.
    pub fn sampler(&self, stream: RngStream) -> Result<BSampler> {
        self.validate()?;
        let kind = match *self {
            MeasureSpec::Haar => SamplerKind::Haar,
            MeasureSpec::MuK(k) => SamplerKind::MuK(MuKSampler::new(k)?),
            MeasureSpec::FlatB3 => SamplerKind::Flat,
        };
        Ok(BSampler {
            rng: stream.rng(),
            kind,
        })
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::Haar => write!(f, "haar"),
            MeasureSpec::MuK(k) => write!(f, "mu:{k}"),
            MeasureSpec::FlatB3 => write!(f, "flat-b3"),
        }
    }
}

/// Parses `haar`, `flat-b3` and `mu:K` where `K` is a decimal or a fraction
/// such as `3/2`.
impl FromStr for MeasureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "haar" => return Ok(MeasureSpec::Haar),
            "flat-b3" | "flat" => return Ok(MeasureSpec::FlatB3),
            _ => {}
        }
        let Some(k) = s.strip_prefix("mu:") else {
            return Err(Error::domain(
                "measure",
                format!("unknown measure {s:?}; expected haar, mu:K or flat-b3"),
            ));
        };
        Self::mu_k(parse_real(k)?)
    }
}

fn parse_real(s: &str) -> Result<f64> {
    let bad = || Error::domain("k", format!("cannot parse {s:?} as a number"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            Ok(n / d)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

/// Deterministic stream selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub const fn new(seed: u64, stream_index: u64) -> Self {
        RngStream { seed, stream_index }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// `n` child streams. Children share a key derived from both parent
    /// fields and are told apart by their stream index.
    pub fn split(&self, n: usize) -> Vec<RngStream> {
        let seed = mix(self.seed, self.stream_index);
        (0..n as u64).map(|i| RngStream::new(seed, i)).collect()
    }

    /// The `i`-th child, equal to `self.split(i + 1)[i]`.
    pub fn child(&self, i: u64) -> RngStream {
        RngStream::new(mix(self.seed, self.stream_index), i)
    }
}

pub fn split_stream(rng: RngStream, n: usize) -> Result<Vec<RngStream>> {
    if n == 0 {
        return Err(Error::domain("n", "at least one substream is required"));
    }
    Ok(rng.split(n))
}

/// SplitMix64 finalizer over the pair.
fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Haar-distributed unitary: Gram–Schmidt on the columns of a complex
/// Ginibre matrix, which is the QR factor with positive diagonal in `R`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> Unitary3<f64> {
    loop {
        let mut cols = [[Complex::new(0.0, 0.0); 3]; 3];
        for col in cols.iter_mut() {
            for v in col.iter_mut() {
                *v = Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
            }
        }
        if let Some(q) = gram_schmidt(cols) {
            let mut e = [[Complex::new(0.0, 0.0); 3]; 3];
            for (j, col) in q.iter().enumerate() {
                for (i, &v) in col.iter().enumerate() {
                    e[i][j] = v;
                }
            }
            return Unitary3::new_unchecked(e);
        }
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass; `None` for a
/// numerically singular input (probability zero).
fn gram_schmidt(mut cols: [[Complex<f64>; 3]; 3]) -> Option<[[Complex<f64>; 3]; 3]> {
    let dot = |a: &[Complex<f64>; 3], b: &[Complex<f64>; 3]| {
        a.iter()
            .zip(b)
            .fold(Complex::new(0.0, 0.0), |s, (x, y)| s + x.conj() * y)
    };
    for j in 0..3 {
        for _ in 0..2 {
            for k in 0..j {
                let p = dot(&cols[k], &cols[j]);
                let ck = cols[k];
                for (v, u) in cols[j].iter_mut().zip(ck) {
                    *v -= p * u;
                }
            }
        }
        let norm = dot(&cols[j], &cols[j]).re.sqrt();
        if !(norm > 1e-150) {
            return None;
        }
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Some(cols)
}

/// Precomputed Beta distributions for one value of `k`.
#[derive(Clone, Copy, Debug)]
pub struct MuKSampler {
    k: f64,
    b1: Beta<f64>,
    st: Beta<f64>,
    r: Beta<f64>,
}

impl MuKSampler {
    pub fn new(k: f64) -> Result<Self> {
        MeasureSpec::mu_k(k)?;
        let beta = |a: f64, b: f64| {
            Beta::new(a, b).map_err(|e| Error::domain("k", format!("Beta({a}, {b}): {e}")))
        };
        Ok(MuKSampler {
            k,
            b1: beta(k, 2.0 * k)?,
            st: beta(k, k)?,
            r: beta(k - 0.5, k - 0.5)?,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// The raw coordinates `(b₁, s, t, r)`.
    pub fn sample_coordinates<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 4] {
        let b1 = self.b1.sample(rng);
        let s = self.st.sample(rng);
        let t = self.st.sample(rng);
        let r = 2.0 * self.r.sample(rng) - 1.0;
        [b1, s, t, r]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BVector<f64> {
        let [b1, s, t, r] = self.sample_coordinates(rng);
        b_from_coordinates(b1, s, t, r)
    }
}

/// `b₂ = s(1−b₁)`, `b₃ = t(1−b₁)`,
/// `b₄ = (1−s)(1−t) + b₁st + 2r√(b₁s(1−s)t(1−t))`.
pub fn b_from_coordinates(b1: f64, s: f64, t: f64, r: f64) -> BVector<f64> {
    let cross = (b1 * s * (1.0 - s) * t * (1.0 - t)).max(0.0).sqrt();
    BVector::new_unchecked(
        b1,
        s * (1.0 - b1),
        t * (1.0 - b1),
        (1.0 - s) * (1.0 - t) + b1 * s * t + 2.0 * r * cross,
    )
}

/// One draw from `μₖ`; builds the Beta distributions on every call, so
/// prefer [`MuKSampler`] in loops.
pub fn sample_mu_k<R: Rng + ?Sized>(k: f64, rng: &mut R) -> Result<BVector<f64>> {
    Ok(MuKSampler::new(k)?.sample(rng))
}

/// Uniform point of ℬ₃ by rejection from `[0,1]⁴`, together with the number
/// of proposals used (expected 8).
pub fn sample_flat_b3_counted<R: Rng + ?Sized>(rng: &mut R) -> (BVector<f64>, u64) {
    let mut attempts = 0;
    loop {
        attempts += 1;
        let b = BVector::new_unchecked(
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        );
        if b.entries().iter().flatten().all(|&v| v >= 0.0) {
            return (b, attempts);
        }
    }
}

pub fn sample_flat_b3<R: Rng + ?Sized>(rng: &mut R) -> BVector<f64> {
    sample_flat_b3_counted(rng).0
}

/// `f(U)` for a Haar unitary, as a b-vector.
pub fn sample_haar_b<R: Rng + ?Sized>(rng: &mut R) -> BVector<f64> {
    let u = sample_haar_unitary(rng);
    let e = u.entries();
    BVector::new_unchecked(
        e[0][0].norm_sqr(),
        e[0][1].norm_sqr(),
        e[1][0].norm_sqr(),
        e[1][1].norm_sqr(),
    )
}

/// `f(U)` as a validated matrix.
pub fn haar_bistochastic<R: Rng + ?Sized>(rng: &mut R) -> Result<BistochasticMatrix<f64>> {
    sample_haar_unitary(rng).to_bistochastic()
}

#[derive(Clone, Copy, Debug)]
enum SamplerKind {
    Haar,
    MuK(MuKSampler),
    Flat,
}

/// Stateful b-vector sampler for one measure and one stream.
#[derive(Clone, Debug)]
pub struct BSampler {
    rng: ChaCha8Rng,
    kind: SamplerKind,
}

impl BSampler {
    pub fn next_b(&mut self) -> BVector<f64> {
        match &self.kind {
            SamplerKind::Haar => sample_haar_b(&mut self.rng),
            SamplerKind::MuK(s) => s.sample(&mut self.rng),
            SamplerKind::Flat => sample_flat_b3(&mut self.rng),
        }
    }

    /// The next Haar unitary; `None` unless the measure is `Haar`.
    pub fn next_unitary(&mut self) -> Option<Unitary3<f64>> {
        match self.kind {
            SamplerKind::Haar => Some(sample_haar_unitary(&mut self.rng)),
            _ => None,
        }
    }
}

impl Iterator for BSampler {
    type Item = BVector<f64>;

    fn next(&mut self) -> Option<BVector<f64>> {
        Some(self.next_b())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bistochastic::q_of;

    #[test]
    fn measure_parsing() {
        assert_eq!("haar".parse::<MeasureSpec>().unwrap(), MeasureSpec::Haar);
        assert_eq!(
            "flat-b3".parse::<MeasureSpec>().unwrap(),
            MeasureSpec::FlatB3
        );
        assert_eq!(
            "mu:3/2".parse::<MeasureSpec>().unwrap(),
            MeasureSpec::MuK(1.5)
        );
        assert_eq!(
            "mu:2".parse::<MeasureSpec>().unwrap(),
            MeasureSpec::MuK(2.0)
        );
        assert!("mu:0.5".parse::<MeasureSpec>().is_err());
        assert!("mu:x".parse::<MeasureSpec>().is_err());
        assert!("gauss".parse::<MeasureSpec>().is_err());
        for m in [
            MeasureSpec::Haar,
            MeasureSpec::MuK(1.5),
            MeasureSpec::FlatB3,
        ] {
            assert_eq!(m.to_string().parse::<MeasureSpec>().unwrap(), m);
        }
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a = RngStream::new(42, 0).split(4);
        assert_eq!(a, RngStream::new(42, 0).split(4));
        let draws: Vec<Vec<u64>> = a
            .iter()
            .map(|s| {
                let mut r = s.rng();
                (0..100).map(|_| r.random()).collect()
            })
            .collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(draws[i].iter().zip(&draws[j]).all(|(x, y)| x != y));
            }
        }
        assert_eq!(RngStream::new(42, 0).child(3), a[3]);
        assert_ne!(
            RngStream::new(42, 1).split(1),
            RngStream::new(42, 0).split(1)
        );
        assert!(split_stream(RngStream::new(1, 0), 0).is_err());
    }

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = RngStream::new(7, 0).rng();
        for _ in 0..1000 {
            let u = sample_haar_unitary(&mut rng);
            assert!(u.unitarity_defect() < 1e-14);
        }
    }

    #[test]
    fn mu_k_samples_are_unistochastic() {
        for k in [0.6, 1.0, 1.5, 2.0, 5.0] {
            let s = MuKSampler::new(k).unwrap();
            let mut rng = RngStream::new(11, 0).rng();
            for _ in 0..2000 {
                let b = s.sample(&mut rng);
                assert!(q_of(&b) >= -1e-12);
                assert!(b.is_valid(), "{b:?}");
            }
        }
        assert!(MuKSampler::new(0.5).is_err());
    }

    #[test]
    fn flat_sampler_stays_in_polytope() {
        let mut rng = RngStream::new(3, 0).rng();
        let mut total = 0;
        let n = 20_000;
        for _ in 0..n {
            let (b, attempts) = sample_flat_b3_counted(&mut rng);
            assert!(b.entries().iter().flatten().all(|&v| v >= 0.0));
            total += attempts;
        }
        let rate = n as f64 / total as f64;
        assert!((rate - 0.125).abs() < 0.005, "{rate}");
    }

    #[test]
    fn sampler_iterator_is_reproducible() {
        for m in [
            MeasureSpec::Haar,
            MeasureSpec::MuK(1.5),
            MeasureSpec::FlatB3,
        ] {
            let a: Vec<_> = m.sampler(RngStream::new(5, 2)).unwrap().take(50).collect();
            let b: Vec<_> = m.sampler(RngStream::new(5, 2)).unwrap().take(50).collect();
            assert_eq!(a, b);
        }
        assert!(MeasureSpec::MuK(0.2).sampler(RngStream::new(0, 0)).is_err());
    }
}
