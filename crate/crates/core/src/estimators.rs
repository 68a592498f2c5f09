//! Monte Carlo estimates of the closed forms, and Kolmogorov–Smirnov
//! distances.
//!
//! Samples are drawn in fixed chunks of [`CHUNK`] draws; chunk `c` uses the
//! `c`-th child of `RngStream::new(seed, 0)`. Chunks may run on any number
//! of threads, and their partial statistics are merged in chunk order, so a
//! result depends only on `(measure, statistic, n, seed)`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    b3_q_integrals, cdf_absj, mean_entropy_b3, mean_entropy_mu, mean_generalized_entropy_b3,
    mean_generalized_entropy_mu, q_moments, volume_ratio, DEFAULT_TOL,
};
use crate::bistochastic::{entropy, generalized_entropy, q_of, BVector, BistochasticMatrix};
use crate::sampling::{MeasureSpec, RngStream};
use crate::{Error, Result};

/// Draws per chunk.
pub const CHUNK: usize = 1 << 16;

/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: usize = 100;

/// Quantity averaged over samples of a measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Statistic {
    Q,
    /// `Qⁿ`.
    QPower(u32),
    /// `J² = Q/4`.
    J2,
    Entropy,
    GeneralizedEntropy(f64),
    /// Indicator of `Q ≥ 0`.
    IndicatorQNonneg,
    /// Indicator of `|J| ≤ y`, with `|J| = √Q/2` (taken as 0 when `Q < 0`).
    IndicatorAbsjLeq(f64),
}

impl Statistic {
    pub fn is_indicator(&self) -> bool {
        matches!(
            self,
            Statistic::IndicatorQNonneg | Statistic::IndicatorAbsjLeq(_)
        )
    }

    pub fn evaluate(&self, b: &BVector<f64>) -> f64 {
        let q = q_of(b);
        match *self {
            Statistic::Q => q,
            Statistic::QPower(n) => q.powi(n as i32),
            Statistic::J2 => 0.25 * q,
            Statistic::Entropy => entropy(&BistochasticMatrix::from_b(*b)),
            Statistic::GeneralizedEntropy(s) => {
                generalized_entropy(&BistochasticMatrix::from_b(*b), s).unwrap_or(f64::NAN)
            }
            Statistic::IndicatorQNonneg => f64::from(u8::from(q >= 0.0)),
            Statistic::IndicatorAbsjLeq(y) => f64::from(u8::from(0.5 * q.max(0.0).sqrt() <= y)),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Statistic::GeneralizedEntropy(q) if !(q >= 0.0 && q.is_finite()) => {
                Err(Error::domain("q", format!("{q} must be finite and >= 0")))
            }
            Statistic::IndicatorAbsjLeq(y) if !(y >= 0.0) => {
                Err(Error::domain("y", format!("{y} must be >= 0")))
            }
            _ => Ok(()),
        }
    }

    /// Closed-form expectation under `measure`, when one is known.
    pub fn reference(&self, measure: &MeasureSpec) -> Option<f64> {
        match (measure.k(), *self) {
            (Some(k), Statistic::Q) => q_moments(k, 1).ok(),
            (Some(k), Statistic::QPower(n)) => q_moments(k, n).ok(),
            (Some(k), Statistic::J2) => q_moments(k, 1).ok().map(|m| 0.25 * m),
            (Some(k), Statistic::Entropy) => mean_entropy_mu(k).ok(),
            (Some(k), Statistic::GeneralizedEntropy(q)) => mean_generalized_entropy_mu(k, q).ok(),
            (Some(_), Statistic::IndicatorQNonneg) => Some(1.0),
            (Some(k), Statistic::IndicatorAbsjLeq(y)) => {
                cdf_absj(k, y.min(crate::analytic::J_MAX), DEFAULT_TOL)
                    .ok()
                    .map(|r| r.value)
            }
            (None, Statistic::Q) => Some(b3_q_integrals().mean),
            (None, Statistic::QPower(0)) => Some(1.0),
            (None, Statistic::QPower(1)) => Some(b3_q_integrals().mean),
            (None, Statistic::QPower(2)) => Some(b3_q_integrals().second),
            (None, Statistic::J2) => Some(0.25 * b3_q_integrals().mean),
            (None, Statistic::Entropy) => Some(mean_entropy_b3()),
            (None, Statistic::GeneralizedEntropy(q)) => mean_generalized_entropy_b3(q).ok(),
            (None, Statistic::IndicatorQNonneg) => Some(volume_ratio()),
            (None, _) => None,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Q => write!(f, "Q"),
            Statistic::QPower(n) => write!(f, "Q^{n}"),
            Statistic::J2 => write!(f, "J2"),
            Statistic::Entropy => write!(f, "entropy"),
            Statistic::GeneralizedEntropy(q) => write!(f, "generalized_entropy({q})"),
            Statistic::IndicatorQNonneg => write!(f, "indicator_Q_nonneg"),
            Statistic::IndicatorAbsjLeq(y) => write!(f, "indicator_absj_leq({y:e})"),
        }
    }
}

/// Single-pass mean and variance (Welford), mergeable with Chan's formula.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Self) -> Self {
        if other.n == 0 {
            return *self;
        }
        if self.n == 0 {
            return *other;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        RunningStats {
            n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.n as f64 * w,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub name: String,
    pub measure: String,
    pub estimate: f64,
    pub std_error: f64,
    pub sample_std: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub reference: Option<f64>,
    pub z_score: Option<f64>,
}

impl EstimateResult {
    fn from_stats(
        statistic: &Statistic,
        measure: &MeasureSpec,
        stats: &RunningStats,
        seed: u64,
    ) -> Self {
        let n = stats.n as f64;
        let sample_std = stats.variance().sqrt();
        let std_error = if statistic.is_indicator() {
            let p = stats.mean;
            (p * (1.0 - p) / n).max(0.0).sqrt()
        } else {
            sample_std / n.sqrt()
        };
        let reference = statistic.reference(measure);
        let z_score = match reference {
            Some(r) if std_error > 0.0 => Some((stats.mean - r) / std_error),
            _ => None,
        };
        EstimateResult {
            name: statistic.to_string(),
            measure: measure.to_string(),
            estimate: stats.mean,
            std_error,
            sample_std,
            n_samples: stats.n,
            seed,
            reference,
            z_score,
        }
    }
}

/// Worker configuration. `threads = 0` uses the rayon default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Parallelism {
    pub threads: usize,
}

impl Parallelism {
    pub fn threads(threads: usize) -> Self {
        Parallelism { threads }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::domain("threads", e.to_string()))
    }
}

fn chunk_sizes(n: usize) -> Vec<(u64, usize)> {
    (0..n.div_ceil(CHUNK))
        .map(|c| (c as u64, CHUNK.min(n - c * CHUNK)))
        .collect()
}

fn chunk_stream(seed: u64, chunk: u64) -> RngStream {
    RngStream::new(seed, 0).child(chunk)
}

/// Runs `per_chunk` over every chunk and returns the outputs in chunk order.
fn map_chunks<T, F>(n: usize, par: Parallelism, per_chunk: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, usize) -> Result<T> + Sync,
{
    let chunks = chunk_sizes(n);
    par.pool()?.install(|| {
        chunks
            .par_iter()
            .map(|&(c, len)| per_chunk(c, len))
            .collect()
    })
}

/// Estimates several statistics from one shared sample set.
pub fn estimate_many(
    measure: MeasureSpec,
    statistics: &[Statistic],
    n: usize,
    seed: u64,
    par: Parallelism,
) -> Result<Vec<EstimateResult>> {
    if n < MIN_SAMPLES {
        return Err(Error::domain(
            "n",
            format!("{n} samples; at least {MIN_SAMPLES} required"),
        ));
    }
    for s in statistics {
        s.validate()?;
    }
    let partials = map_chunks(n, par, |c, len| {
        let mut sampler = measure.sampler(chunk_stream(seed, c))?;
        let mut stats = vec![RunningStats::default(); statistics.len()];
        for _ in 0..len {
            let b = sampler.next_b();
            for (acc, s) in stats.iter_mut().zip(statistics) {
                acc.push(s.evaluate(&b));
            }
        }
        Ok(stats)
    })?;
    let mut total = vec![RunningStats::default(); statistics.len()];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t = t.merge(p);
        }
    }
    Ok(statistics
        .iter()
        .zip(&total)
        .map(|(s, st)| EstimateResult::from_stats(s, &measure, st, seed))
        .collect())
}

/// Sample mean of `statistic` under `measure` from `n ≥ 100` draws.
pub fn estimate_mean(
    measure: MeasureSpec,
    statistic: Statistic,
    n: usize,
    seed: u64,
    par: Parallelism,
) -> Result<EstimateResult> {
    Ok(estimate_many(measure, &[statistic], n, seed, par)?.remove(0))
}

/// `⟨Qⁿ⟩ₖ` for `n = 0..=n_max` against the closed form. The `n = 0` entry is
/// exactly 1 with zero error.
pub fn moment_suite(
    k: f64,
    n_max: u32,
    samples: usize,
    seed: u64,
    par: Parallelism,
) -> Result<Vec<EstimateResult>> {
    let measure = MeasureSpec::mu_k(k)?;
    if !(1..=4).contains(&n_max) {
        return Err(Error::domain("n_max", format!("{n_max} not in 1..=4")));
    }
    let stats: Vec<_> = (0..=n_max).map(Statistic::QPower).collect();
    estimate_many(measure, &stats, samples, seed, par)
}

/// `n` values of `|J|` in deterministic order. Haar draws use the Jarlskog
/// invariant of the sampled unitary; `μₖ` draws use `√Q/2`.
pub fn collect_absj(
    measure: MeasureSpec,
    n: usize,
    seed: u64,
    par: Parallelism,
) -> Result<Vec<f64>> {
    if measure == MeasureSpec::FlatB3 {
        return Err(Error::domain(
            "measure",
            "|J| is undefined on the part of B3 with Q < 0",
        ));
    }
    let parts = map_chunks(n, par, |c, len| {
        let mut sampler = measure.sampler(chunk_stream(seed, c))?;
        Ok((0..len)
            .map(|_| match sampler.next_unitary() {
                Some(u) => u.jarlskog().abs(),
                None => 0.5 * q_of(&sampler.next_b()).max(0.0).sqrt(),
            })
            .collect::<Vec<_>>())
    })?;
    Ok(parts.concat())
}

/// One draw: the b-vector and, for Haar draws, the signed Jarlskog
/// invariant of the sampled unitary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRecord {
    pub b: BVector<f64>,
    pub jarlskog: Option<f64>,
}

/// `n` draws in deterministic order.
pub fn collect_samples(
    measure: MeasureSpec,
    n: usize,
    seed: u64,
    par: Parallelism,
) -> Result<Vec<SampleRecord>> {
    let parts = map_chunks(n, par, |c, len| {
        let mut sampler = measure.sampler(chunk_stream(seed, c))?;
        Ok((0..len)
            .map(|_| match sampler.next_unitary() {
                Some(u) => SampleRecord {
                    b: BVector::new_unchecked(
                        u.get(0, 0).norm_sqr(),
                        u.get(0, 1).norm_sqr(),
                        u.get(1, 0).norm_sqr(),
                        u.get(1, 1).norm_sqr(),
                    ),
                    jarlskog: Some(u.jarlskog()),
                },
                None => SampleRecord {
                    b: sampler.next_b(),
                    jarlskog: None,
                },
            })
            .collect::<Vec<_>>())
    })?;
    Ok(parts.concat())
}

/// Right-continuous empirical distribution function.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCdf {
    sorted_values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("samples", "empty sample"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("samples", "NaN in sample"));
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf {
            sorted_values: values,
        })
    }

    pub fn n(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    /// Fraction of samples `≤ x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted_values.partition_point(|&v| v <= x) as f64 / self.n() as f64
    }
}

/// `sup |F_n − F|`, checking both one-sided gaps at every sample point.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &EmpiricalCdf, cdf: F) -> f64 {
    let n = samples.n() as f64;
    samples
        .sorted_values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Two-sample statistic `sup |F_n − G_m|`.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let (x, y) = (&a.sorted_values, &b.sorted_values);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}
