use serde::{Deserialize, Serialize};

use super::matrix::BVector;
use super::q::q_of;
use crate::{Error, Result};

/// Result of [`extreme_q_search`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeQ {
    pub min_point: BVector<f64>,
    pub min_value: f64,
    pub max_point: BVector<f64>,
    pub max_value: f64,
}

/// `Q` in the `(b₁, s, t, x)` coordinates:
/// `−(1−b₁)² (x² − 4 b₁ s(1−s) t(1−t))`.
pub fn q_reduced(b1: f64, s: f64, t: f64, x: f64) -> f64 {
    let c = 1.0 - b1;
    -c * c * (x * x - 4.0 * b1 * s * (1.0 - s) * t * (1.0 - t))
}

/// Maps `(b₁, s, t, x)` to b-coordinates.
fn point(b1: f64, s: f64, t: f64, x: f64) -> BVector<f64> {
    BVector::new_unchecked(
        b1,
        (1.0 - b1) * s,
        (1.0 - b1) * t,
        (1.0 - s) * (1.0 - t) + b1 * s * t + x,
    )
}

/// Admissible range `[−min(ℓ₁,ℓ₂), min(u₁,u₂)]` of `x` for fixed `(b₁,s,t)`.
fn x_bounds(b1: f64, s: f64, t: f64) -> (f64, f64) {
    let u1 = s * (1.0 - t) + b1 * t * (1.0 - s);
    let u2 = t * (1.0 - s) + b1 * s * (1.0 - t);
    let l1 = (1.0 - s) * (1.0 - t) + b1 * s * t;
    let l2 = s * t + b1 * (1.0 - s) * (1.0 - t);
    (-l1.min(l2), u1.min(u2))
}

/// Unit-cube chart: the last coordinate `w ∈ [0,1]` sweeps the admissible
/// `x` range linearly.
#[derive(Clone, Copy)]
enum Chart {
    Full,
    ZeroSlice,
}

impl Chart {
    fn dim(self) -> usize {
        match self {
            Chart::Full => 4,
            Chart::ZeroSlice => 3,
        }
    }

    fn to_b(self, c: &[f64; 4]) -> BVector<f64> {
        let (b1, s, t) = (c[0], c[1], c[2]);
        let x = match self {
            Chart::Full => {
                let (lo, hi) = x_bounds(b1, s, t);
                lo + c[3] * (hi - lo)
            }
            Chart::ZeroSlice => 0.0,
        };
        point(b1, s, t, x)
    }

    fn q(self, c: &[f64; 4]) -> f64 {
        q_of(&self.to_b(c))
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[0, 1]` by golden-section search, then compares with the
/// endpoints.
fn golden_min<F: Fn(f64) -> f64>(f: F, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (0.0, 1.0);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (0.0, f(0.0)), (1.0, f(1.0))]
        .into_iter()
        .fold((mid, f64::INFINITY), |best, cand| {
            if cand.1 < best.1 {
                cand
            } else {
                best
            }
        })
}

/// Coordinate-wise golden-section descent of `sign · Q` from `start`.
fn refine(chart: Chart, sign: f64, start: [f64; 4], tol: f64) -> ([f64; 4], f64) {
    let mut c = start;
    let mut value = sign * chart.q(&c);
    let line_tol = (tol * 1e-3).max(1e-14);
    for _ in 0..2000 {
        let before = value;
        for axis in 0..chart.dim() {
            let (best, v) = golden_min(
                |u| {
                    let mut trial = c;
                    trial[axis] = u;
                    sign * chart.q(&trial)
                },
                line_tol,
            );
            if v <= value {
                c[axis] = best;
                value = v;
            }
        }
        if before - value <= tol * 1e-3 {
            break;
        }
    }
    (c, sign * value)
}

fn search(chart: Chart, grid: usize, tol: f64) -> Result<ExtremeQ> {
    if grid < 8 {
        return Err(Error::domain(
            "grid_resolution",
            format!("must be >= 8, got {grid}"),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("refine_tolerance", "must be positive"));
    }
    const SEEDS: usize = 8;
    // Keep the best few grid points for each direction; refinement starts
    // from each of them since `Q` has kinks where min(ℓ₁,ℓ₂) switches.
    let mut lows: Vec<([f64; 4], f64)> = Vec::new();
    let mut highs: Vec<([f64; 4], f64)> = Vec::new();
    let step = 1.0 / (grid - 1) as f64;
    let dim = chart.dim();
    let total = grid.pow(dim as u32);
    for idx in 0..total {
        let mut c = [0.0; 4];
        let mut r = idx;
        for axis in c.iter_mut().take(dim) {
            *axis = (r % grid) as f64 * step;
            r /= grid;
        }
        let q = chart.q(&c);
        push_best(&mut lows, (c, q), SEEDS, |a, b| a < b);
        push_best(&mut highs, (c, q), SEEDS, |a, b| a > b);
    }
    let (min_c, min_value) = lows.iter().map(|(c, _)| refine(chart, 1.0, *c, tol)).fold(
        ([0.0; 4], f64::INFINITY),
        |a, b| if b.1 < a.1 { b } else { a },
    );
    let (max_c, max_value) = highs
        .iter()
        .map(|(c, _)| refine(chart, -1.0, *c, tol))
        .fold(
            ([0.0; 4], f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 { b } else { a },
        );
    Ok(ExtremeQ {
        min_point: chart.to_b(&min_c),
        min_value,
        max_point: chart.to_b(&max_c),
        max_value,
    })
}

fn push_best<F: Fn(f64, f64) -> bool>(
    list: &mut Vec<([f64; 4], f64)>,
    cand: ([f64; 4], f64),
    cap: usize,
    better: F,
) {
    if list.len() < cap {
        list.push(cand);
    } else {
        let worst = (0..list.len())
            .max_by(|&i, &j| {
                if better(list[i].1, list[j].1) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
            .unwrap();
        if better(cand.1, list[worst].1) {
            list[worst] = cand;
        }
    }
}

/// Grid search over the `(b₁, s, t, x)` chart of ℬ₃ followed by
/// coordinate-wise golden-section refinement. Returns the extreme values of
/// `Q` and points attaining them.
pub fn extreme_q_search(grid_resolution: usize, refine_tolerance: f64) -> Result<ExtremeQ> {
    search(Chart::Full, grid_resolution, refine_tolerance)
}

/// Same search restricted to the `x = 0` slice.
pub fn extreme_q_search_zero_slice(
    grid_resolution: usize,
    refine_tolerance: f64,
) -> Result<ExtremeQ> {
    search(Chart::ZeroSlice, grid_resolution, refine_tolerance)
}
