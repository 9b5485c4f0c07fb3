//! Dimension estimators: level-sum growth, periodic-point pressure with its
//! Bowen root, and gap-decay bounds for cut-out sets.

use alloc::vec::Vec;

use num_traits::Float;

use crate::holo_ifs::HoloIfs;
use crate::series::lambda_estimate;
use crate::{Complex, Error, Result};

/// Side of the dimension-one threshold suggested by an estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    DimBelowOne,
    DimAtLeastOne,
    Inconclusive,
}

/// Default dead band around one for [`level_lambda1`].
pub const DEFAULT_DELTA: f64 = 0.02;

/// Geometric mean of the last five level-sum ratios and its classification.
pub fn level_lambda1(level_sums: &[f64], delta: f64) -> Result<(f64, Classification)> {
    if level_sums.len() < 6 {
        return Err(Error::InvalidInput("at least 6 levels are needed".into()));
    }
    let est = lambda_estimate(level_sums).ok_or(Error::InvalidInput("level sums vanish".into()))?;
    let class = if est < 1.0 - delta {
        Classification::DimBelowOne
    } else if est > 1.0 + delta {
        Classification::DimAtLeastOne
    } else {
        Classification::Inconclusive
    };
    Ok((est, class))
}

/// A point of period `n` and its multiplier `(T^n)'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicPoint {
    pub z: Complex,
    pub multiplier: Complex,
}

const PERIODIC_TOL: f64 = 1e-13;
const PERIODIC_ITERATIONS: usize = 300;

/// Fixed points of every branch composition labelled by a cyclically
/// admissible word of length `n`, found by contraction iteration from the
/// midpoint of the seed interval.
pub fn periodic_points(ifs: &dyn HoloIfs, n: usize) -> Result<Vec<PeriodicPoint>> {
    if n == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let (s0, s1) = ifs.seed_interval();
    let seed = (s0 + s1) / 2.0;
    ifs.coding()
        .cyclic_words(n)
        .iter()
        .map(|w| {
            let letters = w.letters();
            let apply = |z: Complex| -> Result<Complex> {
                letters.iter().rev().try_fold(z, |acc, l| ifs.branch(*l as usize, acc))
            };
            let mut z = seed;
            let mut converged = false;
            for _ in 0..PERIODIC_ITERATIONS {
                let next = apply(z)?;
                let step = (next - z).norm();
                z = next;
                if step <= PERIODIC_TOL * z.norm().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged || !z.is_finite() {
                return Err(Error::NoConvergence);
            }
            let mut deriv = Complex::new(1.0, 0.0);
            let mut x = z;
            for l in letters.iter().rev() {
                deriv *= ifs.branch_derivative(*l as usize, x)?;
                x = ifs.branch(*l as usize, x)?;
            }
            Ok(PeriodicPoint { z, multiplier: 1.0 / deriv })
        })
        .collect()
}

/// `(1/n) log sum |multiplier|^{-t}` over the given period-`n` points.
pub fn pressure_from_points(points: &[PeriodicPoint], t: f64, n: usize) -> f64 {
    let logs: Vec<f64> = points.iter().map(|p| -t * Float::ln(p.multiplier.norm())).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = crate::numeric::CompensatedSum::new();
    for l in &logs {
        acc.add(Float::exp(l - top));
    }
    (top + Float::ln(acc.value())) / n as f64
}

/// Periodic-point pressure at depth `n`.
pub fn pressure(ifs: &dyn HoloIfs, t: f64, n: usize) -> Result<f64> {
    Ok(pressure_from_points(&periodic_points(ifs, n)?, t, n))
}

/// One sample of the pressure function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureSample {
    pub t: f64,
    pub pressure: f64,
    pub depth: usize,
}

/// Pressure samples at fixed depth.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureCurve {
    pub samples: Vec<PressureSample>,
}

impl PressureCurve {
    pub fn sample(ifs: &dyn HoloIfs, ts: &[f64], n: usize) -> Result<Self> {
        let points = periodic_points(ifs, n)?;
        Ok(Self {
            samples: ts
                .iter()
                .map(|&t| PressureSample { t, pressure: pressure_from_points(&points, t, n), depth: n })
                .collect(),
        })
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].t <= w[0].t || w[1].pressure < w[0].pressure)
    }
}

/// Estimator behind a [`DimEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimMethod {
    LevelSum,
    Pressure,
    Cutout,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimEstimate {
    pub value: f64,
    pub method: DimMethod,
    pub bracket: (f64, f64),
    pub depth: usize,
}

/// Lower end of the root search.
pub const BOWEN_LO: f64 = 0.01;
/// Initial upper end of the root search.
pub const BOWEN_HI: f64 = 1.99;
/// The upper end is doubled up to this value while the pressure is positive.
pub const BOWEN_HI_LIMIT: f64 = 64.0;

/// Zero of `t -> P(t)` at depth `n` by bisection to width `tol`.
pub fn bowen_dimension(ifs: &dyn HoloIfs, n: usize, tol: f64) -> Result<DimEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let points = periodic_points(ifs, n)?;
    let p = |t: f64| pressure_from_points(&points, t, n);
    let mut lo = BOWEN_LO;
    let mut hi = BOWEN_HI;
    if !(p(lo) > 0.0) {
        return Err(Error::NoSignChange);
    }
    while p(hi) > 0.0 {
        if hi >= BOWEN_HI_LIMIT {
            return Err(Error::NoSignChange);
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DimEstimate { value: 0.5 * (lo + hi), method: DimMethod::Pressure, bracket: (lo, hi), depth: n })
}

/// Descending gap lengths of a cut-out set.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSequence {
    lengths: Vec<f64>,
}

impl GapSequence {
    /// Validates positive, descending lengths.
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("gap lengths must be positive".into()));
        }
        if lengths.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput("gap lengths must be descending".into()));
        }
        Ok(Self { lengths })
    }

    /// Sorts the lengths descending first.
    pub fn from_unsorted(mut lengths: Vec<f64>) -> Result<Self> {
        lengths.sort_by(|a, b| b.total_cmp(a));
        Self::new(lengths)
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Gaps `(1/3)^{floor(log2 n) + 1}` of the middle-third Cantor set.
    pub fn middle_third(count: usize) -> Self {
        let lengths = (1..=count)
            .map(|n| {
                let k = usize::BITS - 1 - n.leading_zeros();
                Float::powi(1.0 / 3.0, k as i32 + 1)
            })
            .collect();
        Self { lengths }
    }
}

/// Bounds `1/a <= dim <= 1/b` from gap decay exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoutBounds {
    pub lower: f64,
    pub upper: f64,
    /// Set when an exponent is not positive and a bound was clamped.
    pub inconclusive: bool,
}

/// Value used in place of an unbounded dimension bound.
pub const CUTOUT_CLAMP: f64 = 2.0;

/// Fits `log a_n` against `log n` over dyadic windows `[2^k, 2^{k+1})` and
/// takes the extreme slopes between consecutive windows in the upper half
/// of the range as the decay exponents.
pub fn cutout_bounds(gaps: &GapSequence) -> Result<CutoutBounds> {
    let a = gaps.lengths();
    if a.len() < 1000 {
        return Err(Error::InvalidInput("at least 1000 gaps are needed".into()));
    }
    let mut means: Vec<(f64, f64)> = Vec::new();
    let mut k = 0u32;
    loop {
        let start = 1usize << k;
        let end = (1usize << (k + 1)).min(a.len() + 1);
        if end - start < (1usize << k) {
            break;
        }
        let count = (end - start) as f64;
        let mut ln_n = 0.0;
        let mut ln_a = 0.0;
        for n in start..end {
            ln_n += Float::ln(n as f64);
            ln_a += Float::ln(a[n - 1]);
        }
        means.push((ln_n / count, ln_a / count));
        k += 1;
    }
    let slopes: Vec<f64> = means
        .windows(2)
        .map(|w| -(w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let tail = &slopes[slopes.len() / 2..];
    let a_exp = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let b_exp = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let bound = |x: f64| if x > 1.0 / CUTOUT_CLAMP { 1.0 / x } else { CUTOUT_CLAMP };
    Ok(CutoutBounds {
        lower: bound(a_exp),
        upper: bound(b_exp),
        inconclusive: !(b_exp > 1.0 / CUTOUT_CLAMP),
    })
}

/// Gap sequence of a quadratic Julia set from gap lengths grouped by word
/// length: every gap longer than the largest gap of the deepest level is
/// kept, which is an exact prefix of the full descending sequence.
pub fn gap_sequence_from_levels(levels: &[Vec<f64>]) -> Result<GapSequence> {
    let (last, head) = levels.split_last().ok_or(Error::InvalidInput("no levels".into()))?;
    let cutoff = last.iter().copied().fold(0.0, f64::max);
    GapSequence::from_unsorted(head.iter().flatten().copied().filter(|x| *x > cutoff).collect())
}
