//! Radial search for the parameters where the level-sum classifier of the
//! quadratic Julia set changes from dim < 1 to dim >= 1.

use std::f64::consts::PI;

use basmajian_core::holo_ifs::{julia_level_sums, QuadraticIfs};
use basmajian_core::thermo::{level_lambda1, DEFAULT_DELTA};
use basmajian_core::{Complex, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Step of the inward march from `r_max`.
pub const MARCH_STEP: f64 = 0.1;

/// Locus search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocusParams {
    pub rays: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub tol: f64,
    pub depth: usize,
}

impl Default for LocusParams {
    fn default() -> Self {
        Self { rays: 360, r_min: 0.3, r_max: 8.0, tol: 1e-3, depth: 16 }
    }
}

impl LocusParams {
    pub fn validate(&self) -> Result<()> {
        if self.rays == 0 {
            return Err(Error::InvalidInput("rays must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::InvalidInput("need 0 < r_min < r_max".into()));
        }
        if self.depth < 6 {
            return Err(Error::InvalidInput("depth must be at least 6".into()));
        }
        Ok(())
    }
}

/// One ray of the locus. The bracket `(r_lo, r_hi)` has `lambda_high >= 1`
/// at `r_lo` and `lambda_low < 1` at `r_hi`; `lambda_high` is empty when the
/// primary gap collapses at `r_lo`. A ray without a transition in range has
/// only `theta` set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub theta: f64,
    pub r_star: Option<f64>,
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
    pub lambda_low: Option<f64>,
    pub lambda_high: Option<f64>,
}

impl LocusPoint {
    pub fn crossed(&self) -> bool {
        self.r_star.is_some()
    }

    fn none(theta: f64) -> Self {
        Self { theta, r_star: None, r_lo: None, r_hi: None, lambda_low: None, lambda_high: None }
    }
}

/// Level-sum estimate of the leading eigenvalue at `c`.
pub fn lambda_at(c: Complex, depth: usize) -> Result<f64> {
    let ifs = QuadraticIfs::new(c)?;
    Ok(level_lambda1(&julia_level_sums(&ifs, depth)?, DEFAULT_DELTA)?.0)
}

/// Classifier value at radius `r`: `Some(lambda)`, or `None` when the
/// primary gap has collapsed, which lies on the dim >= 1 side.
fn classify(theta: f64, r: f64, depth: usize) -> Result<Option<f64>> {
    match lambda_at(Complex::from_polar(r, theta), depth) {
        Ok(l) => Ok(Some(l)),
        Err(Error::BranchAmbiguity) => Ok(None),
        Err(e) => Err(e),
    }
}

fn at_least_one(l: Option<f64>) -> bool {
    l.is_none_or(|x| x >= 1.0)
}

/// Outermost transition on the ray at angle `theta`.
pub fn trace_ray(theta: f64, p: &LocusParams) -> Result<Option<LocusPoint>> {
    let at = |r: f64| classify(theta, r, p.depth);
    let mut hi = p.r_max;
    let mut lam_hi = at(hi)?;
    if at_least_one(lam_hi) {
        return Ok(None);
    }
    let mut k = 1usize;
    let (mut lo, mut lam_lo) = loop {
        let r = p.r_max - k as f64 * MARCH_STEP;
        if r < p.r_min {
            return Ok(None);
        }
        let l = at(r)?;
        if at_least_one(l) {
            break (r, l);
        }
        hi = r;
        lam_hi = l;
        k += 1;
    };
    while hi - lo > p.tol {
        let mid = 0.5 * (lo + hi);
        let l = at(mid)?;
        if at_least_one(l) {
            lo = mid;
            lam_lo = l;
        } else {
            hi = mid;
            lam_hi = l;
        }
    }
    Ok(Some(LocusPoint {
        theta,
        r_star: Some(0.5 * (lo + hi)),
        r_lo: Some(lo),
        r_hi: Some(hi),
        lambda_low: lam_hi,
        lambda_high: lam_lo,
    }))
}

/// Angles `2 pi k / rays`.
pub fn ray_angles(rays: usize) -> Vec<f64> {
    (0..rays).map(|k| 2.0 * PI * k as f64 / rays as f64).collect()
}

/// Traces every ray in parallel. Rays without a transition, or where the
/// classifier fails, become rows with only `theta` set; the failure is
/// returned alongside for reporting.
pub fn trace(p: &LocusParams) -> Result<Vec<(LocusPoint, Option<Error>)>> {
    p.validate()?;
    let mut rows: Vec<(LocusPoint, Option<Error>)> = ray_angles(p.rays)
        .into_par_iter()
        .map(|theta| match trace_ray(theta, p) {
            Ok(Some(pt)) => (pt, None),
            Ok(None) => (LocusPoint::none(theta), None),
            Err(e) => (LocusPoint::none(theta), Some(e)),
        })
        .collect();
    rows.sort_by(|a, b| a.0.theta.total_cmp(&b.0.theta));
    Ok(rows)
}
