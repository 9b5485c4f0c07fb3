//! Small numerical helpers: compensated sums, square-root branches and
//! angle reduction.

use core::f64::consts::PI;

use num_traits::Float;

use crate::{Complex, Error, Result};

/// Neumaier compensated sum of reals.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of complex numbers, one Neumaier accumulator per part.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex {
        Complex::new(self.re.value(), self.im.value())
    }
}

/// Reduces an angle to the half-open interval (-pi, pi].
pub fn reduce_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = x - two_pi * Float::floor(x / two_pi);
    if r > PI {
        r -= two_pi;
    }
    if r <= -PI {
        r += two_pi;
    }
    r
}

/// Reduces the imaginary part of `z` to (-pi, pi].
pub fn reduce_mod_2pi_i(z: Complex) -> Complex {
    Complex::new(z.re, reduce_angle(z.im))
}

/// Square root with the branch cut along the ray from 0 at angle `cut`.
///
/// With `cut = pi` this is the principal square root.
pub fn sqrt_cut(w: Complex, cut: f64) -> Complex {
    let shift = cut - PI;
    let rot = Complex::from_polar(1.0, -shift);
    let half = Complex::from_polar(1.0, shift / 2.0);
    (w * rot).sqrt() * half
}

/// Distance from the origin to the segment `[a, b]`.
pub fn origin_segment_distance(a: Complex, b: Complex) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let s = (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0);
    (a + d * s).norm()
}

/// Continues the square root `root` of `from` along the segment to `to`.
///
/// The segment is split so that consecutive ratios stay in the disk of
/// radius 1/2 about 1, where the principal root is analytic.
pub fn sqrt_continue(from: Complex, root: Complex, to: Complex) -> Result<Complex> {
    let dist = origin_segment_distance(from, to);
    if dist < 1e-14 {
        return Err(Error::BranchAmbiguity);
    }
    let len = (to - from).norm();
    let pieces = Float::ceil(len / (0.5 * dist)).max(1.0);
    if pieces > 1e6 {
        return Err(Error::BranchAmbiguity);
    }
    let n = pieces as usize;
    let mut r = root;
    let mut prev = from;
    for k in 1..=n {
        let next = if k == n {
            to
        } else {
            from + (to - from) * (k as f64 / n as f64)
        };
        r *= (next / prev).sqrt();
        prev = next;
    }
    let p = to.sqrt();
    Ok(if (r - p).norm() <= (r + p).norm() { p } else { -p })
}

/// Chordal distance on the Riemann sphere between two finite points.
pub fn chordal(a: Complex, b: Complex) -> f64 {
    2.0 * (a - b).norm() / (Float::sqrt(1.0 + a.norm_sqr()) * Float::sqrt(1.0 + b.norm_sqr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }

    #[test]
    fn principal_cut_matches_sqrt() {
        let w = Complex::new(-3.0, 0.4);
        assert!((sqrt_cut(w, PI) - w.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn sqrt_cut_squares_back() {
        for k in 0..16 {
            let cut = k as f64 * 0.4 - 3.0;
            let w = Complex::new(0.7, -1.3);
            let r = sqrt_cut(w, cut);
            assert!((r * r - w).norm() < 1e-14);
        }
    }

    #[test]
    fn continuation_around_origin_flips_sign() {
        let mut w = Complex::new(1.0, 0.0);
        let mut r = Complex::new(1.0, 0.0);
        for k in 1..=8 {
            let next = Complex::from_polar(1.0, 2.0 * PI * k as f64 / 8.0);
            r = sqrt_continue(w, r, next).unwrap();
            w = next;
        }
        assert!((r + 1.0).norm() < 1e-12);
    }

    #[test]
    fn reduce_angle_range() {
        assert!((reduce_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((reduce_angle(-PI) - PI).abs() < 1e-12);
        assert!((reduce_angle(0.5) - 0.5).abs() < 1e-15);
    }
}
