//! Moebius transformations of the Riemann sphere.

use core::f64::consts::PI;

use crate::numeric::reduce_angle;
use crate::{Complex, Error, Result};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiemannPoint {
    Finite(Complex),
    Infinity,
}

impl RiemannPoint {
    pub fn finite(self) -> Option<Complex> {
        match self {
            RiemannPoint::Finite(z) => Some(z),
            RiemannPoint::Infinity => None,
        }
    }

    /// Chordal distance on the unit-diameter sphere model.
    pub fn chordal_distance(self, other: RiemannPoint) -> f64 {
        match (self, other) {
            (RiemannPoint::Infinity, RiemannPoint::Infinity) => 0.0,
            (RiemannPoint::Finite(z), RiemannPoint::Infinity)
            | (RiemannPoint::Infinity, RiemannPoint::Finite(z)) => {
                2.0 / num_traits::Float::sqrt(1.0 + z.norm_sqr())
            }
            (RiemannPoint::Finite(a), RiemannPoint::Finite(b)) => crate::numeric::chordal(a, b),
        }
    }
}

impl From<Complex> for RiemannPoint {
    fn from(z: Complex) -> Self {
        RiemannPoint::Finite(z)
    }
}

/// Determinant-one representative of an element of PSL(2, C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

/// Attracting and repelling fixed points of a loxodromic map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPair {
    pub attracting: RiemannPoint,
    pub repelling: RiemannPoint,
}

const POLE_GUARD: f64 = 1e-300;

impl MoebiusMap {
    /// Builds a map from matrix entries, rescaling to determinant one.
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() > POLE_GUARD) || !det.is_finite() {
            return Err(Error::Singular);
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    /// Real-entry convenience constructor.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    pub fn determinant(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex {
        self.a + self.d
    }

    /// Trace of the matrix square.
    pub fn trace_of_square(&self) -> Complex {
        self.a * self.a + 2.0 * self.b * self.c + self.d * self.d
    }

    pub fn apply(&self, z: RiemannPoint) -> RiemannPoint {
        match z {
            RiemannPoint::Infinity => {
                if self.c.norm() < POLE_GUARD {
                    RiemannPoint::Infinity
                } else {
                    RiemannPoint::Finite(self.a / self.c)
                }
            }
            RiemannPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() < POLE_GUARD {
                    RiemannPoint::Infinity
                } else {
                    RiemannPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Applies the map to a finite point.
    pub fn apply_finite(&self, z: Complex) -> RiemannPoint {
        self.apply(RiemannPoint::Finite(z))
    }

    /// Matrix product `self * other`, i.e. `other` acts first.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let m = MoebiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        m.renormalized()
    }

    fn renormalized(self) -> MoebiusMap {
        let det = self.determinant();
        if (det - 1.0).norm() < 1e-15 || det.norm() < POLE_GUARD {
            return self;
        }
        let s = det.sqrt();
        MoebiusMap { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Integer power, negative exponents meaning powers of the inverse.
    pub fn pow(&self, n: i32) -> MoebiusMap {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut out = MoebiusMap::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    /// Conjugate `g * self * g^-1`.
    pub fn conjugate_by(&self, g: &MoebiusMap) -> MoebiusMap {
        g.compose(self).compose(&g.inverse())
    }

    /// Entrywise equality up to global sign.
    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        let diff = |s: f64| {
            let e = [
                self.a - other.a * s,
                self.b - other.b * s,
                self.c - other.c * s,
                self.d - other.d * s,
            ];
            e.iter().map(|x| x.norm()).fold(0.0, f64::max)
        };
        diff(1.0) <= tol || diff(-1.0) <= tol
    }

    /// Modulus of the derivative at a point; at infinity the multiplier in
    /// the chart `w = 1/z` is used.
    pub fn derivative_modulus(&self, z: RiemannPoint) -> f64 {
        match z {
            RiemannPoint::Finite(z) => 1.0 / (self.c * z + self.d).norm_sqr(),
            RiemannPoint::Infinity => {
                if self.c.norm() < POLE_GUARD {
                    (self.d / self.a).norm_sqr()
                } else {
                    1.0 / self.c.norm_sqr()
                }
            }
        }
    }
}

/// Fixed points of a loxodromic map, classified by derivative modulus.
pub fn fixed_points(m: &MoebiusMap) -> Result<FixedPair> {
    let (p, q) = if m.c.norm() < POLE_GUARD {
        let diff = m.a - m.d;
        if diff.norm() < 1e-14 {
            return Err(Error::ParabolicOrElliptic);
        }
        (RiemannPoint::Finite(m.b / diff), RiemannPoint::Infinity)
    } else {
        // c z^2 + (d - a) z - b = 0 with discriminant tr^2 - 4.
        let bq = m.d - m.a;
        let disc = bq * bq + 4.0 * m.b * m.c;
        let s = disc.sqrt();
        let big = if (bq + s).norm() >= (bq - s).norm() { bq + s } else { bq - s };
        let q = -big / 2.0;
        if q.norm() < 1e-300 {
            return Err(Error::ParabolicOrElliptic);
        }
        let r1 = q / m.c;
        let r2 = -m.b / q;
        (RiemannPoint::Finite(r1), RiemannPoint::Finite(r2))
    };
    let dp = multiplier_modulus(m, p);
    let dq = multiplier_modulus(m, q);
    if ((dp - 1.0).abs() < 1e-10 && (dq - 1.0).abs() < 1e-10) || !(dp.is_finite() && dq.is_finite())
    {
        return Err(Error::ParabolicOrElliptic);
    }
    if dp < dq {
        Ok(FixedPair { attracting: p, repelling: q })
    } else {
        Ok(FixedPair { attracting: q, repelling: p })
    }
}

fn multiplier_modulus(m: &MoebiusMap, z: RiemannPoint) -> f64 {
    match z {
        RiemannPoint::Finite(z) => 1.0 / (m.c * z + m.d).norm_sqr(),
        RiemannPoint::Infinity => (m.d / m.a).norm_sqr(),
    }
}

/// Complex length `arccosh(tr(A^2)/2)` with `Re >= 0` and `Im` in (-pi, pi].
pub fn complex_length(m: &MoebiusMap) -> Result<Complex> {
    let half = m.trace_of_square() / 2.0;
    let mut l = half.acosh();
    if l.re < 0.0 {
        l = -l;
    }
    l.im = reduce_angle(l.im);
    if l.im <= -PI {
        l.im += 2.0 * PI;
    }
    if !(l.re >= 1e-10) {
        return Err(Error::ParabolicOrElliptic);
    }
    Ok(l)
}

/// Cross ratio `(z1-z3)(z2-z4) / ((z1-z4)(z2-z3))` with limits at infinity.
pub fn cross_ratio(
    z1: RiemannPoint,
    z2: RiemannPoint,
    z3: RiemannPoint,
    z4: RiemannPoint,
) -> Result<Complex> {
    let pts = [z1, z2, z3, z4];
    let infinite = pts.iter().filter(|p| matches!(p, RiemannPoint::Infinity)).count();
    if infinite > 1 {
        return Err(Error::DegenerateConfiguration("two points at infinity"));
    }
    let factor = |x: RiemannPoint, y: RiemannPoint| -> Option<Complex> {
        match (x, y) {
            (RiemannPoint::Finite(a), RiemannPoint::Finite(b)) => Some(a - b),
            _ => None,
        }
    };
    let mut num = Complex::new(1.0, 0.0);
    let mut den = Complex::new(1.0, 0.0);
    for f in [factor(z1, z3), factor(z2, z4)].into_iter().flatten() {
        num *= f;
    }
    for f in [factor(z1, z4), factor(z2, z3)].into_iter().flatten() {
        den *= f;
    }
    let r = num / den;
    if !r.is_finite() || r.norm() == 0.0 || r.is_nan() {
        return Err(Error::DegenerateConfiguration("cross ratio is 0, infinite or undefined"));
    }
    Ok(r)
}
