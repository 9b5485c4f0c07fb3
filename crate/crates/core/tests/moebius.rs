use basmajian_core::moebius::{complex_length, cross_ratio, fixed_points, MoebiusMap, RiemannPoint};
use basmajian_core::{Complex, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn fin(z: Complex) -> RiemannPoint {
    RiemannPoint::Finite(z)
}

#[test]
fn singular_matrix_is_rejected() {
    let err = MoebiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).unwrap_err();
    assert_eq!(err, Error::Singular);
}

#[test]
fn normalizes_to_unit_determinant() {
    let m = MoebiusMap::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)).unwrap();
    assert!((m.determinant() - 1.0).norm() < 1e-15);
    assert!(m.approx_eq(&MoebiusMap::identity(), 1e-15));
}

#[test]
fn pole_maps_to_infinity() {
    let m = MoebiusMap::real(1.0, 0.0, 1.0, 1.0).unwrap();
    assert_eq!(m.apply(fin(c(-1.0, 0.0))), RiemannPoint::Infinity);
    let at_inf = m.apply(RiemannPoint::Infinity).finite().unwrap();
    assert!((at_inf - 1.0).norm() < 1e-15);
}

#[test]
fn diagonal_fixed_points() {
    let m = MoebiusMap::real(2.0, 0.0, 0.0, 0.5).unwrap();
    let f = fixed_points(&m).unwrap();
    assert_eq!(f.attracting, RiemannPoint::Infinity);
    assert!((f.repelling.finite().unwrap()).norm() < 1e-15);
}

#[test]
fn elliptic_and_parabolic_have_no_axis() {
    let rotation = MoebiusMap::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)).unwrap();
    assert_eq!(fixed_points(&rotation).unwrap_err(), Error::ParabolicOrElliptic);
    let translation = MoebiusMap::real(1.0, 1.0, 0.0, 1.0).unwrap();
    assert_eq!(fixed_points(&translation).unwrap_err(), Error::ParabolicOrElliptic);
    assert_eq!(complex_length(&translation).unwrap_err(), Error::ParabolicOrElliptic);
}

#[test]
fn diagonal_complex_length() {
    let m = MoebiusMap::real(2.0, 0.0, 0.0, 0.5).unwrap();
    let l = complex_length(&m).unwrap();
    assert!((l - c(2.0 * 2f64.ln(), 0.0)).norm() < 1e-12);
}

#[test]
fn cross_ratio_of_small_integers() {
    let r = cross_ratio(fin(c(0.0, 0.0)), fin(c(1.0, 0.0)), fin(c(2.0, 0.0)), fin(c(3.0, 0.0))).unwrap();
    assert!((r - c(4.0 / 3.0, 0.0)).norm() < 1e-15);
}

#[test]
fn cross_ratio_with_infinity() {
    let (z3, z4) = (c(1.5, -0.5), c(-2.0, 0.25));
    let r = cross_ratio(RiemannPoint::Infinity, fin(c(0.0, 0.0)), fin(z3), fin(z4)).unwrap();
    assert!((r - z4 / z3).norm() < 1e-15);
}

#[test]
fn cross_ratio_degenerate() {
    let z = fin(c(1.0, 1.0));
    let err = cross_ratio(z, fin(c(0.0, 0.0)), z, fin(c(2.0, 0.0))).unwrap_err();
    assert!(matches!(err, Error::DegenerateConfiguration(_)));
}

fn unit_map() -> impl Strategy<Value = MoebiusMap> {
    prop::array::uniform4((-3.0..3.0f64, -3.0..3.0f64)).prop_filter_map("singular", |e| {
        let [a, b, cc, d] = e.map(|(re, im)| c(re, im));
        let m = MoebiusMap::new(a, b, cc, d).ok()?;
        // Keep the maps well conditioned so that relative tolerances mean something.
        let size = [m.a, m.b, m.c, m.d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        (size < 20.0).then_some(m)
    })
}

fn point() -> impl Strategy<Value = Complex> {
    (-4.0..4.0f64, -4.0..4.0f64).prop_map(|(re, im)| c(re, im))
}

fn rel_close(a: RiemannPoint, b: RiemannPoint, tol: f64) -> bool {
    match (a, b) {
        (RiemannPoint::Finite(x), RiemannPoint::Finite(y)) => (x - y).norm() <= tol * x.norm().max(1.0),
        _ => a.chordal_distance(b) <= tol,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn compose_is_a_homomorphism(m1 in unit_map(), m2 in unit_map(), z in point()) {
        let direct = m1.apply(m2.apply(fin(z)));
        let composed = m1.compose(&m2).apply(fin(z));
        prop_assume!(direct.finite().is_none_or(|w| w.norm() < 1e6));
        prop_assert!(rel_close(direct, composed, 1e-9));
    }

    #[test]
    fn cayley_hamilton(m in unit_map()) {
        let t = m.trace();
        let lhs = m.trace_of_square();
        prop_assert!((lhs - (t * t - 2.0)).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn cross_ratio_is_invariant(g in unit_map(), z in prop::array::uniform4(point())) {
        let p = z.map(fin);
        let r = cross_ratio(p[0], p[1], p[2], p[3]);
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        prop_assume!(r.norm() < 1e6 && r.norm() > 1e-6);
        let q = p.map(|x| g.apply(x));
        let s = cross_ratio(q[0], q[1], q[2], q[3]).unwrap();
        prop_assert!((r - s).norm() <= 1e-9 * r.norm().max(1.0));
    }

    #[test]
    fn real_hyperbolic_lengths(a in 0.2..5.0f64, b in -3.0..3.0f64, cc in -3.0..3.0f64) {
        // d solves ad - bc = 1.
        let d = (1.0 + b * cc) / a;
        prop_assume!((a + d).abs() > 2.0 + 1e-6);
        let m = MoebiusMap::real(a, b, cc, d).unwrap();
        let l = complex_length(&m).unwrap();
        prop_assert!(l.im.abs() < 1e-12 && l.re > 0.0);
        prop_assert!(((l.re / 2.0).cosh() - (a + d).abs() / 2.0).abs() <= 1e-12 * (a + d).abs());
    }

    #[test]
    fn fixed_points_are_fixed(m in unit_map()) {
        let f = fixed_points(&m);
        prop_assume!(f.is_ok());
        let f = f.unwrap();
        prop_assert!(rel_close(m.apply(f.attracting), f.attracting, 1e-9));
        prop_assert!(rel_close(m.apply(f.repelling), f.repelling, 1e-9));
        prop_assert!(m.derivative_modulus(f.attracting) < 1.0);
        prop_assert!(m.derivative_modulus(f.repelling) > 1.0);
    }
}
