mod common;

use kolmo_core::legendre::{antiderivatives, eval_i, eval_p, eval_q, exact_i, exact_p, jacobi_from_i, ExactLegendre};
use kolmo_core::Error;
use num_traits::Zero;
use proptest::prelude::*;

fn coeffs(p: &kolmo_core::poly::RationalPoly) -> Vec<common::Q> {
    p.coeffs().to_vec()
}

fn trimmed(mut v: Vec<common::Q>) -> Vec<common::Q> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

#[test]
fn exact_legendre_matches_explicit_sum() {
    for n in 0..=40usize {
        let lib = exact_p(n as i64).unwrap();
        assert!(lib.im.is_zero());
        assert_eq!(coeffs(&lib.re), trimmed(common::legendre(n)), "P_{n}");
    }
}

#[test]
fn negative_indices_are_imaginary_reflections() {
    for n in 0..=20i64 {
        let neg = exact_p(-n - 1).unwrap();
        assert!(neg.re.is_zero());
        assert_eq!(coeffs(&neg.im), trimmed(common::legendre(n as usize)));
    }
}

#[test]
fn integral_family_matches_reference() {
    for n in 1..=30usize {
        let lib = exact_i(n as i64).unwrap();
        assert!(lib.im.is_zero());
        assert_eq!(coeffs(&lib.re), trimmed(common::integral(n)), "I_{n}");
    }
    let i0 = exact_i(0).unwrap();
    assert_eq!(coeffs(&i0.re), vec![common::q(0, 1), common::q(1, 1)]);
    assert_eq!(coeffs(&i0.im), vec![common::q(-1, 1)]);
}

#[test]
fn integral_recurrence_holds_exactly() {
    let x = kolmo_core::poly::RationalPoly::x();
    for n in 1..=25i64 {
        let lhs = exact_i(n + 1).unwrap().re.scale(&common::q(n + 2, 1));
        let rhs = &(&x * &exact_i(n).unwrap().re).scale(&common::q(2 * n + 1, 1))
            - &exact_i(n - 1).unwrap().re.scale(&common::q(n - 1, 1));
        assert_eq!(lhs, rhs, "n = {n}");
    }
}

#[test]
fn antiderivative_differentiates_back() {
    let table = ExactLegendre::global();
    for n in 0..=30usize {
        let a = table.antiderivative(n).unwrap();
        assert_eq!(a.derivative(), *table.p_real(n).unwrap());
        assert!(a.eval(&common::q(-1, 1)).is_zero());
    }
}

#[test]
fn jacobi_minus_one_family() {
    for n in 1..=10usize {
        let j = jacobi_from_i(n).unwrap();
        assert!(j.eval(&common::q(1, 1)).is_zero() && j.eval(&common::q(-1, 1)).is_zero());
    }
}

#[test]
fn domain_and_capacity_errors() {
    assert!(matches!(eval_p(3, 1.5), Err(Error::Domain(_))));
    assert!(matches!(eval_q(3, -0.1), Err(Error::Domain(_))));
    assert!(matches!(antiderivatives(3, f64::NAN), Err(Error::Domain(_))));
    let small = ExactLegendre::new(4);
    assert!(matches!(small.p_real(5), Err(Error::Capacity { .. })));
}

proptest! {
    #[test]
    fn float_values_match_bonnet(n in 0usize..300, x in -1.0f64..=1.0) {
        let reference = common::legendre_f64(n, x)[n];
        let v = eval_p(n as i64, x).unwrap();
        prop_assert!((v.re - reference).abs() <= 1e-12);
        prop_assert_eq!(v.im, 0.0);
        let neg = eval_p(-(n as i64) - 1, x).unwrap();
        prop_assert_eq!(neg.re, 0.0);
        prop_assert!((neg.im - reference).abs() <= 1e-12);
    }

    #[test]
    fn integral_float_matches_definition(n in 1usize..300, x in -1.0f64..=1.0) {
        let p = common::legendre_f64(n + 1, x);
        let reference = (p[n + 1] - p[n - 1]) / (2 * n + 1) as f64;
        let v = eval_i(n as i64, x).unwrap();
        prop_assert!((v.re - reference).abs() <= 1e-12);
        let all = antiderivatives(n, x).unwrap();
        prop_assert!((all[n] - reference).abs() <= 1e-12);
        prop_assert!((all[0] - (1.0 + x)).abs() <= 1e-15);
    }

    #[test]
    fn shifted_polynomial(n in 0usize..100, t in 0.0f64..=1.0) {
        let v = eval_q(n, t).unwrap();
        prop_assert!((v - common::legendre_f64(n, 2.0 * t - 1.0)[n]).abs() <= 1e-12);
    }

    #[test]
    fn values_bounded_by_one(n in 0i64..500, x in -1.0f64..=1.0) {
        prop_assert!(eval_p(n, x).unwrap().re.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn complex_integral_for_nonpositive_index(n in -20i64..=0, x in -1.0f64..=1.0) {
        let v = eval_i(n, x).unwrap();
        let exact = exact_i(n).unwrap();
        let xf = x;
        let re = exact.re.eval_f64(xf);
        let im = exact.im.eval_f64(xf);
        prop_assert!((v.re - re).abs() <= 1e-9 && (v.im - im).abs() <= 1e-9);
    }
}
