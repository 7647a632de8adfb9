use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use typen_forge::puiseux_engine::*;
use typen_forge::scalar::q;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    (-60i64..60, 1i64..25)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // With a Gaussian-rational cube root the whole roundtrip is exact.
    #[test]
    fn chart_roundtrip_exact(
        lr in nonzero_rational(), li in nonzero_rational(),
        j0 in nonzero_rational(), l in nonzero_rational(), c1 in nonzero_rational(),
    ) {
        let lead = Complex::new(lr, li);
        let z0 = Complex::new(q(2, 3), q(0, 1)) / (lead.clone() * lead.clone() * lead.clone());
        let cq = |v: &BigRational| Complex::new(v.clone(), q(0, 1));
        let (a, b) = chart_coefficients(&cq(&j0), &z0, &cq(&l), &cq(&c1), 11).unwrap();
        let rc = recompose_chart(&a, &b, lead.clone(), &cq(&l), &cq(&c1)).unwrap();
        prop_assert_eq!(rc.recomposed.len(), 8);
        prop_assert_eq!(&rc.recomposed, &rc.direct);
        prop_assert_eq!(&rc.z_from_puiseux, &rc.z_from_chart);
        let inv = lead.clone() * lead;
        prop_assert_eq!(rc.recomposed[0].clone() * inv, Complex::new(q(1, 1), q(0, 1)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    // Exact agreement at random rational points of (u0, J0, Λ, C1).
    #[test]
    fn first_five_match_printed_forms(
        u0 in nonzero_rational(),
        j0 in nonzero_rational(),
        l in nonzero_rational(),
        c1 in nonzero_rational(),
    ) {
        let got = puiseux_coefficients(&u0, &j0, &l, &c1, 5).unwrap();
        let want = printed_coefficients(&u0, &j0, &l, &c1);
        prop_assert_eq!(got.as_slice(), want.as_slice());
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn chart_roundtrip_agrees(
        zr in -3.0f64..3.0, zi in -3.0f64..3.0,
        jr in -1.5f64..1.5, ji in -1.5f64..1.5,
        l in -1.5f64..1.5, c1 in -1.0f64..1.0,
    ) {
        prop_assume!(zr.hypot(zi) > 0.5);
        let chart = regular_chart(c(jr, ji), c(zr, zi), l, c1, 10).unwrap();
        let rt = chart.roundtrip().unwrap();
        let want_u0 = (1.5 * c(zr, zi)).powf(2.0 / 3.0);
        prop_assert!((rt.u0 - want_u0).norm() <= 1e-12 * want_u0.norm());
        prop_assert!(rt.max_rel_error < 1e-10, "{}", rt.max_rel_error);
        prop_assert!(rt.z_max_rel_error < 1e-10, "{}", rt.z_max_rel_error);
    }
}

#[test]
fn printed_chart_terms() {
    let (j0, z0, l, c1) = (q(-3, 2), q(5, 7), q(2, 1), q(1, 3));
    let (a, b) = chart_coefficients(&j0, &z0, &l, &c1, 6).unwrap();
    assert_eq!(a[0], j0);
    assert!(a[1].is_zero() && a[2].is_zero());
    assert_eq!(a[3], q(2, 3) / &z0);
    assert_eq!(b[0], z0);
    assert!(b[1].is_zero());
    assert_eq!(b[2], -(q(2, 1) * (&l * &l * &j0 * &j0 + &c1 * &c1)) / &z0);
}

#[test]
fn chart_correction_vanishes_without_c1_and_j0() {
    let (_, b) = chart_coefficients(&q(0, 1), &q(3, 1), &q(-1, 1), &q(0, 1), 4).unwrap();
    assert!(b[2].is_zero());
}

#[test]
fn flat_limit_keeps_two_terms() {
    let l = q(-7, 3);
    let u = puiseux_coefficients(&q(2, 1), &q(0, 1), &l, &q(0, 1), 16).unwrap();
    for (k, v) in u.iter().enumerate() {
        match k {
            0 => assert_eq!(*v, q(2, 1)),
            4 => assert_eq!(*v, q(-3, 2) * &l),
            _ => assert!(v.is_zero(), "u_{k} = {v}"),
        }
    }
}

#[test]
fn zero_u0_rejected() {
    assert_eq!(puiseux_expand(c(0.0, 0.0), c(1.0, 0.0), -1.0, 0.0, 5), Err(PuiseuxError::ZeroU0));
    assert_eq!(regular_chart(c(1.0, 0.0), c(0.0, 0.0), -1.0, 0.0, 5).unwrap_err(), PuiseuxError::ZeroZ0);
}

fn residual_slope(s: &PuiseuxSeries, dir: Complex64) -> f64 {
    let r1 = s.cleared_residual(s.j0 + 1e-2 * dir).norm();
    let r2 = s.cleared_residual(s.j0 + 1e-3 * dir).norm();
    (r1 / r2).log10()
}

#[test]
fn residual_order_ten_thirds() {
    let s = puiseux_expand(c(1.0, 0.0), c(1.0, 0.0), -1.0, 0.0, 12).unwrap();
    let slope = residual_slope(&s, c(1.0, 0.0));
    assert!((slope - 10.0 / 3.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn three_branches_share_residual_order() {
    let bs = branches(c(1.0, 0.5), c(0.3, -0.2), -1.0, 0.7, 12).unwrap();
    for (b, s) in bs.iter().enumerate() {
        assert_eq!(s.branch, b);
        let slope = residual_slope(s, c(0.6, 0.8));
        assert!((slope - 10.0 / 3.0).abs() < 0.1, "branch {b}: {slope}");
    }
    // A rotated branch is the expansion with leading coefficient u0 ω^2.
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let direct = puiseux_expand(c(1.0, 0.5) * w * w, c(0.3, -0.2), -1.0, 0.7, 12).unwrap();
    for (a, b) in bs[1].coeffs.iter().zip(&direct.coeffs) {
        assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }
}

#[test]
fn special_case_satisfies_equation() {
    let mut seed = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    for sign in [1i8, -1] {
        let sc = special_case_closed_form(c(0.8, -0.3), 0.6, -1.3, sign).unwrap();
        for _ in 0..100 {
            let j = c(4.0 * next() - 2.0, 4.0 * next() - 2.0);
            let r = sc.residual(j);
            assert!(r.norm() < 1e-12, "J = {j}: {r}");
        }
    }
}

#[test]
fn special_case_is_conformally_flat() {
    let (l, c1) = (-1.3, 0.6);
    // With the minus sign K vanishes as written; the plus sign kills its conjugate.
    let sc = special_case_closed_form(c(0.8, -0.3), c1, l, -1).unwrap();
    for t in [-1.5, -0.2, 0.9, 2.4] {
        let j = c(t, 0.4);
        let (p, p1, _) = sc.eval(j);
        let re = p * (l * j * p1 - (2.0 / 3.0) * l * p + 2.0 * l * l * j * j - 4.0 * c1 * c1);
        let im = -2.0 * c1 * p * (p1 + 3.0 * l * j);
        let k = re + Complex64::i() * im;
        assert!(k.norm() < 1e-12, "{k}");
    }
}

#[test]
fn special_case_reduces_without_c1() {
    let sc = special_case_closed_form(c(1.7, 0.0), 0.0, -2.0, 1).unwrap();
    for t in [0.3, 1.0, 2.5] {
        let j = c(t, 0.0);
        let want = 1.7 * j.powf(2.0 / 3.0) + 3.0 * j * j;
        assert!((sc.eval(j).0 - want).norm() < 1e-13);
    }
    assert!(special_case_closed_form(c(1.0, 0.0), 1.0, 0.0, 1).is_err());
}

#[test]
fn json_carries_exact_exponents() {
    let s = puiseux_expand(c(1.0, 0.0), c(0.0, 0.0), -1.0, 0.0, 4).unwrap();
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["exponents"], serde_json::json!(["2/3", "1", "4/3", "5/3"]));
    assert_eq!(v["coeffs"][0], serde_json::json!([1.0, 0.0]));
}
