use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use typen_forge::exact_series::*;
use typen_forge::poly::Poly;
use typen_forge::scalar::q;

/// Independent oracle: match Taylor coefficients of the cleared form
/// `2 g g'' + (g' + 2w)^2 + 4C + (20/3) g = 0`, odd terms included.
fn taylor_oracle(u0: &BigRational, c: i64, n_max: usize) -> Vec<BigRational> {
    let mut a = vec![u0.clone(), BigRational::zero()];
    for n in 0..n_max.saturating_sub(1) {
        a.push(BigRational::zero());
        let coef = |a: &[BigRational]| {
            let mut e = BigRational::zero();
            for i in 0..=n {
                let j = n - i;
                let gpp = a[j + 2].clone() * q(((j + 2) * (j + 1)) as i64, 1);
                e += q(2, 1) * &a[i] * gpp;
                let bi = a[i + 1].clone() * q(i as i64 + 1, 1) + if i == 1 { q(2, 1) } else { q(0, 1) };
                let bj = a[j + 1].clone() * q(j as i64 + 1, 1) + if j == 1 { q(2, 1) } else { q(0, 1) };
                e += bi * bj;
            }
            if n == 0 {
                e += q(4 * c, 1);
            }
            e + q(20, 3) * &a[n]
        };
        let r0 = coef(&a);
        let lin = q(2, 1) * u0 * q(((n + 2) * (n + 1)) as i64, 1);
        let last = a.len() - 1;
        a[last] = -r0 / lin;
    }
    a
}

#[test]
fn closed_forms_of_first_coefficients() {
    let polys = g_coefficients_symbolic(3);
    let u = Poly::<BigRational>::x();
    let f1 = Poly::linear_factor(q(-3, 5));
    assert_eq!(polys[1].numerator(), f1.scale(&q(-5, 3)));
    let p2 = Poly::linear_factor(q(-3, 4)).mul(&Poly::linear_factor(q(-6, 1)));
    assert_eq!(polys[2].numerator(), p2.scale(&q(-2, 27)));
    let p3 = p2.mul(&Poly::linear_factor(q(-33, 38)));
    assert_eq!(polys[3].numerator(), p3.scale(&q(-76, 1215)));
    assert_eq!(polys[3].denom_power, 5);
    assert_eq!(u.degree(), Some(1));
}

#[test]
fn u0_minus_two_values() {
    let s = g_coefficients(&q(-2, 1), 3).unwrap();
    assert_eq!(s.coeffs[2], q(-7, 6));
    assert_eq!(s.coeffs[4], q(-5, 108));
    assert_eq!(s.coeffs[6], q(43, 3888));
}

#[test]
fn recursion_matches_taylor_oracle() {
    for u0 in [q(-2, 1), q(-301, 400), q(7, 3), q(-11, 2), q(1, 9)] {
        let s = g_coefficients(&u0, 12).unwrap();
        let oracle = taylor_oracle(&u0, 1, 24);
        assert_eq!(&s.coeffs[..], &oracle[..25], "u0 = {u0}");
    }
}

#[test]
fn factor_theorem_up_to_thirty() {
    let report = check_common_factor(30);
    assert_eq!(report.entries.len(), 29);
    assert!(report.all_divisible());
}

#[test]
fn factor_roots_by_direct_evaluation() {
    for p in g_coefficients_symbolic(30).iter().skip(2) {
        let n = p.numerator();
        assert!(n.eval(&q(-3, 4)).is_zero());
        assert!(n.eval(&q(-6, 1)).is_zero());
    }
}

#[test]
fn quotients_share_no_rational_root() {
    let report = check_common_factor(10);
    assert!(report.common_quotient_roots(2, 10).is_empty());
}

#[test]
fn numerator_coefficients_have_one_sign() {
    for p in g_coefficients_symbolic(25).iter() {
        let signs: Vec<bool> = p.numerator_coeffs.iter().filter(|c| !c.is_zero()).map(|c| c.is_negative()).collect();
        assert!(signs.iter().all(|&s| s == signs[0]), "degree {:?}", p.degree());
    }
}

#[test]
fn theorem4_at_u0_minus_two() {
    let r = verify_theorem4(&q(-2, 1), &q(1, 10), &q(5, 3), 50);
    assert!(r.ineq1_holds);
    assert!(r.ineq2_holds);
    assert_eq!(r.first_violation, None);
    assert!(!r.margin_min.is_negative());
    let bound = q(1, 10) * q(625, 81) / q(16, 1);
    assert_eq!(bound, q(125, 2592));
    let s = g_coefficients(&q(-2, 1), 2).unwrap();
    assert!(s.coeffs[4].abs() <= bound);
}

#[test]
fn theorem4_reports_failure_for_bad_constants() {
    let r = verify_theorem4(&q(-2, 1), &q(1, 1000), &q(1, 1), 20);
    assert!(!r.ineq1_holds);
    assert!(r.first_violation.is_some());
}

#[test]
fn closed_solutions_have_zero_residual() {
    for k in 0..20i64 {
        let w = q(k * 7 - 60, 11);
        let g = -(q(1, 3) * &w * &w + q(3, 4));
        let gp = -(q(2, 3) * &w);
        let gpp = q(-2, 3);
        assert!(residual_g(&g, &gp, &gpp, &w, 1).unwrap().is_zero());
        let g = -(q(3, 2) * &w * &w + q(6, 1));
        let gp = -(q(3, 1) * &w);
        let gpp = q(-3, 1);
        assert!(residual_g(&g, &gp, &gpp, &w, 1).unwrap().is_zero());
    }
}

#[test]
fn residual_rejects_singular_point() {
    let z = q(0, 1);
    assert!(residual_g(&z, &q(1, 1), &q(1, 1), &q(1, 2), 1).is_err());
}

#[test]
fn truncated_series_residual_decays() {
    let w = q(1, 10);
    let mut prev = f64::INFINITY;
    for n in [5usize, 10, 15] {
        let s = g_coefficients(&q(-2, 1), n).unwrap();
        let (g, gp, gpp) = s.eval_derivs(&w);
        let r = residual_g(&g, &gp, &gpp, &w, 1).unwrap().abs().to_f64().unwrap();
        let scale = 0.1f64.powi(2 * n as i32);
        assert!(r <= 10.0 * scale, "n = {n}: {r} vs {scale}");
        assert!(r < prev);
        prev = r;
    }
}

/// Independent oracle for the J-series: Taylor matching of
/// `2J'J''' - J''^2 + 4ΛJJ'J'' + (20/3)ΛJ'^3 + 4Λ^2 J^2 J'^2 = 0`.
fn j_oracle(u0: &BigRational, lam: &BigRational, order: usize) -> Vec<BigRational> {
    let mut a = vec![q(0, 1), u0.clone(), q(0, 1)];
    let conv = |x: &[BigRational], y: &[BigRational], n: usize| -> BigRational {
        (0..=n).map(|i| x.get(i).cloned().unwrap_or_default() * y.get(n - i).cloned().unwrap_or_default()).sum()
    };
    while a.len() < order + 1 {
        let n = a.len() - 3;
        a.push(q(0, 1));
        let d = |a: &[BigRational], k: usize| -> Vec<BigRational> {
            (0..a.len().saturating_sub(k))
                .map(|i| {
                    let mut f = a[i + k].clone();
                    for t in 0..k {
                        f *= q((i + k - t) as i64, 1);
                    }
                    f
                })
                .collect()
        };
        let eval = |a: &[BigRational]| {
            let (j, j1, j2, j3) = (a.to_vec(), d(a, 1), d(a, 2), d(a, 3));
            let jj1 = conv(&j, &j1, n + 2);
            let _ = jj1;
            let mut e = q(2, 1) * conv(&j1, &j3, n) - conv(&j2, &j2, n);
            let jj: Vec<BigRational> = (0..=n).map(|k| conv(&j, &j1, k)).collect();
            e += q(4, 1) * lam * conv(&jj, &j2, n);
            let j1sq: Vec<BigRational> = (0..=n).map(|k| conv(&j1, &j1, k)).collect();
            e += q(20, 3) * lam * conv(&j1sq, &j1, n);
            let j2sq: Vec<BigRational> = (0..=n).map(|k| conv(&j, &j, k)).collect();
            e += q(4, 1) * lam * lam * conv(&j2sq, &j1sq, n);
            e
        };
        let r0 = eval(&a);
        let last = a.len() - 1;
        a[last] = q(1, 1);
        let r1 = eval(&a);
        a[last] = -r0.clone() / (r1 - r0);
    }
    a
}

#[test]
fn j_series_printed_terms() {
    for (u0, lam) in [(q(1, 1), q(-1, 1)), (q(3, 2), q(2, 7)), (q(1, 5), q(-9, 4))] {
        let s = j_taylor(&u0, &lam, 9).unwrap();
        assert_eq!(s.coeffs[1], u0);
        assert_eq!(s.coeffs[3], q(-5, 9) * &lam * &u0 * &u0);
        assert_eq!(s.coeffs[5], q(16, 45) * &lam * &lam * &u0 * &u0 * &u0);
        for k in (0..=9).step_by(2) {
            assert!(s.coeffs[k].is_zero(), "even coefficient {k}");
        }
        assert_eq!(s.coeffs, j_oracle(&u0, &lam, 9));
    }
}

#[test]
fn k_at_origin_of_j_series() {
    let (u0, lam) = (q(3, 2), q(-5, 7));
    let s = j_taylor(&u0, &lam, 6).unwrap();
    let (j, jp, jpp) = s.eval_derivs(&q(0, 1));
    let (re, im) = k_parts(&j, &jp, &jpp, &lam, &q(0, 1));
    assert_eq!(re, q(-2, 3) * &lam * &u0 * &u0);
    assert!(im.is_zero());
}

#[test]
fn alternation_report_runs() {
    let onset = alternation_onset(&q(-301, 400), 40);
    if let Some(k) = onset {
        assert!(k < 40);
    }
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-400i64..400, 1i64..60)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn symbolic_agrees_with_numeric(u0 in small_rational()) {
        let sym = g_coefficients_symbolic(25);
        let num = g_coefficients(&u0, 25).unwrap();
        for (k, p) in sym.iter().enumerate() {
            prop_assert_eq!(p.eval(&u0), num.coeffs[2 * k].clone());
        }
    }

    #[test]
    fn odd_coefficients_vanish(u0 in small_rational()) {
        let s = g_coefficients(&u0, 10).unwrap();
        for k in (1..s.coeffs.len()).step_by(2) {
            prop_assert!(s.coeffs[k].is_zero());
        }
    }

    #[test]
    fn termination_exactly_at_two_values(u0 in small_rational()) {
        let s = g_coefficients(&u0, 8).unwrap();
        let terminates = s.coeffs[4..].iter().all(|c| c.is_zero());
        let special = u0 == q(-3, 4) || u0 == q(-6, 1);
        prop_assert_eq!(terminates, special);
    }

    #[test]
    fn bound_dominance(c_num in 1i64..50, m_num in 1i64..40) {
        let c = q(c_num, 10);
        let m = q(m_num, 6);
        let r = verify_theorem4(&q(-2, 1), &c, &m, 30);
        if r.ineq1_holds && r.ineq2_holds {
            prop_assert_eq!(r.first_violation, None);
        }
    }
}

#[test]
fn termination_values_themselves() {
    for u0 in [q(-3, 4), q(-6, 1)] {
        let s = g_coefficients(&u0, 10).unwrap();
        assert!(s.coeffs[4..].iter().all(|c| c.is_zero()));
    }
}
