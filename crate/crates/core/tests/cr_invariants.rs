use num_complex::Complex64;
use proptest::prelude::*;
use typen_forge::cr_invariants::*;
use typen_forge::exact_series::j_taylor;
use typen_forge::jet::Jet;
use typen_forge::jet2::Jet2;
use typen_forge::numeric_ode::{FlatCase, FlatFamilyParams};
use typen_forge::scalar::q;

fn ln(lambda: f64, c1: f64, c0: f64) -> SolutionSpec {
    SolutionSpec::Family { params: FlatFamilyParams::leroy_nurowski(lambda, c1, c0) }
}

fn flat(lambda: f64, c1: f64, c0: f64) -> SolutionSpec {
    SolutionSpec::Family { params: FlatFamilyParams::flat_tan(lambda, c1, c0) }
}

fn case3(z_c0: f64) -> FlatFamilyParams {
    FlatFamilyParams { case: FlatCase::Case3, lambda: 1.0, c0: z_c0, c1: 0.0, c2: 1.0 }
}

fn ln_table() -> (f64, f64, f64, f64) {
    let s = 0.6f64.sqrt();
    (0.5 * s, -0.5 * s, 0.5 * s, s)
}

fn flat_table() -> (f64, f64, f64, f64) {
    let t = 10f64.sqrt();
    (-16.0 * 0.4f64.sqrt(), 41.0 / (2.0 * t), 29.0 / (2.0 * t), 3.0 * 0.4f64.sqrt())
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Jet of `a cos(b(s0+t)) / sin(b(s0+t))` from the sine and cosine series.
fn cot_jet(a: f64, b: f64, s0: f64, order: usize) -> Jet<f64> {
    let mut sin = Vec::new();
    let mut cos = Vec::new();
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
        }
        let ph = b * s0 + k as f64 * std::f64::consts::FRAC_PI_2;
        sin.push(b.powi(k as i32) * ph.sin() / fact);
        cos.push(b.powi(k as i32) * ph.cos() / fact);
    }
    Jet::new(cos).scale(&a).div_jet(&Jet::new(sin)).unwrap()
}

#[test]
fn jet_matches_leroy_nurowski_closed_form() {
    let (l, c1, c0) = (-1.3, 0.8, 0.25);
    let spec = ln(l, c1, c0);
    for z in [0.4, 1.7, 3.1] {
        let jj = spec.jet(z, 10).unwrap();
        let oracle = cot_jet(1.5 * c1 / l, 0.5 * c1, z + c0, 10);
        for k in 0..=10 {
            let (a, b) = (jj.jet.coeff(k).re, oracle.coeff(k));
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "z = {z}, k = {k}: {a} vs {b}");
            assert_eq!(jj.jet.coeff(k).im, 0.0);
        }
    }
}

#[test]
fn jet_matches_flat_pole() {
    let (l, c0) = (-0.7, 0.3);
    let spec = flat(l, 0.0, c0);
    let z = 1.1;
    let jj = spec.jet(z, 8).unwrap();
    let s = z + c0;
    let a = 2.0 / (3.0 * l);
    for k in 0..=8 {
        let want = a * (-1.0f64).powi(k as i32) / s.powi(k as i32 + 1);
        assert!((jj.jet.coeff(k).re - want).abs() <= 1e-12 * (1.0 + want.abs()), "k = {k}");
    }
}

#[test]
fn jet_at_origin_equals_exact_series() {
    for (u0, l) in [(1i64, -1i64), (3, 2)] {
        let exact = j_taylor(&q(u0, 1), &q(l, 1), 12).unwrap();
        let jj = z_jet_of_J(0.0, [0.0, u0 as f64, 0.0], l as f64, 0.0, 12).unwrap();
        for (k, c) in exact.coeffs.iter().enumerate() {
            let want = c.numer().to_string().parse::<f64>().unwrap() / c.denom().to_string().parse::<f64>().unwrap();
            let got = jj.jet.coeff(k).re;
            assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()), "k = {k}: {got} vs {want}");
        }
    }
}

#[test]
fn jet_preconditions() {
    assert_eq!(z_jet_of_J(0.0, [1.0, -0.5, 0.0], -1.0, 0.0, 7), Err(CrError::Physicality(-0.5)));
    assert_eq!(z_jet_of_J(0.0, [1.0, 0.0, 0.0], -1.0, 0.0, 7), Err(CrError::Physicality(0.0)));
    assert_eq!(z_jet_of_J(0.0, [1.0, 1.0, 0.0], -1.0, 0.0, 21), Err(CrError::TooHigh(21)));
    let jj = z_jet_of_J(0.0, [1.0, 1.0, 0.0], -1.0, 0.0, 6).unwrap();
    assert_eq!(c_jet(&jj, AChoice::Constant2, 0.0, 5), Err(CrError::Order { needed: 7, got: 6 }));
    let cj = c_jet(&jj, AChoice::Constant2, 0.0, 4).unwrap();
    assert!(alpha_invariant(&cj).is_ok());
    assert!(matches!(cartan_invariants(&cj), Err(CrError::Order { needed: 7, .. })));
    assert_eq!(c_jet(&jj, AChoice::IdentityZeta, 0.0, 4), Err(CrError::Chart));
}

#[test]
fn nurowski_c_at_unit_height() {
    let jj = ln(-1.0, 0.0, 0.0).jet(1.0, 7).unwrap();
    for x in [0.0, 2.5] {
        let cj = c_jet(&jj, AChoice::Constant2, x, 5).unwrap();
        assert!((cj.c.value() - Complex64::new(0.0, -2.0)).norm() < 1e-14);
        // 4/(ζ - ζ̄) with ζ - ζ̄ = 2i(1 + dy): ∂ζ c = -4/(ζ - ζ̄)^2 = 1.
        assert!((cj.c.partial(1, 0) - re(1.0)).norm() < 1e-13);
        assert!((cj.c.partial(0, 1) - re(-1.0)).norm() < 1e-13);
    }
}

#[test]
fn c_jet_conjugation_and_reality() {
    let specs = [ln(-1.0, 1.0, 0.0), SolutionSpec::g_series(-2.0), flat(-2.0, 0.6, 0.1)];
    for spec in &specs {
        let jj = spec.jet(0.3, 9).unwrap();
        for (a, t) in [(AChoice::Constant2, 0.7), (AChoice::IdentityZeta, 1.4)] {
            let cj = c_jet(&jj, a, t, 7).unwrap();
            let scale = (0..=7).map(|k| cj.c.coeff(k, 0).norm()).fold(1.0, f64::max);
            assert!(cj.conjugation_defect() <= 1e-12 * scale, "{a:?}: {}", cj.conjugation_defect());
            assert!(cj.reality_defect() <= 1e-12 * scale, "{a:?}: {}", cj.reality_defect());
        }
    }
}

#[test]
fn identity_chart_reproduces_z() {
    // A = ζ: z = 2 arg ζ; at ζ0 = ρ e^{iz/2}, ∂ζ z = -i/ζ0.
    let jj = ln(-1.0, 1.0, 0.0).jet(0.9, 7).unwrap();
    let cj = c_jet(&jj, AChoice::IdentityZeta, 1.7, 5).unwrap();
    assert!((cj.zeta0 - Complex64::from_polar(1.7, 0.45)).norm() < 1e-15);
    // c = (1 + iF2 + C1)/ζ at the base point.
    let f2 = jj.f2().value();
    let want = (re(1.0) + Complex64::i() * f2 + re(1.0)) / cj.zeta0;
    assert!((cj.c.value() - want).norm() < 1e-13);
}

fn assert_table(set: &InvariantSet, table: (f64, f64, f64, f64), check_beta: bool, tol: f64) {
    let (a2, beta, gamma, theta) = table;
    assert!((set.alpha_sq - re(a2)).norm() <= tol, "alpha^2 = {} at z = {}", set.alpha_sq, set.z);
    assert!((set.gamma - gamma).abs() <= tol, "gamma = {} at z = {}", set.gamma, set.z);
    assert!((set.theta - Complex64::new(0.0, theta)).norm() <= tol, "theta = {} at z = {}", set.theta, set.z);
    assert!(set.imag_residue <= tol);
    if check_beta {
        assert!((set.beta - beta).abs() <= tol, "beta = {} at z = {}", set.beta, set.z);
    }
}

#[test]
fn leroy_nurowski_constants_except_beta() {
    for c1 in [0.0, 1.0] {
        let spec = ln(-1.0, c1, 0.0);
        let p = invariant_profile(&spec, 0.2, 3.0, 20, AChoice::Constant2, 0.0).unwrap();
        assert_eq!(p.points.len(), 20);
        assert!(p.r_vanishing.is_empty());
        for s in &p.points {
            assert_table(s, ln_table(), false, 1e-8);
        }
        assert!(p.max_deviation.alpha_sq < 1e-8 && p.max_deviation.gamma < 1e-8 && p.max_deviation.theta < 1e-8);
    }
}

#[test]
#[ignore = "the printed beta formula evaluates to 2.3238 (C1 = 0) and varies with z for C1 = 1; see the acceptance report"]
fn leroy_nurowski_beta_constant() {
    for c1 in [0.0, 1.0] {
        let p = invariant_profile(&ln(-1.0, c1, 0.0), 0.2, 3.0, 20, AChoice::Constant2, 0.0).unwrap();
        for s in &p.points {
            assert_table(s, ln_table(), true, 1e-8);
        }
    }
}

#[test]
fn flat_constants_except_beta() {
    for c1 in [0.0, 0.4] {
        let spec = flat(-1.0, c1, 0.0);
        let p = invariant_profile(&spec, 0.1, 0.9, 12, AChoice::Constant2, 0.0).unwrap();
        for s in &p.points {
            assert_table(s, flat_table(), false, 1e-8);
        }
    }
}

#[test]
#[ignore = "the printed beta formula evaluates to 21.978 (C1 = 0) for the flat pole; see the acceptance report"]
fn flat_beta_constant() {
    let p = invariant_profile(&flat(-1.0, 0.0, 0.0), 0.1, 0.9, 12, AChoice::Constant2, 0.0).unwrap();
    for s in &p.points {
        assert_table(s, flat_table(), true, 1e-8);
    }
}

#[test]
fn alpha_sq_formula_agrees_with_jets_on_case_three() {
    let p = case3(0.0);
    for k in 0..10 {
        let z = -1.35 + 0.3 * k as f64;
        let formula = alpha_sq_flat_formula(&p, z).unwrap();
        let spec = SolutionSpec::Family { params: p };
        let jets = invariants_at(&spec, z, AChoice::Constant2, 0.0).unwrap().alpha_sq;
        assert!((formula - jets).norm() <= 1e-8, "z = {z}: {formula} vs {jets}");
    }
}

#[test]
fn alpha_sq_formula_limits() {
    let k = -16.0 * 0.4f64.sqrt();
    assert_eq!(alpha_sq_flat_of_j(2.7, -1.0, 0.0).unwrap(), re(k));
    let far = alpha_sq_flat_of_j(1e12, 1.0, 1.0).unwrap();
    assert!((far.re - k).abs() < 1e-12);
    // 3ΛJ^(4/3) = 2C2 at J = 1, Λ = 2/3, C2 = 1.
    assert_eq!(alpha_sq_flat_of_j(1.0, 2.0 / 3.0, 1.0), Err(CrError::Pole(1.0)));
}

#[test]
fn series_alpha_vanishes_at_origin() {
    for (u0, l) in [(1.0, -1.0), (2.5, 0.5)] {
        let jj = z_jet_of_J(0.0, [0.0, u0, 0.0], l, 0.0, 6).unwrap();
        let (alpha, _) = alpha_invariant(&c_jet(&jj, AChoice::Constant2, 0.0, 4).unwrap()).unwrap();
        assert!(alpha.norm() <= 1e-8, "{alpha}");
        let away = SolutionSpec::j_series(u0, l).jet(0.2, 6).unwrap();
        let (alpha, _) = alpha_invariant(&c_jet(&away, AChoice::Constant2, 0.0, 4).unwrap()).unwrap();
        assert!(alpha.norm() > 1e-3);
    }
}

#[test]
fn interior_profile_differs_from_both_tables() {
    let p = invariant_profile(&SolutionSpec::g_series(-2.0), -0.5, 0.5, 11, AChoice::Constant2, 0.0).unwrap();
    assert_eq!(p.points.len(), 11);
    assert!(p.max_deviation.beta > 1e-3);
    for s in &p.points {
        assert!((s.beta - ln_table().1).abs() > 1e-3);
        assert!((s.beta - flat_table().1).abs() > 1e-3);
    }
    // Even solution: the profile is symmetric about z = 0.
    for i in 0..5 {
        assert!((p.points[i].beta - p.points[10 - i].beta).abs() < 1e-8);
    }
}

#[test]
fn interior_profile_depends_on_c1() {
    let a = SolutionSpec::Jeq { z0: 0.0, init: [0.0, 2.0, 0.0], lambda: -1.0, c1: 1.0 };
    let b = SolutionSpec::Jeq { z0: 0.0, init: [0.0, 2.0, 0.0], lambda: -1.0, c1: 0.5 };
    let ia = invariants_at(&a, 0.2, AChoice::Constant2, 0.0).unwrap();
    let ib = invariants_at(&b, 0.2, AChoice::Constant2, 0.0).unwrap();
    assert!((ia.gamma - ib.gamma).abs() > 1e-3);
    assert!((ia.beta - ib.beta).abs() > 1e-3);
}

#[test]
fn alpha_gamma_theta_are_a_independent() {
    let specs = [ln(-1.0, 1.0, 0.0), SolutionSpec::g_series(-2.0), flat(-1.0, 0.4, 0.0)];
    for spec in &specs {
        for z in [0.15, 0.35] {
            let a = invariants_at(spec, z, AChoice::Constant2, 0.3).unwrap();
            let b = invariants_at(spec, z, AChoice::IdentityZeta, 1.3).unwrap();
            assert!((a.alpha_sq - b.alpha_sq).norm() <= 1e-8 * (1.0 + a.alpha_sq.norm()));
            assert!((a.gamma - b.gamma).abs() <= 1e-8 * (1.0 + a.gamma.abs()));
            assert!((a.theta - b.theta).norm() <= 1e-8 * (1.0 + a.theta.norm()));
        }
    }
}

#[test]
#[ignore = "the printed beta formula is not A-independent (2.3238 vs 2.4305 for Leroy-Nurowski, C1 = 0, z = 0.7)"]
fn beta_is_a_independent() {
    let spec = ln(-1.0, 0.0, 0.0);
    let a = invariants_at(&spec, 0.7, AChoice::Constant2, 0.0).unwrap();
    let b = invariants_at(&spec, 0.7, AChoice::IdentityZeta, 1.3).unwrap();
    assert!((a.beta - b.beta).abs() <= 1e-8);
}

#[test]
fn invariants_depend_on_z_only_within_each_chart() {
    let spec = SolutionSpec::g_series(-2.0);
    for (a, t1, t2) in [(AChoice::Constant2, -1.0, 2.0), (AChoice::IdentityZeta, 0.5, 3.0)] {
        let u = invariants_at(&spec, 0.25, a, t1).unwrap();
        let v = invariants_at(&spec, 0.25, a, t2).unwrap();
        assert!((u.alpha_sq - v.alpha_sq).norm() <= 1e-8 * (1.0 + u.alpha_sq.norm()));
        assert!((u.beta - v.beta).abs() <= 1e-8 * (1.0 + u.beta.abs()));
        assert!((u.gamma - v.gamma).abs() <= 1e-8 * (1.0 + u.gamma.abs()));
        assert!((u.theta - v.theta).norm() <= 1e-8 * (1.0 + u.theta.norm()));
    }
}

#[test]
fn invariants_are_translation_invariant() {
    let a = invariants_at(&ln(-1.0, 1.0, 0.4), 0.9, AChoice::Constant2, 0.0).unwrap();
    let b = invariants_at(&ln(-1.0, 1.0, 0.0), 1.3, AChoice::Constant2, 0.0).unwrap();
    assert!((a.beta - b.beta).abs() < 1e-9 && (a.alpha_sq - b.alpha_sq).norm() < 1e-9);
}

#[test]
fn epsilon_reports_the_branch() {
    let s = invariants_at(&ln(-1.0, 1.0, 0.0), 0.5, AChoice::Constant2, 0.0).unwrap();
    let canon = s.alpha * s.epsilon as f64;
    assert!(canon.re > 0.0 || (canon.re == 0.0 && canon.im >= 0.0));
    assert!((s.alpha * s.alpha - s.alpha_sq).norm() < 1e-15);
}

#[test]
fn constant_c_is_the_hyperquadric() {
    let c = Jet2::constant(Complex64::new(0.5, 0.0), 5);
    let cj = CJet { zeta0: Complex64::new(0.0, 1.0), z: 1.0, a_choice: AChoice::Constant2, c: c.clone(), cbar: c };
    assert!(matches!(cartan_invariants(&cj), Err(CrError::Hyperquadric(_))));
}

#[test]
fn residuals_vanish_on_solutions() {
    for c1 in [0.0, 1.0] {
        for z in [0.5, 1.4, 2.6] {
            let r = pde_residuals(&ln(-1.0, c1, 0.0), z, 0.0).unwrap();
            assert!(r.max() <= 1e-10, "LN C1 = {c1}, z = {z}: {r:?}");
        }
    }
    let r = pde_residuals(&SolutionSpec::j_series(1.0, -1.0), 0.1, 0.0).unwrap();
    assert!(r.max() <= 1e-8, "{r:?}");
    let r = pde_residuals(&SolutionSpec::g_series(-2.0), 0.3, 0.0).unwrap();
    assert!(r.max() <= 1e-8, "{r:?}");
    let r = pde_residuals(&SolutionSpec::Family { params: case3(0.0) }, 0.7, 0.0).unwrap();
    assert!(r.max() <= 1e-8, "{r:?}");
}

#[test]
fn deliberate_fault_is_detected() {
    for spec in [ln(-1.0, 1.0, 0.0), ln(-1.0, 0.0, 0.0)] {
        for z in [0.3, 0.9] {
            let r = pde_residuals(&spec, z, 1e-3).unwrap();
            assert!(r.res_einstein > 1e-4, "{r:?}");
        }
    }
}

#[test]
fn fault_response_is_linear_with_predicted_slope() {
    // A J'' offset δ leaves J''' alone, so the Einstein residual moves by
    // δ |∂J'''/∂J''| / (32 sqrt(J')) to first order.
    let delta = 1e-6;
    for spec in [ln(-1.0, 1.0, 0.0), SolutionSpec::j_series(1.0, -1.0), SolutionSpec::g_series(-2.0)] {
        let [j, j1, j2] = spec.data(0.3).unwrap();
        let slope = (j2 / j1 - 2.0 * spec.lambda() * j).abs() / (32.0 * j1.sqrt());
        let r = pde_residuals(&spec, 0.3, delta).unwrap();
        assert!((r.res_einstein / delta - slope).abs() <= 1e-4 * slope, "{} vs {slope}", r.res_einstein / delta);
    }
}

#[test]
fn k_agrees_with_psi4_bracket() {
    let specs = [ln(-1.0, 1.0, 0.0), ln(-2.0, 0.0, 0.3), SolutionSpec::g_series(-2.0), SolutionSpec::j_series(1.0, -1.0)];
    for spec in &specs {
        for z in [0.2, 0.45] {
            let (k, direct) = k_two_ways(spec, z).unwrap();
            assert!((k - direct).norm() <= 1e-8 * k.norm().max(1.0), "z = {z}: {k} vs {direct}");
        }
    }
    let (k, direct) = k_two_ways(&flat(-1.0, 0.5, 0.0), 0.2).unwrap();
    assert!(k.norm() < 1e-10 && direct.norm() < 1e-10);
}

fn poly_jet(t0: f64, a: f64, b: f64, order: usize) -> (Jet<f64>, Jet<f64>) {
    let t = Jet::variable(t0, order);
    let f = &(&t.powi(3) + &t.scale(&a)) + &Jet::constant(1.0, order);
    let g = &t.powi(2).scale(&b) + &Jet::constant(2.0, order);
    (f, g)
}

proptest! {
    #[test]
    fn jet_derivatives_match_finite_differences(t0 in -1.5f64..1.5, a in -2.0f64..2.0, b in 0.1f64..3.0) {
        let h = 1e-4;
        let order = 5;
        let build = |t: f64| {
            let (f, g) = poly_jet(t, a, b, order);
            (f.mul_jet(&g), f.div_jet(&g).unwrap())
        };
        let (p0, q0) = build(t0);
        let (pp, qp) = build(t0 + h);
        let (pm, qm) = build(t0 - h);
        for k in 1..=4 {
            for (c, up, dn) in [(&p0, &pp, &pm), (&q0, &qp, &qm)] {
                let fd = (up.derivative_at(k - 1) - dn.derivative_at(k - 1)) / (2.0 * h);
                let exact = c.derivative_at(k);
                prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "k = {k}: {fd} vs {exact}");
            }
        }
    }
}
