mod common;

use common::loglog_slope;
use num_complex::Complex64;
use statphase::error::Error;
use statphase::oracle::OracleOptions;
use statphase::problem::{Builtin, InitialDataDoc};
use statphase::schrodinger::{
    classify, coefficient_h, coefficient_k_c, coefficient_k_mu, coefficient_l_mu, l2_cross_section, oracle_solution,
    oracle_solution_with, remainder_constants, solve_expansion, ConeParams, InitialData, RegionTag,
};
use std::f64::consts::PI;

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;

fn intro(mu: f64) -> InitialData {
    InitialData::from_doc(&InitialDataDoc::intro(mu)).unwrap()
}

fn k_pref(gamma_mu: f64, mu: f64) -> f64 {
    gamma_mu / (2f64.powf(mu + 1.0) * PI)
}

#[test]
fn h_intro_formula() {
    let mu = 0.3;
    let d = intro(mu);
    let (t, x) = (40.0, 30.0);
    let r = x / (2.0 * t);
    let want = Complex64::from_polar(1.0 / (2.0 * PI.sqrt()), -PI / 4.0 + x * x / (4.0 * t)) * (1.0 - r) * r.powf(mu - 1.0);
    assert!((coefficient_h(t, x, &d).unwrap() - want).norm() < 1e-14);
}

#[test]
fn h_modulus_depends_on_ratio_only() {
    let d = intro(0.5);
    let want = 0.5 * 0.5f64.powf(-0.5) / (2.0 * PI.sqrt());
    for t in [3.0, 70.0, 1234.5] {
        let h = coefficient_h(t, t, &d).unwrap();
        assert!((h.norm() - want).abs() < 1e-14);
    }
}

#[test]
fn k_mu_intro_formula() {
    let mu = 0.5;
    let d = intro(mu);
    let (t, x) = (10.0, 7.0);
    let r = x / (2.0 * t);
    let k = coefficient_k_mu(t, x, &d).unwrap();
    let want = Complex64::from_polar(k_pref(PI.sqrt(), mu) * r.powf(-mu), PI * mu / 2.0);
    assert!((k - want).norm() < 1e-14);
    // unit ratio
    assert!((coefficient_k_mu(5.0, 10.0, &d).unwrap().norm() - k_pref(PI.sqrt(), mu)).abs() < 1e-15);
}

#[test]
fn k_c_examples() {
    let mu = 0.5;
    let d = intro(mu);
    let t = 10.0;
    let k2 = coefficient_k_c(t, 2.0 * t * 2.0, &d, 2).unwrap();
    let want = Complex64::from_polar(k_pref(PI.sqrt(), mu) * 2f64.powf(-mu), PI * mu / 2.0);
    assert!((k2 - want).norm() < 1e-14);
    let k1 = coefficient_k_c(t, -2.0 * t, &d, 1).unwrap();
    assert!((k1.norm() - k_pref(PI.sqrt(), mu)).abs() < 1e-15);
    for r in [1.5, 3.0, 4.5] {
        let a = coefficient_k_c(t, 2.0 * t * r, &d, 2).unwrap();
        let b = coefficient_k_c(t, -2.0 * t * r, &d, 1).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-15);
    }
}

#[test]
fn coefficients_refuse_wrong_regions() {
    let d = intro(0.5);
    assert!(matches!(coefficient_h(1.0, -1.0, &d), Err(Error::RegionViolation { .. })));
    assert!(matches!(coefficient_k_mu(1.0, 5.0, &d), Err(Error::RegionViolation { .. })));
    assert!(matches!(coefficient_k_c(1.0, 1.0, &d, 1), Err(Error::RegionViolation { .. })));
    assert!(matches!(coefficient_k_c(1.0, 1.0, &d, 2), Err(Error::RegionViolation { .. })));
}

#[test]
fn l_mu_examples() {
    let d = intro(0.5);
    let want = Complex64::from_polar(0.5 * GAMMA_QUARTER, -PI / 8.0);
    for t in [1.0, 17.0, 900.0] {
        assert!((coefficient_l_mu(t, &d) - want).norm() < 1e-13);
    }
    let shifted = InitialData::new(0.2, 1.0, 0.5, Builtin::Intro.complex_handle(0.2)).unwrap();
    let m0 = coefficient_l_mu(1.0, &shifted).norm();
    for t in [2.0, 30.0, 400.0] {
        assert!((coefficient_l_mu(t, &shifted).norm() - m0).abs() < 1e-14);
    }
}

#[test]
fn c1_is_linear_in_the_amplitude_norm() {
    let p = ConeParams::default();
    let one = intro(0.5);
    let two = InitialData::new(0.0, 1.0, 0.5, Builtin::Polynomial { coeffs: vec![2.0, -2.0], imag: vec![] }.complex_handle(0.0))
        .unwrap();
    let a = remainder_constants(&one, &p).unwrap();
    let b = remainder_constants(&two, &p).unwrap();
    assert!((b.c1 / a.c1 - 2.0).abs() < 1e-13);
    assert!((b.c_total / a.c_total - 2.0).abs() < 1e-13);
}

#[test]
fn c2_from_independent_assembly() {
    let (mu, eps1, delta) = (0.5, 0.3, 0.75);
    let d = intro(mu);
    let p = ConeParams { eps1, delta: Some(delta), ..Default::default() };
    let rc = remainder_constants(&d, &p).unwrap();
    // N = 1, ρ = 2: a = √π/2, b = 1/2, c = √π/4; γ = 2δ - 1
    let (a, b, c) = (PI.sqrt() / 2.0, 0.5, PI.sqrt() / 4.0);
    let k = (b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a);
    let gamma = 2.0 * delta - 1.0;
    let l = a * k.powf(gamma);
    // sup of the step derivative is 2; the cut-off transition has width ε1/3
    let m = 2.0 * 3.0 / eps1;
    let eta1 = eps1 / 3.0;
    let want = l / (1.0 - gamma) * eta1.powf(mu - 1.0) * (m + (1.0 - mu) / eta1 + 1.0);
    assert!(rc.c2 > 0.0 && rc.c2.is_finite());
    assert!((rc.c2 - want).abs() < 1e-9 * want, "{} vs {want}", rc.c2);
    assert!((rc.gamma - 0.5).abs() < 1e-15);
}

#[test]
fn constants_blow_up_as_widths_shrink() {
    let d = intro(0.4);
    let widths = [0.2, 0.1, 0.05, 0.025];
    let by_eps1: Vec<f64> = widths
        .iter()
        .map(|&e| remainder_constants(&d, &ConeParams { eps1: e, ..Default::default() }).unwrap().c_total)
        .collect();
    let by_eps2: Vec<f64> = widths
        .iter()
        .map(|&e| remainder_constants(&d, &ConeParams { eps2: e, ..Default::default() }).unwrap().c_total)
        .collect();
    let by_eps: Vec<(f64, f64)> = widths
        .iter()
        .map(|&e| {
            let rc = remainder_constants(&d, &ConeParams { eps: e, ..Default::default() }).unwrap();
            (rc.c1_c, rc.c2_c)
        })
        .collect();
    for i in 1..widths.len() {
        assert!(by_eps1[i] > by_eps1[i - 1]);
        assert!(by_eps2[i] > by_eps2[i - 1]);
        assert!(by_eps[i].0 > by_eps[i - 1].0 && by_eps[i].1 > by_eps[i - 1].1);
    }
}

#[test]
fn delta_out_of_range_is_rejected() {
    let d = intro(0.75);
    assert!(remainder_constants(&d, &ConeParams { delta: Some(0.7), ..Default::default() }).is_err());
    assert!(remainder_constants(&d, &ConeParams { delta: Some(1.0), ..Default::default() }).is_err());
}

#[test]
fn oracle_small_time_limit() {
    let d = intro(0.5);
    // (1/2π) ∫_0^1 p^{-1/2}(1-p) dp = (4/3)/2π
    let u = oracle_solution(1e-9, 0.0, &d).unwrap();
    assert!((u - Complex64::new(4.0 / 3.0 / (2.0 * PI), 0.0)).norm() < 1e-7);
}

#[test]
fn oracle_self_refinement() {
    let d = intro(0.5);
    let a = oracle_solution(50.0, 50.0, &d).unwrap();
    let b = oracle_solution_with(50.0, 50.0, &d, OracleOptions::default().doubled()).unwrap();
    assert!((a - b).norm() < 1e-9);
}

#[test]
fn oracle_rejects_large_time() {
    assert!(matches!(oracle_solution(2e4, 0.0, &intro(0.5)), Err(Error::Precondition(_))));
}

#[test]
fn inside_cone_example() {
    let d = intro(0.75);
    let p = ConeParams::default();
    let est = solve_expansion(100.0, 100.0, &d, &p).unwrap();
    assert_eq!(est.region.tag, RegionTag::InsideCone);
    let u = oracle_solution(100.0, 100.0, &d).unwrap();
    let err = (u - est.value_expansion.unwrap()).norm();
    assert!(err <= est.remainder_bound_at_t.unwrap());
    assert!(est.leading_terms.contains_key("H") && est.leading_terms.contains_key("K_mu"));
}

#[test]
fn right_outside_example() {
    let d = intro(0.75);
    let p = ConeParams::default();
    let t = 100.0;
    let est = solve_expansion(t, 2.0 * t * 2.0, &d, &p).unwrap();
    assert_eq!(est.region.tag, RegionTag::RightOutside);
    let u = oracle_solution(t, 4.0 * t, &d).unwrap();
    let rc = remainder_constants(&d, &p).unwrap();
    assert!((u - est.value_expansion.unwrap()).norm() <= rc.c2_c / t);
    assert_eq!(est.remainder_bound_at_t.unwrap(), rc.c2_c / t);
}

#[test]
fn critical_left_decay_slope() {
    let mu = 0.4;
    let d = intro(mu);
    let p = ConeParams::default();
    let ts = [1e2, 1e3, 1e4];
    let mut mags = Vec::new();
    for &t in &ts {
        let u = oracle_solution(t, 0.0, &d).unwrap();
        let est = solve_expansion(t, 0.0, &d, &p).unwrap();
        assert_eq!(est.region.tag, RegionTag::CriticalLeft);
        assert!((u - est.value_expansion.unwrap()).norm() <= est.remainder_bound_at_t.unwrap());
        mags.push(u.norm());
    }
    let slope = loglog_slope(&ts, &mags);
    assert!((slope + mu / 2.0).abs() <= 0.05, "slope {slope}");
}

#[test]
fn critical_right_reports_rate_only() {
    let d = intro(0.3);
    let est = solve_expansion(10.0, 20.0, &d, &ConeParams::default()).unwrap();
    assert_eq!(est.region.tag, RegionTag::CriticalRight);
    assert!(est.value_expansion.is_none() && est.remainder_bound_at_t.is_none());
    assert_eq!(est.decay_exponent, 0.3);
}

#[test]
fn unclassified_is_an_error() {
    let d = intro(0.5);
    let e = solve_expansion(10.0, -2.0, &d, &ConeParams::default()).unwrap_err();
    assert!(matches!(e, Error::RegionViolation { .. }));
}

#[test]
fn classify_partition_on_a_grid() {
    let d = intro(0.5);
    let p = ConeParams::default();
    for i in 0..=600 {
        let r = -6.0 + 13.0 * i as f64 / 600.0;
        let c = classify(7.0, 14.0 * r, &d, &p).unwrap();
        let expect = if r.abs() < 1e-12 {
            RegionTag::CriticalLeft
        } else if (r - 1.0).abs() < 1e-12 {
            RegionTag::CriticalRight
        } else if (0.1..=0.9).contains(&r) {
            RegionTag::InsideCone
        } else if (-5.0..=-0.2).contains(&r) {
            RegionTag::LeftOutside
        } else if (1.2..=5.0).contains(&r) {
            RegionTag::RightOutside
        } else {
            RegionTag::Unclassified
        };
        // grid points land exactly on the edges only up to rounding
        let on_edge = [0.1, 0.9, -5.0, -0.2, 1.2, 5.0].iter().any(|e| (r - e).abs() < 1e-9);
        if !on_edge {
            assert_eq!(c.tag, expect, "ratio {r}");
        }
    }
}

#[test]
fn coefficients_bounded_in_cone() {
    let d = intro(0.75);
    let mut sup: f64 = 0.0;
    for i in 0..=200 {
        let r = 0.1 + 0.8 * i as f64 / 200.0;
        let (t, x) = (10.0, 20.0 * r);
        sup = sup.max(coefficient_h(t, x, &d).unwrap().norm()).max(coefficient_k_mu(t, x, &d).unwrap().norm());
    }
    assert!(sup.is_finite() && sup < 10.0);
}

#[test]
fn dominance_across_regions() {
    let d = intro(0.6);
    let p = ConeParams::default();
    for &t in &[50.0, 500.0] {
        for &r in &[-1.5, -0.3, 0.0, 0.2, 0.5, 0.85, 1.4, 3.0] {
            let x = 2.0 * t * r;
            let est = solve_expansion(t, x, &d, &p).unwrap();
            let u = oracle_solution(t, x, &d).unwrap();
            let err = (u - est.value_expansion.unwrap()).norm();
            assert!(err <= est.remainder_bound_at_t.unwrap(), "t={t} r={r} {:?}", est.region.tag);
        }
    }
}

#[test]
fn l2_limit_closed_form_and_bound() {
    let d = intro(0.75);
    let p = ConeParams::default();
    let rep = l2_cross_section(100.0, &d, &p).unwrap();
    let anti = |x: f64| 2.0 * x.sqrt() - 4.0 / 3.0 * x.powf(1.5) + 0.4 * x.powf(2.5);
    let want = ((anti(0.9) - anti(0.1)) / (2.0 * PI)).sqrt();
    assert!((rep.limit - want).abs() < 1e-12);
    assert!((rep.norm - rep.limit).abs() <= rep.bound);
}

#[test]
fn l2_preconditions() {
    let p = ConeParams::default();
    assert!(matches!(l2_cross_section(100.0, &intro(0.5), &p), Err(Error::Precondition(_))));
    assert!(matches!(l2_cross_section(0.5, &intro(0.75), &p), Err(Error::Precondition(_))));
}

#[test]
fn initial_data_rejects_bad_edges() {
    let c = Builtin::Constant { value: 1.0, imag: 0.0 }.complex_handle(0.0);
    assert!(InitialData::new(0.0, 1.0, 0.5, c).is_err());
    let z = Builtin::Polynomial { coeffs: vec![0.0, 1.0, -1.0], imag: vec![] }.complex_handle(0.0);
    assert!(InitialData::new(0.0, 1.0, 0.5, z).is_err());
    assert!(InitialData::new(0.0, 1.0, 1.0, Builtin::Intro.complex_handle(0.0)).is_err());
}
