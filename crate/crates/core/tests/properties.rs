mod common;

use common::linear_exact;
use num_complex::Complex64;
use proptest::prelude::*;
use statphase::bounds::{balance_bound, envelope_constants, envelope_g1, envelope_g2, refined_params, solve_k, EnvelopeConstants};
use statphase::expansion::{build_side, build_substitution, expansion_terms, theta_coefficient};
use statphase::oracle::{lambda_decay_check, oscillatory_integral};
use statphase::problem::{Builtin, InitialDataDoc, ProblemDoc};
use statphase::schrodinger::{classify, ConeParams, InitialData, RegionTag};
use statphase::special::gamma_fn;
use statphase::types::{make_smooth_step, ExpansionRequest, RealFn};

/// `ψ = p^ρ` on `[0, 1]` with `U = p^{μ-1}(1-p)`.
fn power_problem(rho: f64, mu: f64) -> ProblemDoc {
    ProblemDoc {
        rho1: rho,
        mu1: mu,
        psi: Builtin::Power { alpha: rho, origin: None, scale: 1.0 },
        psi_tilde: Builtin::Constant { value: rho, imag: 0.0 },
        u_tilde: Builtin::Intro,
        ..ProblemDoc::linear()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smooth_step_bounded_and_monotone(x in -0.5f64..1.5, dx in 0.0f64..0.5) {
        let g = make_smooth_step();
        let (a, b) = (g.eval(x), g.eval(x + dx));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(a <= b);
    }

    #[test]
    fn substitution_round_trip(rho in 1.0f64..4.0, side in 1usize..=2, frac in 0.0f64..=1.0) {
        let pr = power_problem(rho, 1.0).build().unwrap();
        let sub = build_substitution(&pr.phase, &pr.cutoff, side).unwrap();
        let s = frac * sub.s_max;
        let p = sub.inverse(s).unwrap();
        prop_assert!((sub.forward(p) - s).abs() <= 1e-10 * sub.s_max);
        let dp = sub.inverse_derivs(s).unwrap()[1];
        let sign_ok = if side == 1 { dp > 0.0 } else { dp < 0.0 };
        prop_assert!(sign_ok);
    }

    #[test]
    fn k_agrees_with_direct_formula(rho in 1.0f64..3.5, mu in 0.1f64..1.0, side in 1usize..=2, frac in 0.05f64..=1.0) {
        let pr = power_problem(rho, mu).build().unwrap();
        let sp = build_side(&pr.phase, &pr.amp, &pr.cutoff, side, 1).unwrap();
        let s = frac * sp.sub.s_max;
        let k = sp.tamp.k(s).unwrap();
        let direct = sp.tamp.k_direct(&pr.amp, 0.0, 1.0, s).unwrap();
        prop_assert!((k - direct).norm() <= 1e-8 * direct.norm());
    }

    #[test]
    fn exponents_strictly_increase(rho in 1.0f64..4.0, mu in 0.05f64..=1.0) {
        let pr = power_problem(rho, mu).build().unwrap();
        let terms = expansion_terms(&pr.phase, &pr.amp, &pr.cutoff, &ExpansionRequest::new(3, 10.0)).unwrap();
        for st in &terms.sides {
            for n in 1..st.terms.len() {
                prop_assert!(st.exponent(n) > st.exponent(n - 1));
            }
        }
    }

    #[test]
    fn theta_modulus_and_mirror(n in 0usize..4, rho in 1.0f64..5.0, mu in 0.05f64..=1.0) {
        let t1 = theta_coefficient(n, 1, rho, mu);
        let t2 = theta_coefficient(n, 2, rho, mu);
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let modulus = gamma_fn((n as f64 + mu) / rho).unwrap() / (fact * rho);
        prop_assert!((t1.norm() - modulus).abs() <= 1e-13 * modulus);
        prop_assert!((t2 + t1.conj()).norm() <= 1e-13 * modulus);
    }

    #[test]
    fn linear_expansion_exact(w in 1.0f64..1000.0) {
        let pr = ProblemDoc::linear().build().unwrap();
        let terms = expansion_terms(&pr.phase, &pr.amp, &pr.cutoff, &ExpansionRequest::new(1, w)).unwrap();
        let exact = linear_exact(w);
        prop_assert!((exact - terms.evaluate(w)).norm() <= 1e-12 * exact.norm().max(1e-3));
    }

    #[test]
    fn ray_decay_never_violated(s in 0.0f64..5.0, w in 0.1f64..1e3, rho in 1.0f64..6.0, side in 1usize..=2, t in 0.0f64..3.0) {
        let c = lambda_decay_check(s, &[t, 0.5 * t, 2.0 * t], w, rho, side);
        prop_assert!(c.passed, "{:?}", c);
    }

    #[test]
    fn k_root_residual(a in 0.01f64..10.0, b in 0.01f64..10.0, c in 0.0f64..10.0, rho in 2.0f64..6.0) {
        let lc = EnvelopeConstants { n: 1, rho, a, b, c };
        let k = solve_k(&lc).unwrap();
        prop_assert!(k > 0.0);
        let h = a * k.powf(rho) - b * k - c;
        prop_assert!(h.abs() <= 1e-12 * (b * k + c).max(a * k.powf(rho)));
    }

    #[test]
    fn balance_dominates(n in 1usize..=3, rho in 2.0f64..5.0, gamma in 0.05f64..0.95, ls in -4.0f64..2.0, lw in 0.0f64..4.0) {
        let p = refined_params(n, rho, gamma).unwrap();
        let (s, w) = (10f64.powf(ls), 10f64.powf(lw));
        let lc = envelope_constants(n, rho).unwrap();
        let m = envelope_g1(&lc, w).min(envelope_g2(&lc, s, w));
        prop_assert!(balance_bound(&p, s, w) >= m * (1.0 - 1e-12));
    }

    #[test]
    fn classification_is_a_partition(t in 0.1f64..1e4, r in -8.0f64..8.0, e1 in 0.02f64..0.4, e2 in 0.02f64..0.4) {
        let d = InitialData::from_doc(&InitialDataDoc::intro(0.5)).unwrap();
        let p = ConeParams { eps1: e1, eps2: e2, ..Default::default() };
        let a = classify(t, 2.0 * t * r, &d, &p).unwrap();
        let b = classify(t, 2.0 * t * r, &d, &p).unwrap();
        prop_assert_eq!(a, b);
        let inside = (e1..=1.0 - e2).contains(&r);
        let outside = r <= -0.2 || r >= 1.2;
        prop_assert!(!(inside && outside));
        if a.tag == RegionTag::InsideCone {
            prop_assert!(r >= e1 - 1e-9 && r <= 1.0 - e2 + 1e-9);
        }
    }

    #[test]
    fn problem_json_roundtrip(rho in 1.0f64..4.0, mu in 0.05f64..=1.0, eta in 0.01f64..0.49) {
        let doc = ProblemDoc { eta, ..power_problem(rho, mu) };
        prop_assert_eq!(ProblemDoc::from_json(&doc.to_json()).unwrap(), doc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn oracle_is_linear_in_the_amplitude(re in -3.0f64..3.0, im in -3.0f64..3.0, w in 1.0f64..500.0) {
        let base = ProblemDoc::singular(0.5).build().unwrap();
        let scaled = ProblemDoc { u_tilde: Builtin::Constant { value: re, imag: im }, ..ProblemDoc::singular(0.5) }
            .build()
            .unwrap();
        let a = oscillatory_integral(&base.phase, &base.amp, w).unwrap().value;
        let b = oscillatory_integral(&scaled.phase, &scaled.amp, w).unwrap().value;
        prop_assert!((b - a * Complex64::new(re, im)).norm() <= 1e-10 * (1.0 + re.abs() + im.abs()));
    }
}
