use num_complex::Complex64;
use statphase::error::Error;
use statphase::problem::{Builtin, InitialDataDoc, ProblemDoc, CATALOGUE};
use statphase::types::{
    complex_fn, make_smooth_step, real_fn, validate_problem, AmplitudeSpec, CutoffSpec, ExpansionRequest, PhaseSpec,
    RealFn, StepTemplate,
};

#[test]
fn smooth_step_examples() {
    let g = make_smooth_step();
    assert!((g.eval(0.5) - 0.5).abs() < 1e-15);
    assert_eq!(g.eval(-1.0), 0.0);
    assert_eq!(g.eval(2.0), 1.0);
    let h = 1e-6;
    let fd = (g.eval(0.5 + h) - g.eval(0.5 - h)) / (2.0 * h);
    let d = g.derivs(0.5)[1];
    assert!((fd - d).abs() <= 1e-6 * d);
}

#[test]
fn smooth_step_is_monotone_and_bounded() {
    let g = make_smooth_step();
    let mut prev = -1.0;
    for i in 0..10_000 {
        let x = -0.1 + 1.2 * i as f64 / 9999.0;
        let v = g.eval(x);
        assert!((0.0..=1.0).contains(&v));
        assert!(v >= prev);
        // near x = 1 the step is within an ulp of 1
        if x > 0.03 && x < 0.97 {
            assert!(v > prev);
        }
        prev = v;
    }
}

#[test]
fn linear_problem_passes_every_check() {
    let pr = ProblemDoc::linear().build().unwrap();
    let r = validate_problem(&pr.phase, &pr.amp, &pr.cutoff, &ExpansionRequest::new(1, 10.0)).unwrap();
    assert!(r.passed(), "{:?}", r.failures());
    for name in [
        "phase.psi_tilde_positive",
        "phase.psi_increasing",
        "phase.psi_consistency",
        "amplitude.mu_range",
        "amplitude.endpoint_nonzero",
        "cutoff.plateaus",
        "cutoff.flat_edges",
    ] {
        assert!(r.get(name).is_some(), "missing {name}");
    }
}

#[test]
fn builtin_problems_validate() {
    for doc in [ProblemDoc::fresnel(), ProblemDoc::singular(0.5), ProblemDoc::singular_intro(0.25)] {
        let pr = doc.build().unwrap();
        for n in 1..=3 {
            let r = validate_problem(&pr.phase, &pr.amp, &pr.cutoff, &ExpansionRequest::new(n, 50.0)).unwrap();
            assert!(r.passed(), "{:?}", r.failures());
        }
    }
}

#[test]
fn negative_phase_fails_positivity() {
    let phase = PhaseSpec {
        p1: 0.0,
        p2: 1.0,
        rho1: 1.0,
        rho2: 1.0,
        psi_tilde: real_fn(|_| [-1.0, 0.0, 0.0, 0.0]),
        psi: real_fn(|p| [-p, -1.0, 0.0, 0.0]),
    };
    let pr = ProblemDoc::linear().build().unwrap();
    let r = validate_problem(&phase, &pr.amp, &pr.cutoff, &ExpansionRequest::new(1, 10.0)).unwrap();
    assert!(!r.get("phase.psi_tilde_positive").unwrap().passed);
    assert!(!r.get("phase.psi_increasing").unwrap().passed);
}

#[test]
fn vanishing_singular_endpoint_fails() {
    let u = complex_fn(|p| [Complex64::new(p, 0.0), Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default()]);
    let amp = AmplitudeSpec::new(0.5, 1.0, u, 0.0, 1.0);
    let pr = ProblemDoc::linear().build().unwrap();
    let r = validate_problem(&pr.phase, &amp, &pr.cutoff, &ExpansionRequest::new(1, 10.0)).unwrap();
    let c = r.get("amplitude.endpoint_nonzero").unwrap();
    assert!(!c.passed);
}

#[test]
fn inconsistent_psi_is_flagged() {
    let mut pr = ProblemDoc::linear().build().unwrap();
    pr.phase.psi = real_fn(|p| [2.0 * p, 2.0, 0.0, 0.0]);
    let r = validate_problem(&pr.phase, &pr.amp, &pr.cutoff, &ExpansionRequest::new(1, 10.0)).unwrap();
    assert!(!r.get("phase.psi_consistency").unwrap().passed);
}

#[test]
fn mu_out_of_range_is_reported() {
    let pr = ProblemDoc { mu1: 1.5, ..ProblemDoc::linear() }.build().unwrap();
    let r = validate_problem(&pr.phase, &pr.amp, &pr.cutoff, &ExpansionRequest::new(1, 10.0)).unwrap();
    let c = r.get("amplitude.mu_range").unwrap();
    assert!(!c.passed && c.detail.contains("mu"));
}

#[test]
fn hard_errors() {
    let pr = ProblemDoc::linear().build().unwrap();
    assert!(matches!(
        validate_problem(&pr.phase, &pr.amp, &pr.cutoff, &ExpansionRequest::new(1, 0.0)),
        Err(Error::InvalidInput(_))
    ));
    let mut bad = pr.phase.clone();
    bad.p2 = bad.p1;
    assert!(validate_problem(&bad, &pr.amp, &pr.cutoff, &ExpansionRequest::new(1, 1.0)).is_err());
    assert!(ProblemDoc { p1: 1.0, p2: 0.0, ..ProblemDoc::linear() }.build().is_err());
}

#[test]
fn request_checks() {
    assert!(ExpansionRequest::new(1, 1.0).check().is_ok());
    assert!(matches!(ExpansionRequest::new(4, 1.0).check(), Err(Error::OrderTooHigh(4))));
    assert!(ExpansionRequest::new(0, 1.0).check().is_err());
    assert!(ExpansionRequest { gamma: 1.0, ..ExpansionRequest::new(1, 1.0) }.check().is_err());
}

#[test]
fn cutoff_plateaus_and_flat_edges() {
    for template in [StepTemplate::Exp1, StepTemplate::Exp2] {
        let (p1, p2, eta) = (-0.5, 1.5, 0.3);
        let c = CutoffSpec::standard(p1, p2, eta, template).unwrap();
        for i in 0..=100 {
            let p = p1 + eta * i as f64 / 100.0;
            assert_eq!(c.nu.eval(p), 1.0);
            assert_eq!(c.nu.eval(p2 - eta * i as f64 / 100.0), 0.0);
        }
        for edge in [p1 + eta, p2 - eta] {
            for off in [-1e-9, 1e-9] {
                let d = c.nu.derivs(edge + off);
                for v in &d[1..] {
                    assert!(v.abs() < 1e-6);
                }
            }
        }
        assert!(c.m > 0.0);
    }
    assert!(CutoffSpec::standard(0.0, 1.0, 0.5, StepTemplate::Exp1).is_err());
}

#[test]
fn problem_json_roundtrip_and_catalogue() {
    for doc in [ProblemDoc::linear(), ProblemDoc::fresnel(), ProblemDoc::singular_intro(0.3)] {
        let back = ProblemDoc::from_json(&doc.to_json()).unwrap();
        assert_eq!(doc, back);
    }
    for (name, json) in CATALOGUE {
        let b: Builtin = serde_json::from_str(json).unwrap();
        assert!(b.is_real(), "{name}");
    }
    let doc = ProblemDoc::from_json(
        r#"{"p1":0,"p2":1,"rho1":2,"rho2":1,"mu1":1,"mu2":1,"eta":0.25,
            "psi":{"kind":"polynomial","coeffs":[0,0,1]},
            "psi_tilde":{"kind":"constant","value":2},
            "u_tilde":{"kind":"intro"}}"#,
    )
    .unwrap();
    assert_eq!(doc.cutoff_template, StepTemplate::Exp1);
    assert!(doc.build().is_ok());
    assert!(ProblemDoc::from_json("{\"p1\": 0}").is_err());
}

#[test]
fn complex_phase_is_rejected() {
    let doc = ProblemDoc { psi_tilde: Builtin::Constant { value: 1.0, imag: 0.5 }, ..ProblemDoc::linear() };
    assert!(doc.build().is_err());
}

#[test]
fn power_builtin_derivatives() {
    let b = Builtin::Power { alpha: 2.5, origin: Some(0.5), scale: 3.0 };
    let f = b.real_handle(0.0, "f").unwrap();
    let d = f.derivs(1.5);
    assert!((d[0] - 3.0).abs() < 1e-14);
    assert!((d[1] - 7.5).abs() < 1e-14);
    assert!((d[2] - 11.25).abs() < 1e-14);
    assert!((d[3] - 5.625).abs() < 1e-14);
}

#[test]
fn initial_data_json() {
    let doc = InitialDataDoc::from_json(r#"{"p1":0,"p2":1,"mu":0.75,"u_tilde":{"kind":"intro"}}"#).unwrap();
    assert_eq!(doc, InitialDataDoc::intro(0.75));
}
