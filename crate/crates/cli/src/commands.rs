use crate::output::{top_decade_slope, Cell, Table};
use crate::{
    ConeArgs, ConstantsArgs, DataArgs, ExpandArgs, Failure, Policy, ProblemArgs, SchrodingerArgs, SweepArgs, Template,
    ValidateArgs,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use statphase::bounds::{envelope_constants, refined_params, side_bound, BoundPolicy, SideBound};
use statphase::expansion::{build_side, expansion_terms, theta_coefficient, ExpansionTerms};
use statphase::oracle::{oscillatory_integral, OMEGA_MAX};
use statphase::problem::{InitialDataDoc, Problem, ProblemDoc};
use statphase::schrodinger::{
    classify, l2_cross_section, oracle_solution, remainder_constants, solve_expansion, ConeParams, InitialData,
    RegionTag,
};
use statphase::types::{validate_problem_with_grid, ExpansionRequest, StepTemplate};
use std::path::Path;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<(ProblemDoc, Problem), Failure> {
    let doc = ProblemDoc::from_json(&read(path)?)?;
    let pr = doc.build()?;
    Ok((doc, pr))
}

fn load_data(a: &DataArgs) -> Result<(InitialDataDoc, InitialData), Failure> {
    let doc = match &a.data {
        Some(p) => InitialDataDoc::from_json(&read(p)?)?,
        None => InitialDataDoc::intro(a.mu),
    };
    let data = InitialData::from_doc(&doc)?;
    Ok((doc, data))
}

fn cone_params(a: &ConeArgs) -> ConeParams {
    ConeParams {
        eps1: a.eps1,
        eps2: a.eps2,
        eps: a.eps,
        delta: a.delta,
        template: match a.template {
            Template::Exp1 => StepTemplate::Exp1,
            Template::Exp2 => StepTemplate::Exp2,
        },
        eta: a.eta,
    }
}

fn bound_policy(p: Policy) -> BoundPolicy {
    match p {
        Policy::Auto => BoundPolicy::Auto,
        Policy::Singular => BoundPolicy::Singular,
        Policy::Refined => BoundPolicy::Refined,
    }
}

fn logspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, Failure> {
    if !(a > 0.0 && b > a && n >= 2) {
        return Err(Failure::usage(format!("need 0 < from < to and at least 2 points (from={a}, to={b}, points={n})")));
    }
    Ok((0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect())
}

/// Runs every input check; any failed check is a validation failure.
fn checked(pr: &Problem, req: &ExpansionRequest, grid: usize) -> Result<statphase::types::ValidationReport, Failure> {
    let report = validate_problem_with_grid(&pr.phase, &pr.amp, &pr.cutoff, req, grid)?;
    Ok(report)
}

fn reject_failures(report: &statphase::types::ValidationReport) -> Result<(), Failure> {
    let failed = report.failures();
    if failed.is_empty() {
        return Ok(());
    }
    let summary: Vec<String> = failed.iter().map(|c| format!("{} ({})", c.name, c.detail)).collect();
    Err(Failure {
        code: 2,
        kind: "validation_failed".into(),
        message: format!("problem failed validation: {}", summary.join("; ")),
        details: serde_json::to_value(&failed).unwrap_or(Value::Null),
    })
}

struct Prepared {
    terms: ExpansionTerms,
    bounds: [SideBound; 2],
}

fn prepare(pr: &Problem, args: &ProblemArgs, omega: f64) -> Result<Prepared, Failure> {
    let req = ExpansionRequest { n: args.n, omega, gamma: args.gamma };
    req.check()?;
    reject_failures(&checked(pr, &req, 1001)?)?;
    let terms = expansion_terms(&pr.phase, &pr.amp, &pr.cutoff, &req)?;
    let mut b = Vec::with_capacity(2);
    for side in [1, 2] {
        let sp = build_side(&pr.phase, &pr.amp, &pr.cutoff, side, args.n)?;
        b.push(side_bound(&sp.tamp, &pr.cutoff, &req, bound_policy(args.policy))?);
    }
    Ok(Prepared { terms, bounds: [b[0], b[1]] })
}

const OMEGA_COLUMNS: &[&str] = &[
    "omega",
    "a1_re",
    "a1_im",
    "a2_re",
    "a2_im",
    "expansion_re",
    "expansion_im",
    "bound_side1",
    "bound_side2",
    "bound",
    "oracle_re",
    "oracle_im",
    "abs_error",
    "bound_satisfied",
];

struct OmegaRow {
    omega: f64,
    sides: [f64; 2],
    expansion: Complex64,
    bound: f64,
    oracle: Option<Complex64>,
    cells: Vec<Cell>,
}

fn omega_row(pr: &Problem, prep: &Prepared, omega: f64) -> Result<OmegaRow, Failure> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Failure::usage(format!("omega must be positive, got {omega}")));
    }
    let a1 = prep.terms.evaluate_side(1, omega);
    let a2 = prep.terms.evaluate_side(2, omega);
    let total = a1 + a2;
    let (b1, b2) = (prep.bounds[0].value(omega), prep.bounds[1].value(omega));
    let bound = b1 + b2;
    let oracle = if omega <= OMEGA_MAX { Some(oscillatory_integral(&pr.phase, &pr.amp, omega)?.value) } else { None };
    let err = oracle.map(|o| (o - total).norm());
    let cells = vec![
        omega.into(),
        a1.re.into(),
        a1.im.into(),
        a2.re.into(),
        a2.im.into(),
        total.re.into(),
        total.im.into(),
        b1.into(),
        b2.into(),
        bound.into(),
        oracle.map(|o| o.re).into(),
        oracle.map(|o| o.im).into(),
        err.into(),
        err.map(|e| e <= bound).into(),
    ];
    Ok(OmegaRow { omega, sides: [a1.norm(), a2.norm()], expansion: total, bound, oracle, cells })
}

fn omega_table(doc: &ProblemDoc, pr: &Problem, args: &ProblemArgs, omegas: &[f64]) -> Result<(Table, Vec<OmegaRow>), Failure> {
    let first = *omegas.first().ok_or_else(|| Failure::usage("need at least one omega".into()))?;
    let prep = prepare(pr, args, first)?;
    let rows: Vec<OmegaRow> = omegas.par_iter().map(|&w| omega_row(pr, &prep, w)).collect::<Result<_, _>>()?;
    let mut t = Table::new(OMEGA_COLUMNS);
    t.meta("problem", serde_json::to_value(doc).unwrap_or(Value::Null));
    t.meta("N", json!(args.n));
    t.meta("terms", serde_json::to_value(&prep.terms).unwrap_or(Value::Null));
    t.meta("side_bounds", serde_json::to_value(prep.bounds).unwrap_or(Value::Null));
    t.rows = rows.iter().map(|r| r.cells.clone()).collect();
    Ok((t, rows))
}

pub fn expand(a: &ExpandArgs) -> Result<(), Failure> {
    let (doc, pr) = load_problem(&a.problem.problem)?;
    let (t, _) = omega_table(&doc, &pr, &a.problem, &a.omega)?;
    t.emit(a.output.format, a.output.out.as_deref())
}

pub fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    match (&a.problem, a.ratio) {
        (Some(path), None) => sweep_omega(a, path),
        (None, Some(ratio)) => sweep_time(a, ratio),
        _ => Err(Failure::usage("give exactly one of --problem or --ratio".into())),
    }
}

fn fit(xs: &[f64], ys: &[f64]) -> Value {
    top_decade_slope(xs, ys).map(|s| json!(s)).unwrap_or(Value::Null)
}

fn sweep_omega(a: &SweepArgs, path: &Path) -> Result<(), Failure> {
    let (doc, pr) = load_problem(path)?;
    let pa = ProblemArgs { problem: path.to_path_buf(), n: a.n, gamma: a.gamma, policy: a.policy };
    let omegas = logspace(a.from, a.to, a.points)?;
    let (mut t, rows) = omega_table(&doc, &pr, &pa, &omegas)?;
    let with_oracle: Vec<&OmegaRow> = rows.iter().filter(|r| r.oracle.is_some()).collect();
    let ow: Vec<f64> = with_oracle.iter().map(|r| r.omega).collect();
    let errs: Vec<f64> = with_oracle.iter().map(|r| (r.oracle.unwrap() - r.expansion).norm()).collect();
    let mags: Vec<f64> = with_oracle.iter().map(|r| r.oracle.unwrap().norm()).collect();
    let all_w: Vec<f64> = rows.iter().map(|r| r.omega).collect();
    let bounds: Vec<f64> = rows.iter().map(|r| r.bound).collect();
    let exps: Vec<f64> = rows.iter().map(|r| r.expansion.norm()).collect();
    let side = |j: usize| rows.iter().map(|r| r.sides[j]).collect::<Vec<f64>>();
    t.meta(
        "slopes",
        json!({
            "abs_error": fit(&ow, &errs),
            "oracle_abs": fit(&ow, &mags),
            "bound": fit(&all_w, &bounds),
            "expansion_abs": fit(&all_w, &exps),
            "a1_abs": fit(&all_w, &side(0)),
            "a2_abs": fit(&all_w, &side(1)),
        }),
    );
    t.emit(a.output.format, a.output.out.as_deref())
}

const REGION_COLUMNS: &[&str] = &[
    "t",
    "x",
    "ratio",
    "region",
    "u_oracle_re",
    "u_oracle_im",
    "estimate_re",
    "estimate_im",
    "abs_error",
    "bound",
    "bound_satisfied",
];

struct RegionRow {
    t: f64,
    oracle: Complex64,
    error: Option<f64>,
    bound: Option<f64>,
    cells: Vec<Cell>,
}

fn region_row(t: f64, x: f64, data: &InitialData, params: &ConeParams) -> Result<RegionRow, Failure> {
    let region = classify(t, x, data, params)?;
    let u = oracle_solution(t, x, data)?;
    let (est, bound) = if region.tag == RegionTag::Unclassified {
        (None, None)
    } else {
        let e = solve_expansion(t, x, data, params)?;
        (e.value_expansion, e.remainder_bound_at_t)
    };
    let err = est.map(|e| (u - e).norm());
    let ok = match (err, bound) {
        (Some(e), Some(b)) => Some(e <= b),
        _ => None,
    };
    let cells = vec![
        t.into(),
        x.into(),
        region.ratio.into(),
        region.tag.name().into(),
        u.re.into(),
        u.im.into(),
        est.map(|e| e.re).into(),
        est.map(|e| e.im).into(),
        err.into(),
        bound.into(),
        ok.into(),
    ];
    Ok(RegionRow { t, oracle: u, error: err, bound, cells })
}

fn schrodinger_meta(t: &mut Table, doc: &InitialDataDoc, data: &InitialData, params: &ConeParams) -> Result<(), Failure> {
    t.meta("data", serde_json::to_value(doc).unwrap_or(Value::Null));
    t.meta("params", serde_json::to_value(params).unwrap_or(Value::Null));
    let rc = remainder_constants(data, params)?;
    t.meta("constants", serde_json::to_value(rc).unwrap_or(Value::Null));
    Ok(())
}

fn sweep_time(a: &SweepArgs, ratio: f64) -> Result<(), Failure> {
    let (doc, data) = load_data(&a.data)?;
    let params = cone_params(&a.cone);
    let ts = logspace(a.from, a.to, a.points)?;
    let rows: Vec<RegionRow> =
        ts.par_iter().map(|&t| region_row(t, 2.0 * ratio * t, &data, &params)).collect::<Result<_, _>>()?;
    let mut table = Table::new(REGION_COLUMNS);
    schrodinger_meta(&mut table, &doc, &data, &params)?;
    let mags: Vec<f64> = rows.iter().map(|r| r.oracle.norm()).collect();
    let with_err: Vec<&RegionRow> = rows.iter().filter(|r| r.error.is_some()).collect();
    let et: Vec<f64> = with_err.iter().map(|r| r.t).collect();
    let errs: Vec<f64> = with_err.iter().map(|r| r.error.unwrap()).collect();
    let bounds: Vec<f64> = with_err.iter().map(|r| r.bound.unwrap_or(f64::NAN)).collect();
    table.meta(
        "slopes",
        json!({ "u_oracle_abs": fit(&ts, &mags), "abs_error": fit(&et, &errs), "bound": fit(&et, &bounds) }),
    );
    table.rows = rows.into_iter().map(|r| r.cells).collect();
    table.emit(a.output.format, a.output.out.as_deref())
}

pub fn schrodinger(a: &SchrodingerArgs) -> Result<(), Failure> {
    let (doc, data) = load_data(&a.data)?;
    let params = cone_params(&a.cone);
    params.check(&data)?;
    if a.l2cone {
        return l2cone(a, &doc, &data, &params);
    }
    if a.ratio_points < 2 || !(a.ratio_max > a.ratio_min) {
        return Err(Failure::usage("need ratio_min < ratio_max and at least 2 ratio points".into()));
    }
    let mut grid = Vec::new();
    for &t in &a.t {
        for i in 0..a.ratio_points {
            let r = a.ratio_min + (a.ratio_max - a.ratio_min) * i as f64 / (a.ratio_points - 1) as f64;
            grid.push((t, 2.0 * t * r));
        }
    }
    let rows: Vec<RegionRow> = grid.par_iter().map(|&(t, x)| region_row(t, x, &data, &params)).collect::<Result<_, _>>()?;
    let mut table = Table::new(REGION_COLUMNS);
    schrodinger_meta(&mut table, &doc, &data, &params)?;
    table.rows = rows.into_iter().map(|r| r.cells).collect();
    table.emit(a.output.format, a.output.out.as_deref())
}

fn l2cone(a: &SchrodingerArgs, doc: &InitialDataDoc, data: &InitialData, params: &ConeParams) -> Result<(), Failure> {
    let reps = a.t.par_iter().map(|&t| l2_cross_section(t, data, params)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["t", "norm", "limit", "abs_difference", "bound", "bound_satisfied"]);
    schrodinger_meta(&mut table, doc, data, params)?;
    let ts: Vec<f64> = reps.iter().map(|r| r.t).collect();
    let diffs: Vec<f64> = reps.iter().map(|r| (r.norm - r.limit).abs()).collect();
    table.meta("slopes", json!({ "abs_difference": fit(&ts, &diffs) }));
    table.rows = reps
        .iter()
        .zip(&diffs)
        .map(|(r, &d)| vec![r.t.into(), r.norm.into(), r.limit.into(), d.into(), r.bound.into(), (d <= r.bound).into()])
        .collect();
    table.emit(a.output.format, a.output.out.as_deref())
}

pub fn validate(a: &ValidateArgs) -> Result<(), Failure> {
    let (_, pr) = load_problem(&a.problem.problem)?;
    let req = ExpansionRequest { n: a.problem.n, omega: a.omega, gamma: a.problem.gamma };
    let report = checked(&pr, &req, a.grid)?;
    let mut t = Table::new(&["name", "passed", "worst_point", "worst_value", "detail"]);
    t.rows = report
        .checks
        .iter()
        .map(|c| vec![c.name.clone().into(), c.passed.into(), c.worst_point.into(), c.worst_value.into(), c.detail.clone().into()])
        .collect();
    t.meta("passed", json!(report.passed()));
    t.emit(a.output.format, a.output.out.as_deref())?;
    reject_failures(&report)
}

pub fn constants(a: &ConstantsArgs) -> Result<(), Failure> {
    let mut t = Table::new(&["table", "N", "rho", "mu", "side", "name", "value"]);
    let row = |table: &str, n: Option<usize>, rho: Option<f64>, mu: Option<f64>, side: Option<usize>, name: &str, v: f64| {
        vec![table.into(), n.into(), rho.into(), mu.into(), side.into(), name.into(), v.into()]
    };
    for &rho in &a.rho {
        for n in 1..=3 {
            let lc = envelope_constants(n, rho)?;
            for (name, v) in [("a", lc.a), ("b", lc.b), ("c", lc.c)] {
                t.rows.push(row("envelope", Some(n), Some(rho), None, None, name, v));
            }
            if rho >= 2.0 {
                let p = refined_params(n, rho, a.gamma)?;
                for (name, v) in [("K", p.k), ("L", p.l), ("gamma", p.gamma), ("delta", p.delta)] {
                    t.rows.push(row("envelope", Some(n), Some(rho), None, None, name, v));
                }
            }
        }
    }
    for &rho in &a.rho {
        for &mu in &a.theta_mu {
            if !(rho >= 1.0 && mu > 0.0 && mu <= 1.0) {
                return Err(Failure::usage(format!("theta needs rho >= 1 and 0 < mu <= 1 (rho={rho}, mu={mu})")));
            }
            for n in 0..3 {
                for side in [1, 2] {
                    let th = theta_coefficient(n, side, rho, mu);
                    t.rows.push(row("theta", Some(n + 1), Some(rho), Some(mu), Some(side), "re", th.re));
                    t.rows.push(row("theta", Some(n + 1), Some(rho), Some(mu), Some(side), "im", th.im));
                }
            }
        }
    }
    let (doc, data) = load_data(&a.data)?;
    let params = cone_params(&a.cone);
    let rc = remainder_constants(&data, &params)?;
    if let Value::Object(m) = serde_json::to_value(rc).unwrap_or(Value::Null) {
        for (k, v) in m {
            if let Some(v) = v.as_f64() {
                t.rows.push(row("schrodinger", None, None, Some(data.mu), None, &k, v));
            }
        }
    }
    t.meta("data", serde_json::to_value(&doc).unwrap_or(Value::Null));
    t.meta("params", serde_json::to_value(params).unwrap_or(Value::Null));
    t.emit(a.output.format, a.output.out.as_deref())
}
