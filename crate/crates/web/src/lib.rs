//! Browser bindings. Every export returns a JSON string; the `*_json`
//! functions hold the logic and are callable (and tested) natively.

use serde::Serialize;
use statphase::bounds::{side_bound, BoundPolicy};
use statphase::expansion::{build_side, expansion_terms};
use statphase::oracle::oscillatory_integral;
use statphase::problem::{InitialDataDoc, ProblemDoc};
use statphase::schrodinger::{classify, oracle_solution, remainder_constants, solve_expansion, ConeParams, InitialData};
use statphase::types::ExpansionRequest;
use wasm_bindgen::prelude::*;

#[derive(Serialize, Default)]
struct Curve {
    omega: Vec<f64>,
    expansion_abs: Vec<f64>,
    oracle_abs: Vec<f64>,
    abs_error: Vec<f64>,
    bound: Vec<f64>,
}

fn preset(name: &str, mu: f64) -> Result<ProblemDoc, String> {
    match name {
        "linear" => Ok(ProblemDoc::linear()),
        "fresnel" => Ok(ProblemDoc::fresnel()),
        "singular" => Ok(ProblemDoc::singular(mu)),
        "intro" => Ok(ProblemDoc::singular_intro(mu)),
        _ => Err(format!("unknown problem '{name}'")),
    }
}

/// Expansion, oracle and bound over a log grid `ω ∈ [from, to]`.
pub fn expansion_curve_json(problem: &str, mu: f64, n: usize, from: f64, to: f64, points: usize) -> Result<String, String> {
    if !(from > 0.0 && to > from && to <= 1e4 && (2..=400).contains(&points)) {
        return Err("need 0 < from < to <= 1e4 and 2..=400 points".into());
    }
    let pr = preset(problem, mu)?.build().map_err(|e| e.to_string())?;
    let req = ExpansionRequest::new(n, from);
    let terms = expansion_terms(&pr.phase, &pr.amp, &pr.cutoff, &req).map_err(|e| e.to_string())?;
    let mut bounds = Vec::new();
    for side in [1, 2] {
        let sp = build_side(&pr.phase, &pr.amp, &pr.cutoff, side, n).map_err(|e| e.to_string())?;
        bounds.push(side_bound(&sp.tamp, &pr.cutoff, &req, BoundPolicy::Auto).map_err(|e| e.to_string())?);
    }
    let mut c = Curve::default();
    for i in 0..points {
        let w = from * (to / from).powf(i as f64 / (points - 1) as f64);
        let e = terms.evaluate(w);
        let o = oscillatory_integral(&pr.phase, &pr.amp, w).map_err(|e| e.to_string())?.value;
        c.omega.push(w);
        c.expansion_abs.push(e.norm());
        c.oracle_abs.push(o.norm());
        c.abs_error.push((o - e).norm());
        c.bound.push(bounds.iter().map(|b| b.value(w)).sum());
    }
    Ok(serde_json::to_string(&c).expect("serializable"))
}

#[derive(Serialize)]
struct ConePoint {
    ratio: f64,
    region: &'static str,
    u_abs: f64,
    abs_error: Option<f64>,
    bound: Option<f64>,
}

/// Region classification, oracle modulus and error/bound along `x = 2·ratio·t`.
pub fn cone_map_json(mu: f64, t: f64, ratio_min: f64, ratio_max: f64, points: usize) -> Result<String, String> {
    if !(ratio_max > ratio_min && (2..=400).contains(&points)) {
        return Err("need ratio_min < ratio_max and 2..=400 points".into());
    }
    let data = InitialData::from_doc(&InitialDataDoc::intro(mu)).map_err(|e| e.to_string())?;
    let params = ConeParams::default();
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let r = ratio_min + (ratio_max - ratio_min) * i as f64 / (points - 1) as f64;
        let x = 2.0 * r * t;
        let region = classify(t, x, &data, &params).map_err(|e| e.to_string())?;
        let u = oracle_solution(t, x, &data).map_err(|e| e.to_string())?;
        let (mut err, mut bound) = (None, None);
        if region.tag != statphase::schrodinger::RegionTag::Unclassified {
            let est = solve_expansion(t, x, &data, &params).map_err(|e| e.to_string())?;
            err = est.value_expansion.map(|v| (u - v).norm());
            bound = est.remainder_bound_at_t;
        }
        out.push(ConePoint { ratio: r, region: region.tag.name(), u_abs: u.norm(), abs_error: err, bound });
    }
    Ok(serde_json::to_string(&out).expect("serializable"))
}

/// Remainder constants for the intro data with the given cone widths.
pub fn constants_table_json(mu: f64, eps1: f64, eps2: f64, eps: f64) -> Result<String, String> {
    let data = InitialData::from_doc(&InitialDataDoc::intro(mu)).map_err(|e| e.to_string())?;
    let params = ConeParams { eps1, eps2, eps, ..Default::default() };
    let rc = remainder_constants(&data, &params).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&rc).expect("serializable"))
}

#[wasm_bindgen]
pub fn expansion_curve(problem: &str, mu: f64, n: usize, from: f64, to: f64, points: usize) -> Result<String, JsValue> {
    expansion_curve_json(problem, mu, n, from, to, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cone_map(mu: f64, t: f64, ratio_min: f64, ratio_max: f64, points: usize) -> Result<String, JsValue> {
    cone_map_json(mu, t, ratio_min, ratio_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn constants_table(mu: f64, eps1: f64, eps2: f64, eps: f64) -> Result<String, JsValue> {
    constants_table_json(mu, eps1, eps2, eps).map_err(|e| JsValue::from_str(&e))
}
