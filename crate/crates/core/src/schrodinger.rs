//! Free Schrödinger evolution of band-limited data with a singular spectral edge.
//!
//! `u(t,x) = (1/2π) ∫_{p1}^{p2} 𝓕u₀(p) e^{-itp² + ixp} dp` with
//! `𝓕u₀(p) = (p-p1)^{μ-1} ũ(p)`.

use crate::bounds::refined_params;
use crate::error::{Error, Result};
use crate::oracle::{weighted_oscillatory, OracleOptions, OMEGA_MAX};
use crate::problem::InitialDataDoc;
use crate::quadrature::{adaptive_gk21, gauss_legendre, linspace, pairwise_sum};
use crate::special::gamma;
use crate::types::{sup_abs_derivative, ComplexHandle, CutoffSpec, SmoothStep, StepTemplate};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Clone)]
pub struct InitialData {
    pub p1: f64,
    pub p2: f64,
    pub mu: f64,
    pub u_tilde: ComplexHandle,
}

impl std::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InitialData")
            .field("p1", &self.p1)
            .field("p2", &self.p2)
            .field("mu", &self.mu)
            .finish_non_exhaustive()
    }
}

impl InitialData {
    /// Checks the band, `μ ∈ (0,1)`, `ũ(p1) ≠ 0` and `ũ(p2) = 0`.
    pub fn new(p1: f64, p2: f64, mu: f64, u_tilde: ComplexHandle) -> Result<Self> {
        if !(p1.is_finite() && p2.is_finite() && p1 < p2) {
            return Err(Error::InvalidInput(format!("need finite p1 < p2, got [{p1}, {p2}]")));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidInput(format!("initial data needs mu in (0,1), got {mu}")));
        }
        let d = InitialData { p1, p2, mu, u_tilde };
        let w = d.sobolev_norm();
        if d.u_tilde.eval(p1).norm() <= 1e-12 * w.max(1.0) {
            return Err(Error::InvalidInput("u_tilde(p1) must be nonzero".into()));
        }
        if d.u_tilde.eval(p2).norm() > 1e-12 * w.max(1.0) {
            return Err(Error::InvalidInput("u_tilde(p2) must vanish".into()));
        }
        Ok(d)
    }

    pub fn from_doc(doc: &InitialDataDoc) -> Result<Self> {
        Self::new(doc.p1, doc.p2, doc.mu, doc.u_tilde.complex_handle(doc.p1))
    }

    /// `𝓕u₀(p)`, zero outside the band.
    pub fn fourier(&self, p: f64) -> Complex64 {
        if p <= self.p1 || p > self.p2 {
            return Complex64::new(0.0, 0.0);
        }
        self.u_tilde.eval(p) * (p - self.p1).powf(self.mu - 1.0)
    }

    /// `max(sup|ũ|, sup|ũ'|)` on a 4096-point grid.
    pub fn sobolev_norm(&self) -> f64 {
        linspace(self.p1, self.p2, 4095).into_iter().fold(0.0, |m, p| {
            let d = self.u_tilde.derivs(p);
            m.max(d[0].norm()).max(d[1].norm())
        })
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum RegionTag {
    InsideCone,
    LeftOutside,
    RightOutside,
    CriticalLeft,
    CriticalRight,
    Unclassified,
}

impl RegionTag {
    pub fn name(self) -> &'static str {
        match self {
            RegionTag::InsideCone => "inside_cone",
            RegionTag::LeftOutside => "left_outside",
            RegionTag::RightOutside => "right_outside",
            RegionTag::CriticalLeft => "critical_left",
            RegionTag::CriticalRight => "critical_right",
            RegionTag::Unclassified => "unclassified",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConeRegion {
    pub tag: RegionTag,
    /// `x/(2t)`
    pub ratio: f64,
}

/// Cone widths, decay parameter and cut-off choices.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConeParams {
    pub eps1: f64,
    pub eps2: f64,
    /// Width for the outside cones.
    pub eps: f64,
    /// `δ ∈ (max{μ,1/2}, 1)`; `None` picks `0.9·max{μ,1/2} + 0.1`.
    pub delta: Option<f64>,
    pub template: StepTemplate,
    /// Plateau width of the fixed cut-off used outside the cone and on the critical line;
    /// `None` picks `(p2-p1)/4`.
    pub eta: Option<f64>,
}

impl Default for ConeParams {
    fn default() -> Self {
        ConeParams { eps1: 0.1, eps2: 0.1, eps: 0.2, delta: None, template: StepTemplate::Exp1, eta: None }
    }
}

impl ConeParams {
    pub fn delta_for(&self, mu: f64) -> f64 {
        self.delta.unwrap_or(0.9 * mu.max(0.5) + 0.1)
    }

    pub fn eta_for(&self, data: &InitialData) -> f64 {
        self.eta.unwrap_or(0.25 * (data.p2 - data.p1))
    }

    pub fn check(&self, data: &InitialData) -> Result<()> {
        let (p1, p2) = (data.p1, data.p2);
        if !(self.eps1 > 0.0 && self.eps2 > 0.0 && p1 + self.eps1 < p2 - self.eps2) {
            return Err(Error::InvalidInput(format!(
                "need eps1, eps2 > 0 with p1+eps1 < p2-eps2 (eps1={}, eps2={})",
                self.eps1, self.eps2
            )));
        }
        let e = self.eps;
        if !(e > 0.0 && -1.0 / e < p1 - e && p2 + e < 1.0 / e) {
            return Err(Error::InvalidInput(format!("need eps > 0 with -1/eps < p1-eps and p2+eps < 1/eps (eps={e})")));
        }
        let d = self.delta_for(data.mu);
        if !(d > data.mu.max(0.5) && d < 1.0) {
            return Err(Error::InvalidInput(format!("delta must lie in (max(mu,1/2), 1), got {d}")));
        }
        let eta = self.eta_for(data);
        if !(eta > 0.0 && eta < 0.5 * (p2 - p1)) {
            return Err(Error::InvalidInput(format!("eta must lie in (0, (p2-p1)/2), got {eta}")));
        }
        Ok(())
    }
}

/// Tags `(t, x)`; critical lines first, then the cone, then the outside cones.
pub fn classify(t: f64, x: f64, data: &InitialData, params: &ConeParams) -> Result<ConeRegion> {
    params.check(data)?;
    if !(t > 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("need t > 0 and finite x, got t={t}, x={x}")));
    }
    let r = x / (2.0 * t);
    let (p1, p2) = (data.p1, data.p2);
    // closed intervals up to rounding in x/(2t)
    let tol = |p: f64| 1e-12 * p.abs().max(1.0);
    let near = |p: f64| (r - p).abs() <= tol(p);
    let within = |lo: f64, hi: f64| r >= lo - tol(lo) && r <= hi + tol(hi);
    let tag = if near(p1) {
        RegionTag::CriticalLeft
    } else if near(p2) {
        RegionTag::CriticalRight
    } else if within(p1 + params.eps1, p2 - params.eps2) {
        RegionTag::InsideCone
    } else if within(-1.0 / params.eps, p1 - params.eps) {
        RegionTag::LeftOutside
    } else if within(p2 + params.eps, 1.0 / params.eps) {
        RegionTag::RightOutside
    } else {
        RegionTag::Unclassified
    };
    Ok(ConeRegion { tag, ratio: r })
}

fn violation(t: f64, x: f64, expected: &str) -> Error {
    Error::RegionViolation { t, x, expected: expected.into() }
}

/// `H(t,x)`, the stationary-point coefficient of `t^{-1/2}`.
pub fn coefficient_h(t: f64, x: f64, data: &InitialData) -> Result<Complex64> {
    let r = x / (2.0 * t);
    if !(r > data.p1 && r <= data.p2) {
        return Err(violation(t, x, "inside_cone"));
    }
    let phase = Complex64::from_polar(1.0, -PI / 4.0 + x * x / (4.0 * t));
    Ok(phase * data.u_tilde.eval(r) * ((r - data.p1).powf(data.mu - 1.0) / (2.0 * PI.sqrt())))
}

fn k_prefactor(mu: f64) -> f64 {
    gamma(mu) / (2f64.powf(mu + 1.0) * PI)
}

/// `K_μ(t,x)`, the edge coefficient of `t^{-μ}` inside the cone.
pub fn coefficient_k_mu(t: f64, x: f64, data: &InitialData) -> Result<Complex64> {
    let r = x / (2.0 * t);
    let (p1, mu) = (data.p1, data.mu);
    if !(r > p1 && r <= data.p2) {
        return Err(violation(t, x, "inside_cone"));
    }
    let phase = Complex64::from_polar(1.0, PI * mu / 2.0 - t * p1 * p1 + x * p1);
    Ok(phase * data.u_tilde.eval(p1) * (k_prefactor(mu) * (r - p1).powf(-mu)))
}

/// `K^c_{j,μ}(t,x)` outside the band, `j = 1` left and `j = 2` right.
pub fn coefficient_k_c(t: f64, x: f64, data: &InitialData, side: usize) -> Result<Complex64> {
    let r = x / (2.0 * t);
    let (p1, mu) = (data.p1, data.mu);
    let sg = match side {
        1 if r < p1 => -1.0,
        2 if r > data.p2 => 1.0,
        1 => return Err(violation(t, x, "left_outside")),
        2 => return Err(violation(t, x, "right_outside")),
        _ => return Err(Error::InvalidInput(format!("side must be 1 or 2, got {side}"))),
    };
    let phase = Complex64::from_polar(1.0, sg * PI * mu / 2.0 - t * p1 * p1 + x * p1);
    Ok(phase * data.u_tilde.eval(p1) * (k_prefactor(mu) * (sg * (r - p1)).powf(-mu)))
}

/// `L_μ(t) = ½ Γ(μ/2) e^{-iπμ/4} e^{itp1²} ũ(p1)` as printed; the solution carries an extra `1/2π`.
pub fn coefficient_l_mu(t: f64, data: &InitialData) -> Complex64 {
    let (p1, mu) = (data.p1, data.mu);
    Complex64::from_polar(0.5 * gamma(mu / 2.0), -PI * mu / 4.0 + t * p1 * p1) * data.u_tilde.eval(p1)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct RemainderConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// `(c1+c2+c3+c4)/2π`
    pub c_total: f64,
    pub c1_c: f64,
    pub c2_c: f64,
    /// Printed critical-line constant.
    pub c_crit: f64,
    pub delta: f64,
    pub gamma: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub w: f64,
    pub m_p1: f64,
    pub m_p2: f64,
    pub m: f64,
    pub eta: f64,
}

/// Evaluates the explicit constants of the three regimes.
pub fn remainder_constants(data: &InitialData, params: &ConeParams) -> Result<RemainderConstants> {
    params.check(data)?;
    let (p1, p2, mu) = (data.p1, data.p2, data.mu);
    let len = p2 - p1;
    let delta = params.delta_for(mu);
    let gamma = 2.0 * delta - 1.0;
    let l = refined_params(1, 2.0, gamma)?.l;
    let w = data.sobolev_norm();
    let (e1, e2) = (params.eps1, params.eps2);
    let (h1, h2) = (e1 / 3.0, e2 / 3.0);
    // worst-case compression: transition width ε - 2ε/3 = ε/3
    let gmax = sup_abs_derivative(&SmoothStep { template: params.template }, 0.0, 1.0);
    let m_p1 = gmax / (e1 / 3.0);
    let m_p2 = gmax / (e2 / 3.0);

    let c1 = len.powf(1.0 + mu) / (2.0 * mu) * h1.powi(-2) * (m_p1 + 0.5 * (1.0 - mu) * h1.powi(-2) * len + 1.0 + 1.0 / h1) * w;
    let lg = l / (1.0 - gamma) * len.powf(1.0 - gamma);
    let c2 = lg * h1.powf(mu - 1.0) * (m_p1 + (1.0 - mu) / h1 + 1.0) * w;
    let c3 = 0.5 * len * len * h2.powi(-2) * e1.powf(mu - 1.0) * (m_p2 + (1.0 - mu) / e1 + 1.0 + 1.0 / h2) * w;
    let c4 = lg * e1.powf(mu - 1.0) * (m_p2 + (1.0 - mu) / e1 + 1.0) * w;
    let c_total = (c1 + c2 + c3 + c4) / (2.0 * PI);

    let eta = params.eta_for(data);
    let m = CutoffSpec::standard(p1, p2, eta, params.template)?.m;
    let e = params.eps;
    let outside = |a: f64| {
        (a / e.powi(2)) / (4.0 * PI)
            * (len.powf(mu) / mu * (m + 0.5 * (1.0 - mu) * a / e.powi(2) + 1.0 + 1.0 / e)
                + eta.powf(mu - 1.0) * len * (m + (1.0 - mu) / eta + 1.0 + 1.0 / e))
            * w
    };
    let c1_c = outside(1.0 / e + p2);
    let c2_c = outside(1.0 / e - p1);
    let c_crit = 0.5 * len * len * eta.powf(mu - 3.0) * w * (m + (2.0 - mu) / eta + 1.0)
        + PI.sqrt() / (2.0 * mu) * len.powf(mu) * w * (m + 1.0);
    Ok(RemainderConstants {
        c1,
        c2,
        c3,
        c4,
        c_total,
        c1_c,
        c2_c,
        c_crit,
        delta,
        gamma,
        l,
        w,
        m_p1,
        m_p2,
        m,
        eta,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolutionEstimate {
    pub region: ConeRegion,
    /// Leading-term approximation; absent on the right critical line.
    pub value_expansion: Option<Complex64>,
    /// Contributions actually summed, keyed `H`, `K_mu`, `K_c`, `L_mu`.
    pub leading_terms: BTreeMap<String, Complex64>,
    pub remainder_constant: Option<f64>,
    pub remainder_bound_at_t: Option<f64>,
    /// Decay exponent of the leading behaviour.
    pub decay_exponent: f64,
}

/// Leading terms and explicit error bound at `(t, x)`.
pub fn solve_expansion(t: f64, x: f64, data: &InitialData, params: &ConeParams) -> Result<SolutionEstimate> {
    let region = classify(t, x, data, params)?;
    let rc = remainder_constants(data, params)?;
    let mu = data.mu;
    let mut terms = BTreeMap::new();
    let (value, constant, bound, exponent) = match region.tag {
        RegionTag::InsideCone => {
            let h = coefficient_h(t, x, data)? * t.powf(-0.5);
            let k = coefficient_k_mu(t, x, data)? * t.powf(-mu);
            terms.insert("H".to_string(), h);
            terms.insert("K_mu".to_string(), k);
            (Some(h + k), Some(rc.c_total), Some(rc.c_total * (1.0 / t + t.powf(-rc.delta))), mu.min(0.5))
        }
        RegionTag::LeftOutside | RegionTag::RightOutside => {
            let (side, c) = if region.tag == RegionTag::LeftOutside { (1, rc.c1_c) } else { (2, rc.c2_c) };
            let k = coefficient_k_c(t, x, data, side)? * t.powf(-mu);
            terms.insert("K_c".to_string(), k);
            (Some(k), Some(c), Some(c / t), mu)
        }
        RegionTag::CriticalLeft => {
            let l = coefficient_l_mu(t, data) * (t.powf(-mu / 2.0) / (2.0 * PI));
            terms.insert("L_mu".to_string(), l);
            let c = rc.c_crit / (2.0 * PI);
            (Some(l), Some(c), Some(c * (1.0 / t + t.powf(-0.5))), mu / 2.0)
        }
        RegionTag::CriticalRight => (None, None, None, mu.min(0.5)),
        RegionTag::Unclassified => return Err(violation(t, x, "a classified region")),
    };
    Ok(SolutionEstimate {
        region,
        value_expansion: value,
        leading_terms: terms,
        remainder_constant: constant,
        remainder_bound_at_t: bound,
        decay_exponent: exponent,
    })
}

/// `u(t,x)` by direct quadrature with `t` as the large parameter.
pub fn oracle_solution(t: f64, x: f64, data: &InitialData) -> Result<Complex64> {
    oracle_solution_with(t, x, data, OracleOptions::default())
}

pub fn oracle_solution_with(t: f64, x: f64, data: &InitialData, opts: OracleOptions) -> Result<Complex64> {
    if !(t > 0.0 && t <= OMEGA_MAX) || !x.is_finite() {
        return Err(Error::Precondition(format!("oracle needs 0 < t <= {OMEGA_MAX} and finite x, got t={t}, x={x}")));
    }
    let (p1, p2) = (data.p1, data.p2);
    let r = x / t;
    let f = |p: f64| data.u_tilde.eval(p) * Complex64::new(0.0, t * (-p * p + r * p)).exp();
    let kmax = t * (r - 2.0 * p1).abs().max((r - 2.0 * p2).abs());
    let q = weighted_oscillatory(&f, p1, p2, data.mu, 1.0, kmax, opts)?;
    Ok(q.value / (2.0 * PI))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct L2Report {
    pub t: f64,
    pub norm: f64,
    pub limit: f64,
    pub bound: f64,
}

/// `‖u(t,·)‖_{L²(I_t)}` against its limit `‖𝓕u₀‖/√(2π)` on the cone cross-section.
pub fn l2_cross_section(t: f64, data: &InitialData, params: &ConeParams) -> Result<L2Report> {
    params.check(data)?;
    let mu = data.mu;
    if !(mu > 0.5) {
        return Err(Error::Precondition(format!("L2 cross-section needs mu in (1/2, 1), got {mu}")));
    }
    if !(t >= 1.0) {
        return Err(Error::Precondition(format!("L2 cross-section needs t >= 1, got {t}")));
    }
    let (a, b) = (data.p1 + params.eps1, data.p2 - params.eps2);
    // |u|² carries cross terms oscillating like e^{ity²}: keep about 20 oscillations per panel
    let kmax = 2.0 * t * a.abs().max(b.abs());
    let panels = ((kmax * (b - a) / (2.0 * PI) / 20.0).ceil() as usize).max(1);
    let rule = gauss_legendre(256);
    let edges = linspace(a, b, panels);
    let mut nodes = Vec::with_capacity(panels * 256);
    for wdw in edges.windows(2) {
        let h = 0.5 * (wdw[1] - wdw[0]);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            nodes.push((wdw[0] + h * (1.0 + x), wt * h));
        }
    }
    let eval = |&(y, wt): &(f64, f64)| oracle_solution(t, 2.0 * t * y, data).map(|u| Complex64::new(u.norm_sqr() * 2.0 * t * wt, 0.0));
    #[cfg(feature = "parallel")]
    let vals: Result<Vec<Complex64>> = {
        use rayon::prelude::*;
        nodes.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let vals: Result<Vec<Complex64>> = nodes.iter().map(eval).collect();
    let norm = pairwise_sum(&vals?).re.sqrt();

    let sq = |p: f64| Complex64::new(data.fourier(p).norm_sqr(), 0.0);
    let lim = adaptive_gk21(&sq, &linspace(a, b, 8), 1e-14, 2000)?.value.re;
    let limit = (lim / (2.0 * PI)).sqrt();

    let rc = remainder_constants(data, params)?;
    let sup_k = k_prefactor(mu) * data.u_tilde.eval(data.p1).norm() * params.eps1.powf(-mu);
    let c_tilde = sup_k + 2.0 * rc.c_total;
    let c = (2.0 * (b - a)).sqrt() * c_tilde;
    Ok(L2Report { t, norm, limit, bound: c * t.powf(0.5 - mu) })
}
