//! Problem definitions: phase, amplitude, cut-off and evaluation request.

use crate::error::{Error, Result};
use crate::taylor::{power_derivs, Taylor};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Largest derivative order callers may request.
pub const N_MAX: usize = 3;

/// A real function with derivatives `[f, f', f'', f''']`.
pub trait RealFn: Send + Sync {
    fn derivs(&self, p: f64) -> [f64; 4];
    fn eval(&self, p: f64) -> f64 {
        self.derivs(p)[0]
    }
}

/// A complex function with derivatives `[f, f', f'', f''']`.
pub trait ComplexFn: Send + Sync {
    fn derivs(&self, p: f64) -> [Complex64; 4];
    fn eval(&self, p: f64) -> Complex64 {
        self.derivs(p)[0]
    }
}

pub type RealHandle = Arc<dyn RealFn>;
pub type ComplexHandle = Arc<dyn ComplexFn>;

/// Wraps a closure returning derivatives.
pub struct RealClosure<F>(pub F);
impl<F: Fn(f64) -> [f64; 4] + Send + Sync> RealFn for RealClosure<F> {
    fn derivs(&self, p: f64) -> [f64; 4] {
        (self.0)(p)
    }
}

pub struct ComplexClosure<F>(pub F);
impl<F: Fn(f64) -> [Complex64; 4] + Send + Sync> ComplexFn for ComplexClosure<F> {
    fn derivs(&self, p: f64) -> [Complex64; 4] {
        (self.0)(p)
    }
}

pub fn real_fn<F: Fn(f64) -> [f64; 4] + Send + Sync + 'static>(f: F) -> RealHandle {
    Arc::new(RealClosure(f))
}

pub fn complex_fn<F: Fn(f64) -> [Complex64; 4] + Send + Sync + 'static>(f: F) -> ComplexHandle {
    Arc::new(ComplexClosure(f))
}

/// Promote a real function to a complex one.
pub fn complexify(f: RealHandle) -> ComplexHandle {
    complex_fn(move |p| f.derivs(p).map(|v| Complex64::new(v, 0.0)))
}

/// Phase `ψ` with `ψ'(p) = (p-p1)^{ρ1-1} (p2-p)^{ρ2-1} ψ̃(p)`.
#[derive(Clone)]
pub struct PhaseSpec {
    pub p1: f64,
    pub p2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub psi_tilde: RealHandle,
    pub psi: RealHandle,
}

impl fmt::Debug for PhaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseSpec")
            .field("p1", &self.p1)
            .field("p2", &self.p2)
            .field("rho1", &self.rho1)
            .field("rho2", &self.rho2)
            .finish_non_exhaustive()
    }
}

impl PhaseSpec {
    pub fn rho(&self, side: usize) -> f64 {
        if side == 1 { self.rho1 } else { self.rho2 }
    }

    pub fn endpoint(&self, side: usize) -> f64 {
        if side == 1 { self.p1 } else { self.p2 }
    }

    /// `ψ'(p)` assembled from `ψ̃`.
    pub fn dpsi(&self, p: f64) -> f64 {
        (p - self.p1).powf(self.rho1 - 1.0) * (self.p2 - p).powf(self.rho2 - 1.0) * self.psi_tilde.eval(p)
    }
}

/// Amplitude `U(p) = (p-p1)^{μ1-1} (p2-p)^{μ2-1} ũ(p)`.
#[derive(Clone)]
pub struct AmplitudeSpec {
    pub mu1: f64,
    pub mu2: f64,
    pub u_tilde: ComplexHandle,
    /// `|ũ(p_j)| > 0` for each endpoint, recorded at construction.
    pub endpoint_nonzero: [bool; 2],
}

impl fmt::Debug for AmplitudeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmplitudeSpec")
            .field("mu1", &self.mu1)
            .field("mu2", &self.mu2)
            .field("endpoint_nonzero", &self.endpoint_nonzero)
            .finish_non_exhaustive()
    }
}

impl AmplitudeSpec {
    pub fn new(mu1: f64, mu2: f64, u_tilde: ComplexHandle, p1: f64, p2: f64) -> Self {
        let nz = |p: f64| u_tilde.eval(p).norm() > 0.0;
        let endpoint_nonzero = [nz(p1), nz(p2)];
        AmplitudeSpec { mu1, mu2, u_tilde, endpoint_nonzero }
    }

    pub fn mu(&self, side: usize) -> f64 {
        if side == 1 { self.mu1 } else { self.mu2 }
    }

    pub fn eval(&self, p: f64, p1: f64, p2: f64) -> Complex64 {
        self.u_tilde.eval(p) * (p - p1).powf(self.mu1 - 1.0) * (p2 - p).powf(self.mu2 - 1.0)
    }
}

/// Shape of the glue function `f(x) = exp(-1/x^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepTemplate {
    /// `exp(-1/x)`
    #[default]
    Exp1,
    /// `exp(-1/x^2)`
    Exp2,
}

impl StepTemplate {
    fn power(self) -> f64 {
        match self {
            StepTemplate::Exp1 => 1.0,
            StepTemplate::Exp2 => 2.0,
        }
    }
}

/// Smooth step `g(x) = f(x)/(f(x)+f(1-x))`, 0 for `x ≤ 0` and 1 for `x ≥ 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmoothStep {
    pub template: StepTemplate,
}

impl RealFn for SmoothStep {
    fn derivs(&self, x: f64) -> [f64; 4] {
        if x <= 0.0 {
            return [0.0; 4];
        }
        if x >= 1.0 {
            return [1.0, 0.0, 0.0, 0.0];
        }
        // g = 1/(1+e^h), h = x^{-k} - (1-x)^{-k}
        let k = self.template.power();
        let a = power_derivs(x, -k, 4);
        let b = power_derivs(1.0 - x, -k, 4);
        let h = [a[0] - b[0], a[1] + b[1], a[2] - b[2], a[3] + b[3]];
        if h[0] > 700.0 {
            return [0.0; 4];
        }
        if h[0] < -700.0 {
            return [1.0, 0.0, 0.0, 0.0];
        }
        let s = 1.0 / (1.0 + h[0].exp());
        let q = s * (1.0 - s);
        let outer = [s, -q, q * (1.0 - 2.0 * s), -q * (1.0 - 6.0 * s + 6.0 * s * s)];
        Taylor::<f64, 4>::from_derivs(&h).compose(&outer).derivs()
    }
}

/// The glue step with the default `exp(-1/x)` template.
pub fn make_smooth_step() -> SmoothStep {
    SmoothStep::default()
}

/// `sup |f'|` on `[a, b]`: grid search over 4096 points, then golden-section refinement.
pub fn sup_abs_derivative(f: &dyn RealFn, a: f64, b: f64) -> f64 {
    let n = 4096;
    let h = (b - a) / (n - 1) as f64;
    let d = |x: f64| f.derivs(x)[1].abs();
    let (mut best_i, mut best) = (0, d(a));
    for i in 1..n {
        let v = d(a + h * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = (a + h * (best_i as f64 - 1.0)).max(a);
    let mut hi = (a + h * (best_i as f64 + 1.0)).min(b);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (d(x1), d(x2));
    for _ in 0..100 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = d(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = d(x2);
        }
        if hi - lo < 1e-14 * (b - a) {
            break;
        }
    }
    best.max(f1).max(f2)
}

/// Partition function `ν` with plateaus of width `η`.
#[derive(Clone)]
pub struct CutoffSpec {
    pub eta: f64,
    pub nu: RealHandle,
    /// `sup |ν'|` on `[p1, p2]`.
    pub m: f64,
}

impl fmt::Debug for CutoffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CutoffSpec").field("eta", &self.eta).field("m", &self.m).finish_non_exhaustive()
    }
}

impl CutoffSpec {
    /// `ν(p) = 1 - g((p - p1 - η)/(p2 - p1 - 2η))` built on the smooth step.
    pub fn standard(p1: f64, p2: f64, eta: f64, template: StepTemplate) -> Result<Self> {
        let len = p2 - p1;
        if !(eta > 0.0 && eta < 0.5 * len) {
            return Err(Error::InvalidInput(format!("eta must lie in (0, {}), got {eta}", 0.5 * len)));
        }
        let w = len - 2.0 * eta;
        let g = SmoothStep { template };
        let nu = real_fn(move |p| {
            let d = g.derivs((p - p1 - eta) / w);
            [1.0 - d[0], -d[1] / w, -d[2] / (w * w), -d[3] / (w * w * w)]
        });
        let m = sup_abs_derivative(&*nu, p1, p2);
        Ok(CutoffSpec { eta, nu, m })
    }
}

/// Expansion depth, large parameter and refined-bound tuning.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExpansionRequest {
    #[serde(rename = "N")]
    pub n: usize,
    pub omega: f64,
    pub gamma: f64,
}

impl ExpansionRequest {
    pub const DEFAULT_GAMMA: f64 = 0.6;

    pub fn new(n: usize, omega: f64) -> Self {
        ExpansionRequest { n, omega, gamma: Self::DEFAULT_GAMMA }
    }

    pub fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        if self.n > N_MAX {
            return Err(Error::OrderTooHigh(self.n));
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidInput(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidInput(format!("gamma must lie in (0,1), got {}", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Sample point with the worst violation (or worst margin when passing).
    pub worst_point: Option<f64>,
    pub worst_value: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, passed: bool, worst: Option<(f64, f64)>, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        worst_point: worst.map(|w| w.0),
        worst_value: worst.map(|w| w.1),
        detail: detail.into(),
    }
}

/// Run every invariant on a deterministic grid of `n_grid` points.
pub fn validate_problem(
    phase: &PhaseSpec,
    amp: &AmplitudeSpec,
    cutoff: &CutoffSpec,
    req: &ExpansionRequest,
) -> Result<ValidationReport> {
    validate_problem_with_grid(phase, amp, cutoff, req, 1001)
}

pub fn validate_problem_with_grid(
    phase: &PhaseSpec,
    amp: &AmplitudeSpec,
    cutoff: &CutoffSpec,
    req: &ExpansionRequest,
    n_grid: usize,
) -> Result<ValidationReport> {
    let (p1, p2) = (phase.p1, phase.p2);
    if !(p1.is_finite() && p2.is_finite() && p1 < p2) {
        return Err(Error::InvalidInput(format!("need finite p1 < p2, got [{p1}, {p2}]")));
    }
    if !(req.omega > 0.0) {
        return Err(Error::InvalidInput(format!("omega must be positive, got {}", req.omega)));
    }
    let len = p2 - p1;
    let grid: Vec<f64> = (0..n_grid).map(|i| p1 + len * i as f64 / (n_grid - 1) as f64).collect();
    let mut out = Vec::new();

    let rho_ok = phase.rho1 >= 1.0 && phase.rho2 >= 1.0;
    out.push(check(
        "phase.rho",
        rho_ok,
        None,
        format!("rho1={}, rho2={} (need >= 1)", phase.rho1, phase.rho2),
    ));

    // ψ̃ > 0
    let (wp, wv) = grid
        .iter()
        .map(|&p| (p, phase.psi_tilde.eval(p)))
        .fold((p1, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    out.push(check("phase.psi_tilde_positive", wv > 0.0, Some((wp, wv)), "min of psi_tilde on grid"));

    // ψ strictly increasing
    let mut worst = (p1, f64::INFINITY);
    for w in grid.windows(2) {
        let d = phase.psi.eval(w[1]) - phase.psi.eval(w[0]);
        if d < worst.1 {
            worst = (w[0], d);
        }
    }
    out.push(check("phase.psi_increasing", worst.1 > 0.0, Some(worst), "min increment of psi between samples"));

    // ψ vs ψ̃ consistency, five-point difference away from the endpoints
    let h = 2e-3 * len;
    let scale = grid.iter().map(|&p| phase.dpsi(p).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst = (p1, 0.0f64);
    for &p in grid.iter().filter(|&&p| p - p1 >= 0.05 * len && p2 - p >= 0.05 * len) {
        let f = |x: f64| phase.psi.eval(x);
        let fd = (f(p - 2.0 * h) - 8.0 * f(p - h) + 8.0 * f(p + h) - f(p + 2.0 * h)) / (12.0 * h);
        let rel = (fd - phase.dpsi(p)).abs() / scale;
        if rel > worst.1 || !rel.is_finite() {
            worst = (p, rel);
        }
    }
    out.push(check(
        "phase.psi_consistency",
        worst.1 <= 1e-8,
        Some(worst),
        "relative mismatch between psi' and (p-p1)^(rho1-1)(p2-p)^(rho2-1) psi_tilde",
    ));

    let mu_ok = |m: f64| m > 0.0 && m <= 1.0;
    out.push(check(
        "amplitude.mu_range",
        mu_ok(amp.mu1) && mu_ok(amp.mu2),
        None,
        format!("mu1={}, mu2={} (need 0 < mu <= 1)", amp.mu1, amp.mu2),
    ));

    let usup = grid.iter().map(|&p| amp.u_tilde.eval(p).norm()).fold(0.0, f64::max);
    let thresh = 1e-12 * usup.max(1.0);
    let mut nz_ok = true;
    let mut nz_worst = None;
    for (side, (&mu, &p)) in [amp.mu1, amp.mu2].iter().zip(&[p1, p2]).enumerate() {
        let v = amp.u_tilde.eval(p).norm();
        if mu != 1.0 && v <= thresh {
            nz_ok = false;
            nz_worst = Some((p, v));
            let _ = side;
        }
    }
    out.push(check(
        "amplitude.endpoint_nonzero",
        nz_ok,
        nz_worst,
        "u_tilde(p_j) must be nonzero where mu_j != 1",
    ));

    let mut fin = (p1, 0.0);
    let mut fin_ok = true;
    for &p in &grid[1..grid.len() - 1] {
        let v = amp.eval(p, p1, p2);
        if !(v.re.is_finite() && v.im.is_finite()) {
            fin_ok = false;
            fin = (p, f64::NAN);
            break;
        }
        if v.norm() > fin.1 {
            fin = (p, v.norm());
        }
    }
    out.push(check("amplitude.finite_interior", fin_ok, Some(fin), "U finite strictly inside (p1,p2)"));

    let eta = cutoff.eta;
    out.push(check(
        "cutoff.eta_range",
        eta > 0.0 && eta < 0.5 * len,
        None,
        format!("eta={eta}, must lie in (0, {})", 0.5 * len),
    ));

    let mut worst = (p1, 0.0f64);
    for &p in &grid {
        let v = cutoff.nu.eval(p);
        let dev = if p <= p1 + eta {
            (v - 1.0).abs()
        } else if p >= p2 - eta {
            v.abs()
        } else if !(0.0..=1.0).contains(&v) {
            if v < 0.0 { -v } else { v - 1.0 }
        } else {
            0.0
        };
        if dev > worst.1 {
            worst = (p, dev);
        }
    }
    out.push(check("cutoff.plateaus", worst.1 == 0.0, Some(worst), "nu = 1 near p1, 0 near p2, 0 <= nu <= 1"));

    let mut worst = (p1, 0.0f64);
    for edge in [p1 + eta, p2 - eta] {
        for off in [-1e-9, 1e-9] {
            let p = edge + off;
            let d = cutoff.nu.derivs(p);
            for v in d.iter().skip(1).take(req.n.min(N_MAX)) {
                if v.abs() > worst.1 {
                    worst = (p, v.abs());
                }
            }
        }
    }
    out.push(check("cutoff.flat_edges", worst.1 < 1e-6, Some(worst), "derivatives of nu vanish at plateau edges"));

    out.push(check(
        "request",
        req.check().is_ok(),
        None,
        match req.check() {
            Ok(()) => "ok".to_string(),
            Err(e) => e.to_string(),
        },
    ));

    Ok(ValidationReport { checks: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smooth_step_values() {
        let g = make_smooth_step();
        assert_relative_eq!(g.eval(0.5), 0.5, epsilon = 1e-15);
        assert_eq!(g.eval(-1.0), 0.0);
        assert_eq!(g.eval(2.0), 1.0);
    }

    #[test]
    fn smooth_step_derivatives_match_differences() {
        for t in [StepTemplate::Exp1, StepTemplate::Exp2] {
            let g = SmoothStep { template: t };
            for &x in &[0.2, 0.5, 0.77] {
                let h = 1e-4;
                let d = g.derivs(x);
                for k in 0..3 {
                    let f = |y: f64| g.derivs(y)[k];
                    let fd = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
                    assert_relative_eq!(d[k + 1], fd, max_relative = 1e-6, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn cutoff_m_matches_closed_form() {
        // g'(1/2) = 2 for exp(-1/x): derivative of logistic at h=0 is 1/4 times h'(1/2) = 8
        let c = CutoffSpec::standard(0.0, 1.0, 0.25, StepTemplate::Exp1).unwrap();
        assert_relative_eq!(c.m, 2.0 / 0.5, max_relative = 1e-10);
    }
}
