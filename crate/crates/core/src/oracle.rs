//! Direct quadrature for the oscillatory integrals and the contour functions `φ_n`.

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk21, gauss_jacobi, linspace, pairwise_sum, GaussRule};
use crate::special::gamma;
use crate::types::{AmplitudeSpec, Check, PhaseSpec};
use num_complex::Complex64;
use std::f64::consts::PI;

pub use crate::quadrature::QuadratureResult;

/// Largest frequency the direct quadrature is meant for.
pub const OMEGA_MAX: f64 = 1e4;

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Interior panels per wavelength and the Gauss–Jacobi node multiplier.
    pub density: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { abs_tol: 1e-11, max_panels: 200_000, density: 1 }
    }
}

impl OracleOptions {
    pub fn doubled(self) -> Self {
        OracleOptions { density: 2 * self.density, ..self }
    }
}

/// Endpoint panel with weight `(p-p1)^{e}` (left) or `(p2-p)^{e}` (right).
/// Shrinks the panel until two rule sizes agree; returns `(value, width, error)`.
fn endpoint_panel<F>(f: &F, anchor: f64, left: bool, e: f64, width: f64, tol: f64, density: usize) -> (Complex64, f64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let n = 32 * density;
    let (lo, hi): (GaussRule, GaussRule) = if left {
        (gauss_jacobi(n, 0.0, e), gauss_jacobi(n + 8 * density, 0.0, e))
    } else {
        (gauss_jacobi(n, e, 0.0), gauss_jacobi(n + 8 * density, e, 0.0))
    };
    let apply = |r: &GaussRule, w: f64| if left { r.left_weighted(f, anchor, w) } else { r.right_weighted(f, anchor, w) };
    let mut w = width;
    for _ in 0..60 {
        let a = apply(&lo, w);
        let b = apply(&hi, w);
        let err = (a - b).norm();
        if err <= tol {
            return (b, w, err);
        }
        w *= 0.5;
    }
    let b = apply(&hi, w);
    (b, w, (apply(&lo, w) - b).norm())
}

/// `∫_{p1}^{p2} (p-p1)^{μ1-1} (p2-p)^{μ2-1} f(p) dp` where `f` is smooth up to the
/// endpoints and oscillates with at most `kmax` radians per unit length.
#[allow(clippy::too_many_arguments)]
pub fn weighted_oscillatory<F>(
    f: &F,
    p1: f64,
    p2: f64,
    mu1: f64,
    mu2: f64,
    kmax: f64,
    opts: OracleOptions,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if !(p1 < p2) {
        return Err(Error::InvalidInput(format!("need p1 < p2, got [{p1}, {p2}]")));
    }
    let len = p2 - p1;
    let wavelength = if kmax > 0.0 { 2.0 * PI / kmax } else { f64::INFINITY };
    let w0 = (0.05 * len).min(wavelength);
    let panel_tol = 1e-3 * opts.abs_tol;

    let fl = |p: f64| f(p) * (p2 - p).powf(mu2 - 1.0);
    let fr = |p: f64| f(p) * (p - p1).powf(mu1 - 1.0);
    let (vl, wl, el) = endpoint_panel(&fl, p1, true, mu1 - 1.0, w0, panel_tol, opts.density);
    let (vr, wr, er) = endpoint_panel(&fr, p2, false, mu2 - 1.0, w0, panel_tol, opts.density);

    let a = p1 + wl;
    let b = p2 - wr;
    let full = |p: f64| f(p) * (p - p1).powf(mu1 - 1.0) * (p2 - p).powf(mu2 - 1.0);
    let step = wavelength.min(len) / opts.density as f64;
    let n = (((b - a) / step).ceil() as usize).max(1);
    if n >= opts.max_panels {
        return Err(Error::QuadratureNotConverged { tol: opts.abs_tol, panels: n, estimate: f64::INFINITY });
    }
    let inner = adaptive_gk21(&full, &linspace(a, b, n), opts.abs_tol - el - er, opts.max_panels)?;
    Ok(QuadratureResult {
        value: pairwise_sum(&[vl, inner.value, vr]),
        abs_error_estimate: inner.abs_error_estimate + el + er,
        panels_used: inner.panels_used + 2,
    })
}

fn max_abs_dpsi(phase: &PhaseSpec) -> f64 {
    linspace(phase.p1, phase.p2, 4096).into_iter().map(|p| phase.psi.derivs(p)[1].abs()).fold(0.0, f64::max)
}

/// `∫_{p1}^{p2} U(p) e^{iωψ(p)} dp` by direct quadrature.
pub fn oscillatory_integral(phase: &PhaseSpec, amp: &AmplitudeSpec, omega: f64) -> Result<QuadratureResult> {
    oscillatory_integral_with(phase, amp, omega, OracleOptions::default())
}

pub fn oscillatory_integral_with(
    phase: &PhaseSpec,
    amp: &AmplitudeSpec,
    omega: f64,
    opts: OracleOptions,
) -> Result<QuadratureResult> {
    if !(omega > 0.0 && omega <= OMEGA_MAX) {
        return Err(Error::Precondition(format!("oracle needs 0 < omega <= {OMEGA_MAX}, got {omega}")));
    }
    let f = |p: f64| amp.u_tilde.eval(p) * Complex64::new(0.0, omega * phase.psi.eval(p)).exp();
    weighted_oscillatory(&f, phase.p1, phase.p2, amp.mu1, amp.mu2, omega * max_abs_dpsi(phase), opts)
}

fn side_sign(side: usize) -> f64 {
    if side == 1 { 1.0 } else { -1.0 }
}

/// `φ_{n+1}^{(j)}(s, ω, ρ, μ)`: the contour integral
/// `((-1)^{n+1}/n!) ∫_Λ (z-s)^n z^{μ-1} e^{±iωz^ρ} dz` along the steepest-descent ray from `s`.
pub fn phi_contour(n: usize, s: f64, omega: f64, rho: f64, mu: f64, side: usize) -> Result<Complex64> {
    if !(rho >= 1.0 && mu > 0.0 && omega > 0.0 && s >= 0.0) || !(side == 1 || side == 2) {
        return Err(Error::InvalidInput(format!(
            "phi_contour needs rho>=1, mu>0, omega>0, s>=0, side 1|2 (got rho={rho}, mu={mu}, omega={omega}, s={s}, side={side})"
        )));
    }
    let sg = side_sign(side);
    let theta = sg * PI / (2.0 * rho);
    let dir = Complex64::from_polar(1.0, theta);
    let pref = if n.is_multiple_of(2) { -1.0 } else { 1.0 } / gamma(n as f64 + 1.0);
    let a = n as f64 + mu;
    if s == 0.0 {
        // (z-s)^n z^{μ-1} = t^{a-1} e^{iθ(a-1)}; y = ω t^ρ turns the ray integral into ∫ y^{a/ρ-1} e^{-y} dy
        let b = a / rho;
        let r = gauss_jacobi(40, 0.0, b - 1.0);
        let head = r.left_weighted(|y| Complex64::new((-y).exp(), 0.0), 0.0, 1.0);
        let ymax = 18.0 * 10f64.ln() + 4.0 * b;
        let tail = adaptive_gk21(&|y: f64| Complex64::new(y.powf(b - 1.0) * (-y).exp(), 0.0), &linspace(1.0, ymax, 16), 1e-13 * gamma(b), 2000)?;
        let integral = (head + tail.value) * omega.powf(-b) / rho;
        return Ok(Complex64::from_polar(pref, theta * a) * integral);
    }
    let tmax = ((1e18f64).ln() / omega).powf(1.0 / rho);
    let f = |t: f64| {
        let z = s + dir * t;
        let e = Complex64::new(0.0, sg * omega) * z.powf(rho);
        (dir * t).powi(n as i32) * z.powf(mu - 1.0) * e.exp() * dir
    };
    // panels follow the oscillation of Re(z^ρ) along the ray
    let osc = omega * rho * (s + tmax).powf(rho - 1.0) * tmax / PI;
    let panels = (osc.ceil() as usize).clamp(8, 100_000);
    let scale = s.powf(mu - 1.0).max(1.0) * gamma((n as f64 + 1.0) / rho) / rho * omega.powf(-(n as f64 + 1.0) / rho);
    let r = adaptive_gk21(&f, &linspace(0.0, tmax, panels), 1e-13 * scale, 200_000)?;
    Ok(r.value * pref)
}

/// Checks `|e^{±iωz^ρ}| ≤ e^{-ωt^ρ}` for `z = s + t e^{±iπ/(2ρ)}` on a grid of `t`.
pub fn lambda_decay_check(s: f64, t_grid: &[f64], omega: f64, rho: f64, side: usize) -> Check {
    let sg = side_sign(side);
    let dir = Complex64::from_polar(1.0, sg * PI / (2.0 * rho));
    let mut worst = (f64::NAN, f64::NEG_INFINITY);
    for &t in t_grid {
        let z = s + dir * t;
        // compare logarithms so the margin stays meaningful where both sides underflow
        let log_lhs = (Complex64::new(0.0, sg * omega) * z.powf(rho)).re;
        let margin = log_lhs + omega * t.powf(rho);
        if margin > worst.1 {
            worst = (t, margin);
        }
    }
    Check {
        name: "lambda_decay".into(),
        passed: worst.1 <= 1e-12,
        worst_point: if worst.0.is_nan() { None } else { Some(worst.0) },
        worst_value: if worst.1.is_finite() { Some(worst.1) } else { None },
        detail: format!("max log(|e^(iωz^ρ)| / e^(-ωt^ρ)) over {} points", t_grid.len()),
    }
}
