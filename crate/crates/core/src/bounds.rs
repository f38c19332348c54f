//! Explicit remainder bounds for the truncated expansion.

use crate::error::{Error, Result};
use crate::expansion::TransformedAmplitude;
use crate::oracle::phi_contour;
use crate::quadrature::{adaptive_gk21, gauss_jacobi, pairwise_sum};
use crate::special::gamma;
use crate::types::{Check, CutoffSpec, ExpansionRequest, ValidationReport};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct EnvelopeConstants {
    #[serde(rename = "N")]
    pub n: usize,
    pub rho: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Constants of the two envelopes for `φ_N` with `μ = 1`.
pub fn envelope_constants(n: usize, rho: f64) -> Result<EnvelopeConstants> {
    if n == 0 || !(rho >= 1.0) || !rho.is_finite() {
        return Err(Error::InvalidInput(format!("envelope constants need N >= 1 and rho >= 1, got N={n}, rho={rho}")));
    }
    let nf = n as f64;
    let a = gamma(nf / rho) / (factorial(n - 1) * rho);
    let (b, c) = if n == 1 {
        (1.0 / rho, (rho - 1.0) / (rho * rho) * gamma(1.0 / rho))
    } else {
        (
            gamma((nf - 1.0) / rho) / (rho * rho * factorial(n - 2)),
            (rho - 1.0) / (rho * rho * factorial(n - 1)) * gamma(nf / rho),
        )
    };
    Ok(EnvelopeConstants { n, rho, a, b, c })
}

/// Unique positive root of `a K^ρ - b K - c = 0`.
pub fn solve_k(lc: &EnvelopeConstants) -> Result<f64> {
    let EnvelopeConstants { rho, a, b, c, .. } = *lc;
    if !(a > 0.0 && b > 0.0 && c >= 0.0 && rho > 1.0) {
        return Err(Error::InvalidInput(format!("solve_K needs a,b>0, c>=0, rho>1 (a={a}, b={b}, c={c}, rho={rho})")));
    }
    if c == 0.0 {
        return Ok((b / a).powf(1.0 / (rho - 1.0)));
    }
    let h = |k: f64| a * k.powf(rho) - b * k - c;
    let dh = |k: f64| a * rho * k.powf(rho - 1.0) - b;
    let (mut lo, mut hi) = (0.0, ((b + c) / a + 1.0).powf(1.0 / (rho - 1.0)) + 1.0);
    if h(hi) <= 0.0 {
        return Err(Error::RootNotConverged(0));
    }
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if h(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let mut k = 0.5 * (lo + hi);
    for it in 0..50 {
        let step = h(k) / dh(k);
        k -= step;
        if step.abs() <= 1e-15 * k {
            return Ok(k);
        }
        if it == 49 {
            return Err(Error::RootNotConverged(it + 61));
        }
    }
    Ok(k)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct RefinedBoundParams {
    pub gamma: f64,
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub consts: EnvelopeConstants,
}

pub fn refined_params(n: usize, rho: f64, gamma: f64) -> Result<RefinedBoundParams> {
    if !(rho >= 2.0) {
        return Err(Error::Precondition(format!("refined bound needs rho >= 2, got {rho}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidInput(format!("gamma must lie in (0,1), got {gamma}")));
    }
    let consts = envelope_constants(n, rho)?;
    let k = solve_k(&consts)?;
    Ok(RefinedBoundParams { gamma, delta: (gamma + n as f64) / rho, k, l: consts.a * k.powf(gamma), consts })
}

/// `a ω^{-N/ρ}`.
pub fn envelope_g1(lc: &EnvelopeConstants, omega: f64) -> f64 {
    lc.a * omega.powf(-(lc.n as f64) / lc.rho)
}

/// `b ω^{-(1+(N-1)/ρ)} s^{1-ρ} + c ω^{-(1+N/ρ)} s^{-ρ}`.
pub fn envelope_g2(lc: &EnvelopeConstants, s: f64, omega: f64) -> f64 {
    let n = lc.n as f64;
    lc.b * omega.powf(-(1.0 + (n - 1.0) / lc.rho)) * s.powf(1.0 - lc.rho)
        + lc.c * omega.powf(-(1.0 + n / lc.rho)) * s.powf(-lc.rho)
}

/// Crossover point `s_ω = K ω^{-1/ρ}` of the two envelopes.
pub fn envelope_crossover(k: f64, rho: f64, omega: f64) -> f64 {
    k * omega.powf(-1.0 / rho)
}

/// `L s^{-γ} ω^{-δ}`.
pub fn balance_bound(p: &RefinedBoundParams, s: f64, omega: f64) -> f64 {
    p.l * s.powf(-p.gamma) * omega.powf(-p.delta)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Singular,
    Refined,
}

/// Which bound a side gets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundPolicy {
    /// Refined when `μ = 1` and `ρ ≥ 2`, singular otherwise.
    #[default]
    Auto,
    Singular,
    Refined,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundOptions {
    /// Endpoint panel `[0, fraction·s_j]` handled with the weighted rule.
    pub endpoint_fraction: f64,
    pub max_panels: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { endpoint_fraction: 0.1, max_panels: 2000 }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct BoundConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundReport {
    pub side: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega: f64,
    pub bound: f64,
    pub exponent: f64,
    pub kind: BoundKind,
    pub constants: BoundConstants,
}

/// A side bound with the `ω`-independent part already integrated.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct SideBound {
    pub side: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub kind: BoundKind,
    pub constants: BoundConstants,
    /// `∫_0^{s_j} s^e |(ν_j k_j)^{(N)}(s)| ds`.
    pub integral: f64,
    pub prefactor: f64,
    pub exponent: f64,
}

impl SideBound {
    pub fn value(&self, omega: f64) -> f64 {
        self.prefactor * self.integral * omega.powf(-self.exponent)
    }

    pub fn at(&self, omega: f64) -> BoundReport {
        BoundReport {
            side: self.side,
            n: self.n,
            omega,
            bound: self.value(omega),
            exponent: self.exponent,
            kind: self.kind,
            constants: self.constants,
        }
    }
}

/// Zeros of the real and imaginary parts of `f` on `[a, b]`, located by bisection.
fn sign_breaks<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, samples: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=samples).map(|i| a + (b - a) * i as f64 / samples as f64).collect();
    let vals: Vec<Complex64> = xs.iter().map(|&x| f(x)).collect();
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut out = Vec::new();
    for part in [0usize, 1] {
        let g = |v: Complex64| if part == 0 { v.re } else { v.im };
        // parts that are identically tiny carry no kinks worth splitting at
        if vals.iter().all(|&v| g(v).abs() <= 1e-13 * scale) {
            continue;
        }
        for i in 0..samples {
            let (ga, gb) = (g(vals[i]), g(vals[i + 1]));
            if ga * gb < 0.0 {
                let (mut lo, mut hi, mut glo) = (xs[i], xs[i + 1], ga);
                for _ in 0..60 {
                    let m = 0.5 * (lo + hi);
                    let gm = g(f(m));
                    if gm * glo <= 0.0 {
                        hi = m;
                    } else {
                        lo = m;
                        glo = gm;
                    }
                    if hi - lo <= 1e-14 * (b - a) {
                        break;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (b - a));
    out
}

/// `∫_0^{s_j} s^e |(ν_j k_j)^{(N)}(s)| ds`.
pub fn derivative_integral(tamp: &TransformedAmplitude, cutoff: &CutoffSpec, n: usize, e: f64, opts: BoundOptions) -> Result<f64> {
    if n == 0 || n > crate::types::N_MAX {
        return Err(Error::OrderTooHigh(n));
    }
    let sj = tamp.sub.s_max;
    let f = |s: f64| tamp.nu_k_jet(cutoff, s).map(|j| j.deriv(n)).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let tol = 1e-9 * sj.powf(e + 1.0);

    let breaks = sign_breaks(&f, 0.0, sj, 256);
    let mut w = opts.endpoint_fraction * sj;
    if let Some(&first) = breaks.first() {
        w = w.min(0.5 * first);
    }
    let lo = gauss_jacobi(32, 0.0, e);
    let hi = gauss_jacobi(48, 0.0, e);
    let absf = |s: f64| Complex64::new(f(s).norm(), 0.0);
    let mut head = Complex64::new(0.0, 0.0);
    for _ in 0..40 {
        let a = lo.left_weighted(absf, 0.0, w);
        head = hi.left_weighted(absf, 0.0, w);
        if (a - head).norm() <= 1e-3 * tol {
            break;
        }
        w *= 0.5;
    }
    if !head.re.is_finite() {
        return Err(Error::QuadratureNotConverged { tol, panels: 0, estimate: f64::NAN });
    }

    let mut edges = vec![w];
    edges.extend(breaks.into_iter().filter(|&x| x > w && x < sj));
    edges.push(sj);
    let full = |s: f64| Complex64::new(s.powf(e) * f(s).norm(), 0.0);
    let rest = adaptive_gk21(&full, &edges, tol, opts.max_panels)?;
    if !rest.value.re.is_finite() {
        return Err(Error::QuadratureNotConverged { tol, panels: rest.panels_used, estimate: f64::NAN });
    }
    Ok(pairwise_sum(&[head, rest.value]).re)
}

/// Singular-amplitude bound for one side, `ω`-independent part precomputed.
pub fn singular_side_bound(tamp: &TransformedAmplitude, cutoff: &CutoffSpec, n: usize, opts: BoundOptions) -> Result<SideBound> {
    let (rho, mu) = (tamp.sub.rho, tamp.mu);
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Precondition(format!("singular bound needs mu in (0,1], got {mu}")));
    }
    let lc = envelope_constants(n, rho)?;
    let integral = derivative_integral(tamp, cutoff, n, mu - 1.0, opts)?;
    Ok(SideBound {
        side: tamp.side,
        n,
        kind: BoundKind::Singular,
        constants: BoundConstants { a: lc.a, b: lc.b, c: lc.c, ..Default::default() },
        integral,
        prefactor: lc.a,
        exponent: n as f64 / rho,
    })
}

/// Refined bound for a regular endpoint with `ρ ≥ 2`.
pub fn refined_side_bound(
    tamp: &TransformedAmplitude,
    cutoff: &CutoffSpec,
    n: usize,
    gamma: f64,
    opts: BoundOptions,
) -> Result<SideBound> {
    let (rho, mu) = (tamp.sub.rho, tamp.mu);
    if mu != 1.0 || rho < 2.0 {
        return Err(Error::Precondition(format!(
            "refined bound needs mu = 1 and rho >= 2 (got mu={mu}, rho={rho}); use the singular bound"
        )));
    }
    let p = refined_params(n, rho, gamma)?;
    let integral = derivative_integral(tamp, cutoff, n, -gamma, opts)?;
    Ok(SideBound {
        side: tamp.side,
        n,
        kind: BoundKind::Refined,
        constants: BoundConstants {
            a: p.consts.a,
            b: p.consts.b,
            c: p.consts.c,
            k: Some(p.k),
            l: Some(p.l),
            gamma: Some(gamma),
            delta: Some(p.delta),
        },
        integral,
        prefactor: p.l,
        exponent: p.delta,
    })
}

pub fn side_bound(
    tamp: &TransformedAmplitude,
    cutoff: &CutoffSpec,
    req: &ExpansionRequest,
    policy: BoundPolicy,
) -> Result<SideBound> {
    req.check()?;
    let refined = match policy {
        BoundPolicy::Auto => tamp.mu == 1.0 && tamp.sub.rho >= 2.0,
        BoundPolicy::Singular => false,
        BoundPolicy::Refined => true,
    };
    if refined {
        refined_side_bound(tamp, cutoff, req.n, req.gamma, BoundOptions::default())
    } else {
        singular_side_bound(tamp, cutoff, req.n, BoundOptions::default())
    }
}

/// `|R_N^{(j)}(ω)|` bound for `μ_j ∈ (0,1]`.
pub fn remainder_bound_singular(tamp: &TransformedAmplitude, cutoff: &CutoffSpec, req: &ExpansionRequest) -> Result<f64> {
    req.check()?;
    Ok(singular_side_bound(tamp, cutoff, req.n, BoundOptions::default())?.value(req.omega))
}

/// `|R_N^{(j)}(ω)|` bound for `μ_j = 1`, `ρ_j ≥ 2`.
pub fn remainder_bound_refined(tamp: &TransformedAmplitude, cutoff: &CutoffSpec, req: &ExpansionRequest) -> Result<f64> {
    req.check()?;
    Ok(refined_side_bound(tamp, cutoff, req.n, req.gamma, BoundOptions::default())?.value(req.omega))
}

/// Checks the envelopes for `φ_N` on a grid of `s`, both sides.
pub fn phi_envelope_check(n: usize, rho: f64, mu: f64, omega: f64, s_grid: &[f64]) -> Result<ValidationReport> {
    let lc = envelope_constants(n, rho)?;
    let slack = |env: f64| env * (1.0 + 1e-9) + 1e-14;
    let mut checks = Vec::new();
    let mut push = |name: &str, worst: Option<(f64, f64)>, detail: &str| {
        let passed = worst.map(|w| w.1 <= 0.0).unwrap_or(true);
        checks.push(Check {
            name: name.into(),
            passed,
            worst_point: worst.map(|w| w.0),
            worst_value: worst.map(|w| w.1),
            detail: detail.into(),
        });
    };
    let mut w1: Option<(f64, f64)> = None;
    let mut w2: Option<(f64, f64)> = None;
    for &s in s_grid {
        for side in [1, 2] {
            let v = phi_contour(n - 1, s, omega, rho, mu, side)?.norm();
            let (e1, e2) = if mu == 1.0 {
                (envelope_g1(&lc, omega), if s > 0.0 { envelope_g2(&lc, s, omega) } else { f64::INFINITY })
            } else {
                (s.powf(mu - 1.0) * envelope_g1(&lc, omega), f64::INFINITY)
            };
            // margins are relative excess: positive means violation
            let m1 = (v - slack(e1)) / e1;
            if w1.map(|w| m1 > w.1).unwrap_or(true) {
                w1 = Some((s, m1));
            }
            if e2.is_finite() {
                let m2 = (v - slack(e2)) / e2;
                if w2.map(|w| m2 > w.1).unwrap_or(true) {
                    w2 = Some((s, m2));
                }
            }
        }
    }
    if mu == 1.0 {
        push("envelope.g1", w1, "|phi_N| <= a w^(-N/rho)");
        push("envelope.g2", w2, "|phi_N| <= b w^(-(1+(N-1)/rho)) s^(1-rho) + c w^(-(1+N/rho)) s^(-rho)");
    } else {
        push("envelope.singular", w1, "|phi_N| <= s^(mu-1) a w^(-N/rho)");
    }
    Ok(ValidationReport { checks })
}
