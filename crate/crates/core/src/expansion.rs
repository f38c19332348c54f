//! Expansion pipeline: substitutions `φ_j`, transformed amplitudes
//! `k_j`, Θ coefficients and the expansion terms `A_N^{(j)}`.
//!
//! Both sides share one description. With `σ = +1` for `j = 1`, `σ = -1` for
//! `j = 2` and the distance `d = σ (p - p_j)`, the substitution reads
//! `φ(d) = d J(d)^{1/ρ}` where `J(d) = ∫_0^1 y^{ρ-1} g(p_j + σ y d) dy` and `g`
//! collects `ψ̃` with the other endpoint's power factor. Since `d/s = J^{-1/ρ}`
//! the factor `(∫_0^1 (φ^{-1})'(sy) dy)^{μ-1}` equals `J(d(s))^{(1-μ)/ρ}`.

use crate::error::{Error, Result};
use crate::quadrature::gauss_jacobi;
use crate::special::gamma;
use crate::taylor::{power_derivs, revert4, Taylor};
use crate::types::{AmplitudeSpec, ComplexHandle, CutoffSpec, ExpansionRequest, PhaseSpec, RealHandle, N_MAX};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const INNER_NODES: usize = 32;
const MAX_ITER: usize = 200;

/// Inverse substitution data at one point.
#[derive(Clone, Copy, Debug)]
pub struct InverseJet {
    /// Taylor jet of `d(s)`, orders 0..4.
    pub d: Taylor<f64, 5>,
    /// Taylor jet of `J(d)` around `d(s)`, orders 0..4.
    pub j: Taylor<f64, 5>,
}

#[derive(Clone)]
pub struct Substitution {
    pub side: usize,
    pub rho: f64,
    pub sigma: f64,
    pub pj: f64,
    pub d_max: f64,
    pub s_max: f64,
    psi_tilde: RealHandle,
    other: f64,
    other_exp: f64,
    y: Vec<f64>,
    w: Vec<f64>,
}

impl std::fmt::Debug for Substitution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Substitution")
            .field("side", &self.side)
            .field("rho", &self.rho)
            .field("pj", &self.pj)
            .field("s_max", &self.s_max)
            .finish_non_exhaustive()
    }
}

fn check_side(side: usize) -> Result<()> {
    if side == 1 || side == 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("side must be 1 or 2, got {side}")))
    }
}

/// Build `φ_j` on `I_1 = [p1, p2-η]` or `I_2 = [p1+η, p2]`.
pub fn build_substitution(phase: &PhaseSpec, cutoff: &CutoffSpec, side: usize) -> Result<Substitution> {
    build_substitution_with_nodes(phase, cutoff, side, INNER_NODES)
}

/// As [`build_substitution`] with a chosen inner node count.
pub fn build_substitution_with_nodes(
    phase: &PhaseSpec,
    cutoff: &CutoffSpec,
    side: usize,
    nodes: usize,
) -> Result<Substitution> {
    check_side(side)?;
    let len = phase.p2 - phase.p1;
    if !(len > 0.0) {
        return Err(Error::InvalidInput("need p1 < p2".into()));
    }
    if !(cutoff.eta > 0.0 && cutoff.eta < 0.5 * len) {
        return Err(Error::InvalidInput(format!("eta must lie in (0, {})", 0.5 * len)));
    }
    let rho = phase.rho(side);
    if !(rho >= 1.0) {
        return Err(Error::InvalidInput(format!("rho{side} must be >= 1, got {rho}")));
    }
    let (sigma, pj, other, other_exp) = if side == 1 {
        (1.0, phase.p1, phase.p2, phase.rho2 - 1.0)
    } else {
        (-1.0, phase.p2, phase.p1, phase.rho1 - 1.0)
    };
    let (y, w) = gauss_jacobi(nodes, 0.0, rho - 1.0).unit_left();
    let mut sub = Substitution {
        side,
        rho,
        sigma,
        pj,
        d_max: len - cutoff.eta,
        s_max: 0.0,
        psi_tilde: phase.psi_tilde.clone(),
        other,
        other_exp,
        y,
        w,
    };
    // φ is increasing in d exactly when g > 0 along I_j
    for i in 0..=256 {
        let d = sub.d_max * i as f64 / 256.0;
        let g = sub.g_jet(d).c[0];
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::NonMonotone { side });
        }
    }
    sub.s_max = sub.phi(sub.d_max);
    Ok(sub)
}

impl Substitution {
    /// `g̃^{(k)}(x)` for `k ≤ 3`, i.e. derivatives of `x ↦ g(p_j + σ x)`.
    fn g_jet(&self, x: f64) -> Taylor<f64, 4> {
        let p = self.pj + self.sigma * x;
        let pt = self.psi_tilde.derivs(p);
        let q = (self.other - p).abs();
        let pw = power_derivs(q, self.other_exp, 4);
        // d/dp of |other - p| is -σ
        let mut pd = [0.0; 4];
        let mut sgn = 1.0;
        for k in 0..4 {
            pd[k] = pw[k] * sgn;
            sgn *= -self.sigma;
        }
        let g = Taylor::<f64, 4>::from_derivs(&pt) * Taylor::from_derivs(&pd);
        // convert p-derivatives to x-derivatives
        let mut c = g.c;
        let mut s = 1.0;
        for ck in c.iter_mut() {
            *ck *= s;
            s *= self.sigma;
        }
        Taylor { c }
    }

    /// `J(d)` alone.
    fn j0(&self, d: f64) -> f64 {
        self.y.iter().zip(&self.w).map(|(y, w)| w * self.g_jet(y * d).c[0]).sum()
    }

    /// `J` and `J'` at `d`.
    fn j01(&self, d: f64) -> (f64, f64) {
        let mut j0 = 0.0;
        let mut j1 = 0.0;
        for (y, w) in self.y.iter().zip(&self.w) {
            let g = self.g_jet(y * d);
            j0 += w * g.c[0];
            j1 += w * y * g.c[1];
        }
        (j0, j1)
    }

    /// Taylor jet of `J` at `d`, orders 0..4.
    pub fn j_jet(&self, d: f64) -> Taylor<f64, 5> {
        let mut acc = [0.0; 4];
        for (y, w) in self.y.iter().zip(&self.w) {
            let gd = self.g_jet(y * d).derivs();
            let mut yk = 1.0;
            for k in 0..4 {
                acc[k] += w * yk * gd[k];
                yk *= y;
            }
        }
        // d J'''' = g̃'''(d) - (ρ+3) J'''(d) by parts; only d J'''' enters φ''''
        let j4 = if d > 0.0 {
            (self.g_jet(d).deriv(3) - (self.rho + 3.0) * acc[3]) / d
        } else {
            0.0
        };
        Taylor::from_derivs(&[acc[0], acc[1], acc[2], acc[3], j4])
    }

    /// `φ` as a function of the distance `d`.
    pub fn phi(&self, d: f64) -> f64 {
        if d == 0.0 {
            return 0.0;
        }
        d * self.j0(d).powf(1.0 / self.rho)
    }

    fn phi_d(&self, d: f64) -> (f64, f64) {
        let (j0, j1) = self.j01(d);
        let h = j0.powf(1.0 / self.rho);
        (d * h, h + d * h * j1 / (self.rho * j0))
    }

    /// Forward map `p ↦ φ_j(p)`.
    pub fn forward(&self, p: f64) -> f64 {
        self.phi(self.sigma * (p - self.pj))
    }

    /// Distance `d = σ(φ_j^{-1}(s) - p_j)`.
    pub fn inverse_d(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        if s >= self.s_max {
            return Ok(self.d_max);
        }
        let (mut lo, mut hi) = (0.0, self.d_max);
        let h0 = self.j0(0.0).powf(1.0 / self.rho);
        let mut d = (s / h0).clamp(0.0, self.d_max);
        if d <= lo || d >= hi {
            d = 0.5 * (lo + hi);
        }
        for _ in 0..MAX_ITER {
            let (f, fp) = self.phi_d(d);
            let r = f - s;
            if r == 0.0 {
                return Ok(d);
            }
            if r < 0.0 {
                lo = d;
            } else {
                hi = d;
            }
            let mut next = d - r / fp;
            if !(next > lo && next < hi) || !fp.is_finite() || fp <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            if (next - d).abs() <= 2.0 * f64::EPSILON * d || hi - lo <= 2.0 * f64::EPSILON * hi {
                return Ok(next);
            }
            d = next;
        }
        Err(Error::RootNotConverged(MAX_ITER))
    }

    /// Inverse map `s ↦ φ_j^{-1}(s)`; `inverse(0) = p_j` exactly.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        let d = self.inverse_d(s)?;
        if d == 0.0 {
            return Ok(self.pj);
        }
        Ok(self.pj + self.sigma * d)
    }

    /// Jets of `d(s)` and of `J` at `d(s)`.
    pub fn inverse_jet(&self, s: f64) -> Result<InverseJet> {
        let d0 = self.inverse_d(s)?;
        let j = self.j_jet(d0);
        let h = j.powf(1.0 / self.rho);
        let phi = Taylor::<f64, 5>::variable(d0) * h;
        let b = revert4([phi.c[1], phi.c[2], phi.c[3], phi.c[4]]);
        Ok(InverseJet { d: Taylor { c: [d0, b[0], b[1], b[2], b[3]] }, j })
    }

    /// `[φ^{-1}(s), (φ^{-1})'(s), (φ^{-1})''(s)]`.
    pub fn inverse_derivs(&self, s: f64) -> Result<[f64; 3]> {
        let jet = self.inverse_jet(s)?;
        let dd = jet.d.derivs();
        Ok([self.pj + self.sigma * dd[0], self.sigma * dd[1], self.sigma * dd[2]])
    }

    /// Map a `p`-derivative vector to a jet in `s` through `p = p_j + σ d(s)`.
    fn pull_back<T>(&self, f: &[T; 4], d: &Taylor<f64, 5>) -> Taylor<T, 4>
    where
        T: crate::taylor::Coef,
    {
        let mut fd = *f;
        let mut s = 1.0;
        for v in fd.iter_mut() {
            *v = *v * T::from(s);
            s *= self.sigma;
        }
        let dj: Taylor<f64, 4> = d.resize();
        let mut inner = Taylor::<T, 4>::zero();
        for k in 0..4 {
            inner.c[k] = T::from(dj.c[k]);
        }
        inner.compose(&fd)
    }
}

/// `k_j` together with the data needed to differentiate it.
#[derive(Clone)]
pub struct TransformedAmplitude {
    pub side: usize,
    pub mu: f64,
    pub n: usize,
    pub k0: Complex64,
    pub sub: Substitution,
    u_tilde: ComplexHandle,
    other: f64,
    other_exp: f64,
}

impl std::fmt::Debug for TransformedAmplitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformedAmplitude")
            .field("side", &self.side)
            .field("mu", &self.mu)
            .field("k0", &self.k0)
            .finish_non_exhaustive()
    }
}

pub fn build_transformed_amplitude(
    amp: &AmplitudeSpec,
    sub: &Substitution,
    n: usize,
) -> Result<TransformedAmplitude> {
    if n > N_MAX {
        return Err(Error::OrderTooHigh(n));
    }
    let side = sub.side;
    let mu = amp.mu(side);
    let other_exp = if side == 1 { amp.mu2 - 1.0 } else { amp.mu1 - 1.0 };
    let mut t = TransformedAmplitude {
        side,
        mu,
        n,
        k0: Complex64::new(0.0, 0.0),
        sub: sub.clone(),
        u_tilde: amp.u_tilde.clone(),
        other: sub.other,
        other_exp,
    };
    t.k0 = t.k0_closed_form();
    Ok(t)
}

impl TransformedAmplitude {
    /// `ũ_j = ũ` times the far endpoint's power factor, as derivatives in `p`.
    fn u_j_derivs(&self, p: f64) -> [Complex64; 4] {
        let u = self.u_tilde.derivs(p);
        let q = (self.other - p).abs();
        let pw = power_derivs(q, self.other_exp, 4);
        let mut pd = [0.0; 4];
        let mut sgn = 1.0;
        for k in 0..4 {
            pd[k] = pw[k] * sgn;
            sgn *= -self.sub.sigma;
        }
        let prod = Taylor::<Complex64, 4>::from_derivs(&u) * Taylor::<f64, 4>::from_derivs(&pd).to_complex();
        prod.derivs()
    }

    /// `k_j(0) = σ (φ^{-1}_*'(0))^μ ũ_j(p_j)` with `|(φ^{-1})'(0)| = (g(p_j)/ρ)^{-1/ρ}`.
    pub fn k0_closed_form(&self) -> Complex64 {
        let g0 = self.sub.g_jet(0.0).c[0];
        let dprime = (g0 / self.sub.rho).powf(-1.0 / self.sub.rho);
        self.u_j_derivs(self.sub.pj)[0] * (self.sub.sigma * dprime.powf(self.mu))
    }

    /// Taylor jet of `k_j` at `s` (orders 0..3).
    pub fn k_jet(&self, s: f64) -> Result<Taylor<Complex64, 4>> {
        let inv = self.sub.inverse_jet(s)?;
        Ok(self.k_jet_from(&inv))
    }

    fn k_jet_from(&self, inv: &InverseJet) -> Taylor<Complex64, 4> {
        let sub = &self.sub;
        let d = inv.d;
        let d0 = d.c[0];
        let inner: Taylor<f64, 4> = {
            let mut t: Taylor<f64, 4> = d.resize();
            t.c[0] = 0.0;
            t
        };
        // J^{(1-μ)/ρ} in d, then in s
        let jd: Taylor<f64, 4> = inv.j.resize();
        let gm_d = jd.powf((1.0 - self.mu) / sub.rho);
        let gm_s = {
            let mut t = inner;
            t.c[0] = d0;
            t.compose(&gm_d.derivs())
        };
        let p = sub.pj + sub.sigma * d0;
        let u = sub.pull_back(&self.u_j_derivs(p), &d);
        let dprime: Taylor<f64, 4> = d.differentiate().resize();
        (gm_s * dprime).to_complex().scale(Complex64::new(sub.sigma, 0.0)) * u
    }

    /// `k_j(s)`.
    pub fn k(&self, s: f64) -> Result<Complex64> {
        Ok(self.k_jet(s)?.c[0])
    }

    /// Derivatives `k^{(0..=3)}(s)`.
    pub fn k_derivs(&self, s: f64) -> Result<[Complex64; 4]> {
        Ok(self.k_jet(s)?.derivs())
    }

    /// `U(φ^{-1}(s)) s^{1-μ} (φ^{-1})'(s)` evaluated literally (for `s > 0`).
    pub fn k_direct(&self, amp: &AmplitudeSpec, p1: f64, p2: f64, s: f64) -> Result<Complex64> {
        let [p, dp, _] = self.sub.inverse_derivs(s)?;
        Ok(amp.eval(p, p1, p2) * s.powf(1.0 - self.mu) * dp)
    }

    /// Jet of the cut-off factor `ν_j` (`ν∘φ^{-1}` or `(1-ν)∘φ^{-1}`).
    pub fn nu_jet(&self, cutoff: &CutoffSpec, inv: &InverseJet) -> Taylor<f64, 4> {
        let p = self.sub.pj + self.sub.sigma * inv.d.c[0];
        let mut nu = cutoff.nu.derivs(p);
        if self.side == 2 {
            nu = [1.0 - nu[0], -nu[1], -nu[2], -nu[3]];
        }
        self.sub.pull_back(&nu, &inv.d)
    }

    /// Jet of `ν_j k_j` at `s`.
    pub fn nu_k_jet(&self, cutoff: &CutoffSpec, s: f64) -> Result<Taylor<Complex64, 4>> {
        let inv = self.sub.inverse_jet(s)?;
        let k = self.k_jet_from(&inv);
        Ok(self.nu_jet(cutoff, &inv).to_complex() * k)
    }
}

/// `Θ_{n+1}^{(j)}(ρ, μ)`.
pub fn theta_coefficient(n: usize, side: usize, rho: f64, mu: f64) -> Complex64 {
    let sgn = if side == 1 { 1.0 } else { -1.0 };
    let e = (n as f64 + mu) / rho;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Complex64::from_polar(sgn * gamma(e) / (fact * rho), sgn * 0.5 * PI * e)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SideTerms {
    pub side: usize,
    pub rho: f64,
    pub mu: f64,
    /// `(re, im, exponent)` of `T_{n,j}` and `e_{n,j} = (n+μ)/ρ`.
    pub terms: Vec<(f64, f64, f64)>,
}

impl SideTerms {
    pub fn coefficient(&self, n: usize) -> Complex64 {
        Complex64::new(self.terms[n].0, self.terms[n].1)
    }

    pub fn exponent(&self, n: usize) -> f64 {
        self.terms[n].2
    }
}

/// Stored expansion: `A_N^{(j)}(ω) = e^{iωψ(p_j)} Σ_n T_{n,j} ω^{-e_{n,j}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExpansionTerms {
    pub sides: Vec<SideTerms>,
    pub psi_p1: f64,
    pub psi_p2: f64,
}

impl ExpansionTerms {
    /// `A_N^{(j)}(ω)`.
    pub fn evaluate_side(&self, side: usize, omega: f64) -> Complex64 {
        let st = &self.sides[side - 1];
        let psi = if side == 1 { self.psi_p1 } else { self.psi_p2 };
        let sum: Complex64 = st
            .terms
            .iter()
            .map(|&(re, im, e)| Complex64::new(re, im) * omega.powf(-e))
            .sum();
        Complex64::from_polar(1.0, omega * psi) * sum
    }

    /// `A_N^{(1)}(ω) + A_N^{(2)}(ω)`.
    pub fn evaluate(&self, omega: f64) -> Complex64 {
        self.evaluate_side(1, omega) + self.evaluate_side(2, omega)
    }
}

/// Terms for one side from a prepared transformed amplitude.
pub fn side_terms(tamp: &TransformedAmplitude, n: usize) -> Result<SideTerms> {
    let kd = tamp.k_derivs(0.0)?;
    let (rho, mu, side) = (tamp.sub.rho, tamp.mu, tamp.side);
    let mut kd0 = kd;
    kd0[0] = tamp.k0;
    let terms = (0..n)
        .map(|i| {
            let t = theta_coefficient(i, side, rho, mu) * kd0[i];
            (t.re, t.im, (i as f64 + mu) / rho)
        })
        .collect();
    Ok(SideTerms { side, rho, mu, terms })
}

/// Everything needed for one endpoint.
#[derive(Clone, Debug)]
pub struct SidePipeline {
    pub sub: Substitution,
    pub tamp: TransformedAmplitude,
}

pub fn build_side(phase: &PhaseSpec, amp: &AmplitudeSpec, cutoff: &CutoffSpec, side: usize, n: usize) -> Result<SidePipeline> {
    let sub = build_substitution(phase, cutoff, side)?;
    let tamp = build_transformed_amplitude(amp, &sub, n)?;
    Ok(SidePipeline { sub, tamp })
}

pub fn expansion_terms(
    phase: &PhaseSpec,
    amp: &AmplitudeSpec,
    cutoff: &CutoffSpec,
    req: &ExpansionRequest,
) -> Result<ExpansionTerms> {
    req.check()?;
    let mut sides = Vec::with_capacity(2);
    for side in [1, 2] {
        let sp = build_side(phase, amp, cutoff, side, req.n)?;
        sides.push(side_terms(&sp.tamp, req.n)?);
    }
    Ok(ExpansionTerms {
        sides,
        psi_p1: phase.psi.eval(phase.p1),
        psi_p2: phase.psi.eval(phase.p2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{real_fn, StepTemplate};

    fn quad_phase() -> PhaseSpec {
        PhaseSpec {
            p1: 0.0,
            p2: 1.0,
            rho1: 2.0,
            rho2: 1.0,
            psi_tilde: real_fn(|_| [2.0, 0.0, 0.0, 0.0]),
            psi: real_fn(|p| [p * p, 2.0 * p, 2.0, 0.0]),
        }
    }

    #[test]
    fn square_phase_gives_identity() {
        let ph = quad_phase();
        let c = CutoffSpec::standard(0.0, 1.0, 0.25, StepTemplate::Exp1).unwrap();
        let sub = build_substitution(&ph, &c, 1).unwrap();
        for &s in &[0.0, 0.1, 0.5, 0.7] {
            let [p, d1, d2] = sub.inverse_derivs(s).unwrap();
            assert!((p - s).abs() < 1e-14);
            assert!((d1 - 1.0).abs() < 1e-13);
            assert!(d2.abs() < 1e-12);
        }
        assert!((sub.s_max - 0.75).abs() < 1e-14);
    }

    #[test]
    fn theta_examples() {
        let t = theta_coefficient(0, 1, 1.0, 1.0);
        assert!((t - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let t = theta_coefficient(0, 2, 1.0, 1.0);
        assert!((t - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let t = theta_coefficient(0, 1, 2.0, 1.0);
        let v = 0.5 * PI.sqrt() * (0.5f64).sqrt();
        assert!((t - Complex64::new(v, v)).norm() < 1e-14);
    }
}
