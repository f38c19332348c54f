//! Gauss rules and adaptive Gauss–Kronrod integration.

use crate::error::{Error, Result};
use crate::special::gamma;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Nodes and weights on `[-1, 1]` for the weight `(1-x)^alpha (1+x)^beta`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

/// Golub–Welsch construction of the `n`-point Gauss–Jacobi rule.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> GaussRule {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    let ab = alpha + beta;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let a = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        m[(k, k)] = a;
        if k + 1 < n {
            let j = (k + 1) as f64;
            let b2 = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * j + ab;
                4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            m[(k, k + 1)] = b2.sqrt();
            m[(k + 1, k)] = b2.sqrt();
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        alpha,
        beta,
    }
}

pub fn gauss_legendre(n: usize) -> GaussRule {
    gauss_jacobi(n, 0.0, 0.0)
}

impl GaussRule {
    /// `∫_a^{a+w} (p-a)^beta f(p) dp` with this rule (requires `alpha = 0`).
    pub fn left_weighted<F: Fn(f64) -> Complex64>(&self, f: F, a: f64, w: f64) -> Complex64 {
        let h = 0.5 * w;
        let mut s = Complex64::new(0.0, 0.0);
        for (x, wt) in self.nodes.iter().zip(&self.weights) {
            s += f(a + h * (1.0 + x)) * *wt;
        }
        s * h.powf(self.beta + 1.0)
    }

    /// `∫_{b-w}^b (b-p)^alpha f(p) dp` with this rule (requires `beta = 0`).
    pub fn right_weighted<F: Fn(f64) -> Complex64>(&self, f: F, b: f64, w: f64) -> Complex64 {
        let h = 0.5 * w;
        let mut s = Complex64::new(0.0, 0.0);
        for (x, wt) in self.nodes.iter().zip(&self.weights) {
            s += f(b - h * (1.0 - x)) * *wt;
        }
        s * h.powf(self.alpha + 1.0)
    }

    /// Nodes and weights mapped to `[0, 1]` for the weight `y^beta` (requires `alpha = 0`).
    pub fn unit_left(&self) -> (Vec<f64>, Vec<f64>) {
        let scale = 0.5f64.powf(self.beta + 1.0);
        (
            self.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect(),
            self.weights.iter().map(|w| w * scale).collect(),
        )
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// One 21-point Kronrod panel: `(kronrod, gauss, sum of |f| w)`.
pub fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = Complex64::new(0.0, 0.0);
    let mut abs = fc.norm() * WGK[10];
    for j in 0..10 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        k += (f1 + f2) * WGK[j];
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    (k * h, g * h, abs * h.abs())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl Panel {
    fn eval<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
        let (k, g, abs) = gk21(f, a, b);
        let err = (k - g).norm() + 50.0 * f64::EPSILON * abs;
        Panel { a, b, value: k, err }
    }
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err && self.a == o.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err
            .partial_cmp(&o.err)
            .unwrap_or(Ordering::Equal)
            .then_with(|| o.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

/// Pairwise (tree) summation, deterministic for a fixed input order.
pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn eval_panels<F>(f: &F, edges: &[(f64, f64)]) -> Vec<Panel>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if edges.len() >= 64 {
            return edges.par_iter().map(|&(a, b)| Panel::eval(f, a, b)).collect();
        }
    }
    edges.iter().map(|&(a, b)| Panel::eval(f, a, b)).collect()
}

/// Globally adaptive GK21 over the partition defined by `breaks`
/// (sorted, at least two points). Subdivides the worst panel until the summed
/// error estimate is below `abs_tol`.
pub fn adaptive_gk21<F>(f: &F, breaks: &[f64], abs_tol: f64, max_panels: usize) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let edges: Vec<(f64, f64)> = breaks.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect();
    if edges.is_empty() {
        return Ok(QuadratureResult { value: Complex64::new(0.0, 0.0), abs_error_estimate: 0.0, panels_used: 0 });
    }
    let mut heap: BinaryHeap<Panel> = eval_panels(f, &edges).into_iter().collect();
    let mut total_err: f64 = heap.iter().map(|p| p.err).sum();
    while total_err > abs_tol {
        if heap.len() >= max_panels {
            return Err(Error::QuadratureNotConverged { tol: abs_tol, panels: heap.len(), estimate: total_err });
        }
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // cannot split further in floating point
            heap.push(Panel { err: 0.0, ..worst });
            total_err -= worst.err;
            continue;
        }
        let l = Panel::eval(f, worst.a, m);
        let r = Panel::eval(f, m, worst.b);
        total_err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
        // refresh the running sum now and then to shed drift
        if heap.len().is_multiple_of(512) {
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
    let vals: Vec<Complex64> = panels.iter().map(|p| p.value).collect();
    Ok(QuadratureResult {
        value: pairwise_sum(&vals),
        abs_error_estimate: panels.iter().map(|p| p.err).sum(),
        panels_used: panels.len(),
    })
}

/// Real-valued convenience wrapper.
pub fn adaptive_real<F>(f: &F, breaks: &[f64], abs_tol: f64, max_panels: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    let g = |x: f64| Complex64::new(f(x), 0.0);
    let r = adaptive_gk21(&g, breaks, abs_tol, max_panels)?;
    Ok((r.value.re, r.abs_error_estimate))
}

/// Uniform partition of `[a, b]` into `n` panels.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn beta_fn(a: f64, b: f64) -> f64 {
        gamma(a) * gamma(b) / gamma(a + b)
    }

    #[test]
    fn legendre_polynomial_exactness() {
        let r = gauss_legendre(10);
        for deg in 0..20 {
            let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s - want).abs() < 1e-14, "deg {deg}: {s} vs {want}");
        }
    }

    #[test]
    fn jacobi_beta_moments() {
        // ∫_{-1}^1 (1-x)^α (1+x)^β (1+x)^k dx = 2^{α+β+k+1} B(α+1, β+k+1)
        for &(al, be) in &[(0.0, -0.5), (-0.3, 0.7), (0.0, -0.95), (0.5, 0.5)] {
            let r = gauss_jacobi(16, al, be);
            for k in 0..31 {
                let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * (1.0 + x).powi(k)).sum();
                let want = 2f64.powf(al + be + k as f64 + 1.0) * beta_fn(al + 1.0, be + k as f64 + 1.0);
                assert_relative_eq!(s, want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn kronrod_exact_degree_31() {
        let f = |x: f64| Complex64::new(x.powi(30) + x.powi(31) + 1.0, 0.0);
        let (k, g, _) = gk21(&f, -1.0, 1.0);
        assert_relative_eq!(k.re, 2.0 / 31.0 + 2.0, max_relative = 1e-14);
        // Gauss part is only exact to degree 19
        let f19 = |x: f64| Complex64::new(x.powi(18), 0.0);
        let (_, g19, _) = gk21(&f19, -1.0, 1.0);
        assert_relative_eq!(g19.re, 2.0 / 19.0, max_relative = 1e-14);
        assert!((g.re - k.re).abs() > 1e-6);
    }

    #[test]
    fn adaptive_oscillatory() {
        let w = 50.0;
        let f = |x: f64| Complex64::new(0.0, w * x).exp();
        let r = adaptive_gk21(&f, &[0.0, 1.0], 1e-12, 1000).unwrap();
        let want = (Complex64::new(0.0, w).exp() - 1.0) / Complex64::new(0.0, w);
        assert!((r.value - want).norm() < 1e-12);
        assert!(r.abs_error_estimate >= 0.0 && r.panels_used >= 1);
    }

    #[test]
    fn weighted_endpoint_rules() {
        let r = gauss_jacobi(20, 0.0, -0.5);
        let v = r.left_weighted(|p| Complex64::new(p, 0.0), 0.0, 1.0);
        // ∫_0^1 p^{-1/2} p dp = 2/3
        assert_relative_eq!(v.re, 2.0 / 3.0, max_relative = 1e-13);
        let r = gauss_jacobi(20, -0.5, 0.0);
        let v = r.right_weighted(|_| Complex64::new(1.0, 0.0), 2.0, 1.0);
        assert_relative_eq!(v.re, 2.0, max_relative = 1e-13);
    }
}
