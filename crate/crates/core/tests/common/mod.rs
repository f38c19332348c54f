//! Closed-form references computed without the library's special functions.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gamma at the half-integers and integers the tests need.
pub fn gamma_ref(a: f64) -> f64 {
    let twice = (2.0 * a).round();
    assert!((2.0 * a - twice).abs() < 1e-15 && a > 0.0, "unsupported gamma argument {a}");
    let (mut x, mut g) = if twice as i64 % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while x < a - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + h * i as f64) * w;
    }
    s * (h / 3.0)
}

/// `∫_0^1 p^{a-1} e^{iωp} dp` as the full half-line integral minus a steepest-descent
/// tail from `p = 1` along `p = 1 + iτ`.
pub fn fourier_power(a: f64, omega: f64) -> Complex64 {
    let full = Complex64::from_polar(gamma_ref(a) * omega.powf(-a), PI * a / 2.0);
    let i = Complex64::new(0.0, 1.0);
    let tail = simpson(|tau| (1.0 + i * tau).powf(a - 1.0) * (-omega * tau).exp(), 0.0, 45.0 / omega, 40_000);
    full - i * Complex64::from_polar(1.0, omega) * tail
}

/// `∫_0^1 e^{iωp} dp`.
pub fn linear_exact(omega: f64) -> Complex64 {
    let iw = Complex64::new(0.0, omega);
    (iw.exp() - 1.0) / iw
}

/// `∫_0^1 e^{iωp²} dp`.
pub fn fresnel_exact(omega: f64) -> Complex64 {
    0.5 * fourier_power(0.5, omega)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}
