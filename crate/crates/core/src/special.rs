//! Gamma and incomplete gamma functions.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Gamma function for positive real arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("gamma argument must be positive, got {x}")));
    }
    Ok(gamma(x))
}

/// Infallible variant for internal use; callers guarantee `x > 0`.
pub(crate) fn gamma(x: f64) -> f64 {
    // integer arguments: exact factorials where representable
    if x == x.floor() && x <= 23.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    lanczos(x)
}

/// Lower incomplete gamma `γ(a, z) = ∫_0^z t^{a-1} e^{-t} dt` for real `a > 0`
/// and complex `z` off the negative real axis.
pub fn lower_incomplete_gamma(a: f64, z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    // The series suffers e^{|z|} cancellation on the imaginary axis, so the
    // switch to the continued fraction happens well before |z| = 30.
    if z.norm() < 8.0 {
        lig_series(a, z)
    } else {
        Complex64::new(gamma(a), 0.0) - uig_cf(a, z)
    }
}

fn lig_series(a: f64, z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0 / a, 0.0);
    let mut sum = term;
    for n in 1..500 {
        term *= z / (a + n as f64);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    z.powf(a) * (-z).exp() * sum
}

/// Upper incomplete gamma by modified Lentz evaluation of the Legendre fraction.
fn uig_cf(a: f64, z: Complex64) -> Complex64 {
    // complex division squares magnitudes, so keep the guards well inside range
    let tiny = Complex64::new(1e-150, 0.0);
    let mut b = z + 1.0 - a;
    let mut c = Complex64::new(1e150, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..2000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = d * an + b;
        if d.norm() < 1e-150 {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < 1e-150 {
            c = tiny;
        }
        d = Complex64::new(1.0, 0.0) / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-z).exp() * z.powf(a) * h
}

/// `∫_0^1 p^{a-1} e^{iωp} dp` in closed form.
pub fn power_fourier_unit(a: f64, omega: f64) -> Complex64 {
    let z = Complex64::new(0.0, -omega);
    z.powf(-a) * lower_incomplete_gamma(a, z)
}
