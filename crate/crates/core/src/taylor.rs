//! Truncated Taylor jets.
//!
//! A `Taylor<T, L>` stores normalized coefficients `c[k] = f^{(k)}(x0) / k!`
//! for `k < L`. Arithmetic truncates at order `L - 1`.

use num_complex::Complex64;
use num_traits::{Num, Zero};
use std::ops::{Add, Mul, Sub};

pub trait Coef: Num + Copy + From<f64> {}
impl Coef for f64 {}
impl Coef for Complex64 {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor<T, const L: usize> {
    pub c: [T; L],
}

const FACT: [f64; 8] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0];

impl<T: Coef, const L: usize> Taylor<T, L> {
    pub fn zero() -> Self {
        Self { c: [T::zero(); L] }
    }

    pub fn constant(v: T) -> Self {
        let mut c = [T::zero(); L];
        c[0] = v;
        Self { c }
    }

    /// The identity jet `x0 + h`.
    pub fn variable(x0: T) -> Self {
        let mut c = [T::zero(); L];
        c[0] = x0;
        if L > 1 {
            c[1] = T::one();
        }
        Self { c }
    }

    /// Build from derivative values `f^{(k)}(x0)`.
    pub fn from_derivs(d: &[T]) -> Self {
        let mut c = [T::zero(); L];
        for (k, ck) in c.iter_mut().enumerate().take(d.len().min(L)) {
            *ck = d[k] * T::from(1.0 / FACT[k]);
        }
        Self { c }
    }

    /// Derivative values `f^{(k)}(x0)`.
    pub fn derivs(&self) -> [T; L] {
        let mut d = self.c;
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = *dk * T::from(FACT[k]);
        }
        d
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    pub fn deriv(&self, k: usize) -> T {
        self.c[k] * T::from(FACT[k])
    }

    pub fn scale(&self, a: T) -> Self {
        let mut c = self.c;
        for ck in c.iter_mut() {
            *ck = *ck * a;
        }
        Self { c }
    }

    /// Jet of `f'` (one order shorter; the top coefficient becomes zero).
    pub fn differentiate(&self) -> Self {
        let mut c = [T::zero(); L];
        for k in 0..L.saturating_sub(1) {
            c[k] = self.c[k + 1] * T::from((k + 1) as f64);
        }
        Self { c }
    }

    /// `f(self)` where `outer[k] = f^{(k)}(self.value())`.
    pub fn compose(&self, outer: &[T]) -> Self {
        let mut h = *self;
        h.c[0] = T::zero();
        let f = Self::from_derivs(outer);
        let mut r = Self::constant(f.c[L - 1]);
        for k in (0..L - 1).rev() {
            r = r * h;
            r.c[0] = r.c[0] + f.c[k];
        }
        r
    }

    /// Truncate or pad to another length.
    pub fn resize<const M: usize>(&self) -> Taylor<T, M> {
        let mut c = [T::zero(); M];
        let n = L.min(M);
        c[..n].copy_from_slice(&self.c[..n]);
        Taylor { c }
    }
}

impl<const L: usize> Taylor<f64, L> {
    pub fn to_complex(&self) -> Taylor<Complex64, L> {
        let mut c = [Complex64::zero(); L];
        for k in 0..L {
            c[k] = Complex64::new(self.c[k], 0.0);
        }
        Taylor { c }
    }

    /// `self^a` for a positive base value.
    pub fn powf(&self, a: f64) -> Self {
        self.compose(&power_derivs(self.c[0], a, L))
    }
}

impl<T: Coef, const L: usize> Add for Taylor<T, L> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for k in 0..L {
            c[k] = c[k] + o.c[k];
        }
        Self { c }
    }
}

impl<T: Coef, const L: usize> Sub for Taylor<T, L> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.c;
        for k in 0..L {
            c[k] = c[k] - o.c[k];
        }
        Self { c }
    }
}

impl<T: Coef, const L: usize> Mul for Taylor<T, L> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [T::zero(); L];
        for i in 0..L {
            for j in 0..L - i {
                c[i + j] = c[i + j] + self.c[i] * o.c[j];
            }
        }
        Self { c }
    }
}

/// Derivatives of `x^a` at `x`, orders `0..n`.
pub fn power_derivs(x: f64, a: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut coef = 1.0;
    for k in 0..n {
        out.push(coef * x.powf(a - k as f64));
        coef *= a - k as f64;
    }
    out
}

/// Reverse a series: given Taylor coefficients `a1..a4` of `y(x) - y(x0)`,
/// returns coefficients `b1..b4` of `x(y) - x0`.
pub fn revert4(a: [f64; 4]) -> [f64; 4] {
    let [a1, a2, a3, a4] = a;
    let b1 = 1.0 / a1;
    let b2 = -a2 / a1.powi(3);
    let b3 = (2.0 * a2 * a2 - a1 * a3) / a1.powi(5);
    let b4 = (5.0 * a1 * a2 * a3 - a1 * a1 * a4 - 5.0 * a2.powi(3)) / a1.powi(7);
    [b1, b2, b3, b4]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_matches_leibniz() {
        // sin * exp at 0.3
        let x = 0.3f64;
        let s = Taylor::<f64, 4>::from_derivs(&[x.sin(), x.cos(), -x.sin(), -x.cos()]);
        let e = Taylor::<f64, 4>::from_derivs(&[x.exp(); 4]);
        let p = (s * e).derivs();
        let ex = x.exp();
        assert_relative_eq!(p[1], ex * (x.sin() + x.cos()), epsilon = 1e-14);
        assert_relative_eq!(p[2], 2.0 * ex * x.cos(), epsilon = 1e-14);
        assert_relative_eq!(p[3], 2.0 * ex * (x.cos() - x.sin()), epsilon = 1e-14);
    }

    #[test]
    fn compose_exp_of_square() {
        // exp(x^2) at x = 0.7
        let x = 0.7f64;
        let sq = Taylor::<f64, 5>::variable(x) * Taylor::variable(x);
        let v = sq.value().exp();
        let r = sq.compose(&[v; 5]).derivs();
        let e = (x * x).exp();
        assert_relative_eq!(r[0], e, epsilon = 1e-14);
        assert_relative_eq!(r[1], 2.0 * x * e, epsilon = 1e-14);
        assert_relative_eq!(r[2], (2.0 + 4.0 * x * x) * e, epsilon = 1e-14);
        assert_relative_eq!(r[3], (12.0 * x + 8.0 * x.powi(3)) * e, epsilon = 1e-13);
        assert_relative_eq!(
            r[4],
            (12.0 + 48.0 * x * x + 16.0 * x.powi(4)) * e,
            epsilon = 1e-13
        );
    }

    #[test]
    fn reversion_of_exp() {
        // y = e^x - 1 around 0 inverts to log(1+y)
        let b = revert4([1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0]);
        assert_relative_eq!(b[0], 1.0);
        assert_relative_eq!(b[1], -0.5);
        assert_relative_eq!(b[2], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(b[3], -0.25, epsilon = 1e-15);
    }

    #[test]
    fn powf_jet() {
        let x = 2.0f64;
        let j = Taylor::<f64, 4>::variable(x).powf(1.5).derivs();
        assert_relative_eq!(j[1], 1.5 * x.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(j[3], 1.5 * 0.5 * -0.5 * x.powf(-1.5), epsilon = 1e-14);
    }
}
