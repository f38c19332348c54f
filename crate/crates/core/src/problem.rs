//! JSON problem documents and the builtin function catalogue.

use crate::error::{Error, Result};
use crate::types::{
    complex_fn, real_fn, AmplitudeSpec, ComplexHandle, CutoffSpec, PhaseSpec, RealHandle, StepTemplate,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Builtin scalar functions. Complex values come from the optional imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Builtin {
    /// `value + i imag`
    Constant {
        value: f64,
        #[serde(default)]
        imag: f64,
    },
    /// `Σ c_k p^k` (ascending powers); `imag` adds `i Σ d_k p^k`.
    Polynomial {
        coeffs: Vec<f64>,
        #[serde(default)]
        imag: Vec<f64>,
    },
    /// `scale (p - origin)^alpha`, origin defaults to `p1`.
    Power {
        alpha: f64,
        #[serde(default)]
        origin: Option<f64>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `1 - p`
    Intro,
}

fn one() -> f64 {
    1.0
}

pub const CATALOGUE: &[(&str, &str)] = &[
    ("constant", "{\"kind\":\"constant\",\"value\":1.0,\"imag\":0.0}"),
    ("polynomial", "{\"kind\":\"polynomial\",\"coeffs\":[0.0,1.0],\"imag\":[]}"),
    ("power", "{\"kind\":\"power\",\"alpha\":0.5,\"origin\":null,\"scale\":1.0}"),
    ("intro", "{\"kind\":\"intro\"}"),
];

fn poly_derivs(c: &[f64], p: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (i, &ci) in c.iter().enumerate().skip(k) {
            let falling: f64 = (0..k).map(|j| (i - j) as f64).product();
            s += ci * falling * p.powi((i - k) as i32);
        }
        *o = s;
    }
    out
}

impl Builtin {
    pub fn is_real(&self) -> bool {
        match self {
            Builtin::Constant { imag, .. } => *imag == 0.0,
            Builtin::Polynomial { imag, .. } => imag.iter().all(|&v| v == 0.0),
            _ => true,
        }
    }

    fn real_part(&self, p1: f64) -> impl Fn(f64) -> [f64; 4] + Send + Sync + 'static {
        let b = self.clone();
        move |p| match &b {
            Builtin::Constant { value, .. } => [*value, 0.0, 0.0, 0.0],
            Builtin::Polynomial { coeffs, .. } => poly_derivs(coeffs, p),
            Builtin::Power { alpha, origin, scale } => {
                let x = p - origin.unwrap_or(p1);
                let mut out = [0.0; 4];
                let mut c = *scale;
                for (k, o) in out.iter_mut().enumerate() {
                    let e = alpha - k as f64;
                    *o = if c == 0.0 { 0.0 } else { c * x.powf(e) };
                    c *= e;
                }
                out
            }
            Builtin::Intro => [1.0 - p, -1.0, 0.0, 0.0],
        }
    }

    fn imag_part(&self) -> Option<Vec<f64>> {
        match self {
            Builtin::Constant { imag, .. } if *imag != 0.0 => Some(vec![*imag]),
            Builtin::Polynomial { imag, .. } if imag.iter().any(|&v| v != 0.0) => Some(imag.clone()),
            _ => None,
        }
    }

    pub fn real_handle(&self, p1: f64, what: &str) -> Result<RealHandle> {
        if !self.is_real() {
            return Err(Error::InvalidInput(format!("{what} must be real-valued")));
        }
        Ok(real_fn(self.real_part(p1)))
    }

    pub fn complex_handle(&self, p1: f64) -> ComplexHandle {
        let re = self.real_part(p1);
        let im = self.imag_part();
        complex_fn(move |p| {
            let r = re(p);
            let i = im.as_ref().map(|c| poly_derivs(c, p)).unwrap_or([0.0; 4]);
            [
                Complex64::new(r[0], i[0]),
                Complex64::new(r[1], i[1]),
                Complex64::new(r[2], i[2]),
                Complex64::new(r[3], i[3]),
            ]
        })
    }
}

/// Serializable problem definition.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProblemDoc {
    pub p1: f64,
    pub p2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub eta: f64,
    pub psi: Builtin,
    pub psi_tilde: Builtin,
    pub u_tilde: Builtin,
    #[serde(default)]
    pub cutoff_template: StepTemplate,
}

/// A fully constructed problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub phase: PhaseSpec,
    pub amp: AmplitudeSpec,
    pub cutoff: CutoffSpec,
}

impl ProblemDoc {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("problem JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn build(&self) -> Result<Problem> {
        if !(self.p1.is_finite() && self.p2.is_finite() && self.p1 < self.p2) {
            return Err(Error::InvalidInput(format!("need finite p1 < p2, got [{}, {}]", self.p1, self.p2)));
        }
        let phase = PhaseSpec {
            p1: self.p1,
            p2: self.p2,
            rho1: self.rho1,
            rho2: self.rho2,
            psi_tilde: self.psi_tilde.real_handle(self.p1, "psi_tilde")?,
            psi: self.psi.real_handle(self.p1, "psi")?,
        };
        let amp = AmplitudeSpec::new(self.mu1, self.mu2, self.u_tilde.complex_handle(self.p1), self.p1, self.p2);
        let cutoff = CutoffSpec::standard(self.p1, self.p2, self.eta, self.cutoff_template)?;
        Ok(Problem { phase, amp, cutoff })
    }

    /// `ψ(p) = p`, `U ≡ 1` on `[0, 1]`.
    pub fn linear() -> Self {
        ProblemDoc {
            p1: 0.0,
            p2: 1.0,
            rho1: 1.0,
            rho2: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            eta: 0.25,
            psi: Builtin::Polynomial { coeffs: vec![0.0, 1.0], imag: vec![] },
            psi_tilde: Builtin::Constant { value: 1.0, imag: 0.0 },
            u_tilde: Builtin::Constant { value: 1.0, imag: 0.0 },
            cutoff_template: StepTemplate::Exp1,
        }
    }

    /// `ψ(p) = p²`, `U ≡ 1` on `[0, 1]`.
    pub fn fresnel() -> Self {
        ProblemDoc {
            rho1: 2.0,
            psi: Builtin::Polynomial { coeffs: vec![0.0, 0.0, 1.0], imag: vec![] },
            psi_tilde: Builtin::Constant { value: 2.0, imag: 0.0 },
            ..Self::linear()
        }
    }

    /// `ψ(p) = p`, `U(p) = p^{μ-1}` on `[0, 1]`.
    pub fn singular(mu: f64) -> Self {
        ProblemDoc { mu1: mu, ..Self::linear() }
    }

    /// `ψ(p) = p`, `U(p) = p^{μ-1}(1-p)` on `[0, 1]`.
    pub fn singular_intro(mu: f64) -> Self {
        ProblemDoc { mu1: mu, u_tilde: Builtin::Intro, ..Self::linear() }
    }
}

/// Schrödinger initial data: `𝓕u₀(p) = (p-p1)^{μ-1} ũ(p)` on `(p1, p2]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InitialDataDoc {
    pub p1: f64,
    pub p2: f64,
    pub mu: f64,
    pub u_tilde: Builtin,
}

impl InitialDataDoc {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("initial data JSON: {e}")))
    }

    /// `𝓕u₀(p) = p^{μ-1}(1-p)` on `[0, 1]`.
    pub fn intro(mu: f64) -> Self {
        InitialDataDoc { p1: 0.0, p2: 1.0, mu, u_tilde: Builtin::Intro }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_json() {
        let d = ProblemDoc::fresnel();
        let back = ProblemDoc::from_json(&d.to_json()).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn catalogue_entries_parse() {
        for (name, json) in CATALOGUE {
            let b: Builtin = serde_json::from_str(json).unwrap();
            assert!(b.is_real(), "{name}");
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let d = poly_derivs(&[1.0, 2.0, 3.0, 4.0], 2.0);
        assert_eq!(d, [49.0, 62.0, 54.0, 24.0]);
    }

    #[test]
    fn complex_constant() {
        let b = Builtin::Constant { value: 1.0, imag: 2.0 };
        assert!(b.real_handle(0.0, "psi").is_err());
        assert_eq!(b.complex_handle(0.0).eval(0.3), Complex64::new(1.0, 2.0));
    }
}
