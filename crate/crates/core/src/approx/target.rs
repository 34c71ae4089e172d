use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientSeries;

/// A continuous function on the unit circle, evaluated at angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetFunction {
    /// `sum_j pos[j] e^{i j t} + sum_j neg[j] e^{-i (j + 1) t}`.
    Trig {
        #[serde(default)]
        pos: Vec<Complex64>,
        #[serde(default)]
        neg: Vec<Complex64>,
    },
    /// `zeta -> conj(zeta)`.
    Conj,
    Constant {
        value: Complex64,
    },
    /// `low + (high - low) * (1 + tanh(sharpness * (half_width - d))) / 2`, where `d` is
    /// the circular distance from `center`.
    SmoothStep {
        center: f64,
        half_width: f64,
        sharpness: f64,
        low: Complex64,
        high: Complex64,
    },
    /// `base - minus`, with `minus` a polynomial.
    Residual {
        base: Box<TargetFunction>,
        minus: CoefficientSeries,
    },
}

impl TargetFunction {
    pub fn conj() -> Self {
        TargetFunction::Conj
    }

    pub fn constant(value: Complex64) -> Self {
        TargetFunction::Constant { value }
    }

    /// `c * zeta^j` for `j >= 0`.
    pub fn monomial(j: usize, c: Complex64) -> Self {
        let mut pos = vec![Complex64::new(0.0, 0.0); j + 1];
        pos[j] = c;
        TargetFunction::Trig { pos, neg: Vec::new() }
    }

    /// `zeta^{-v}` for `v >= 1`.
    pub fn inverse_power(v: usize) -> Self {
        assert!(v >= 1);
        let mut neg = vec![Complex64::new(0.0, 0.0); v];
        neg[v - 1] = Complex64::new(1.0, 0.0);
        TargetFunction::Trig { pos: Vec::new(), neg }
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        match self {
            TargetFunction::Trig { pos, neg } => {
                let w = Complex64::cis(theta);
                let forward = pos.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c);
                let wc = w.conj();
                let backward = neg.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * wc + c) * wc;
                forward + backward
            }
            TargetFunction::Conj => Complex64::cis(-theta),
            TargetFunction::Constant { value } => *value,
            TargetFunction::SmoothStep {
                center,
                half_width,
                sharpness,
                low,
                high,
            } => {
                let d = (theta - center).rem_euclid(TAU);
                let d = if d > PI { TAU - d } else { d };
                let s = 0.5 * (1.0 + (sharpness * (half_width - d)).tanh());
                low + (high - low) * s
            }
            TargetFunction::Residual { base, minus } => base.eval(theta) - minus.evaluate(Complex64::cis(theta)),
        }
    }

    /// Whether the target vanishes identically (decided structurally).
    pub fn is_zero(&self) -> bool {
        let zero = |v: &[Complex64]| v.iter().all(|c| c.norm_sqr() == 0.0);
        match self {
            TargetFunction::Trig { pos, neg } => zero(pos) && zero(neg),
            TargetFunction::Constant { value } => value.norm_sqr() == 0.0,
            TargetFunction::SmoothStep { low, high, .. } => low.norm_sqr() == 0.0 && high.norm_sqr() == 0.0,
            TargetFunction::Conj | TargetFunction::Residual { .. } => false,
        }
    }

    /// The target as a polynomial in `zeta`, when it is one.
    pub fn as_polynomial(&self) -> Option<CoefficientSeries> {
        match self {
            TargetFunction::Trig { pos, neg } if neg.iter().all(|c| c.norm_sqr() == 0.0) => {
                Some(CoefficientSeries::new(pos.clone()).trimmed())
            }
            TargetFunction::Constant { value } => Some(CoefficientSeries::new(vec![*value]).trimmed()),
            TargetFunction::Residual { base, minus } => base.as_polynomial().map(|p| p.sub(minus)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_modes() {
        let t = TargetFunction::Trig {
            pos: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)],
            neg: vec![Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0)],
        };
        let theta = 0.7;
        let expected = 1.0 + Complex64::new(0.0, 2.0) * Complex64::cis(theta) + 3.0 * Complex64::cis(-2.0 * theta);
        assert!((t.eval(theta) - expected).norm() < 1e-15);
        assert!((TargetFunction::inverse_power(3).eval(theta) - Complex64::cis(-3.0 * theta)).norm() < 1e-15);
        assert!((TargetFunction::Conj.eval(theta) - Complex64::cis(-theta)).norm() < 1e-15);
    }

    #[test]
    fn smooth_step_profile() {
        let t = TargetFunction::SmoothStep {
            center: 0.5,
            half_width: 0.3,
            sharpness: 200.0,
            low: Complex64::new(0.0, 0.0),
            high: Complex64::new(1.0, 0.0),
        };
        assert!((t.eval(0.5).re - 1.0).abs() < 1e-12);
        assert!((t.eval(0.8).re - 0.5).abs() < 1e-12);
        assert!(t.eval(0.5 + PI).norm() < 1e-12);
        assert!((t.eval(0.5 + TAU) - t.eval(0.5)).norm() < 1e-12);
    }

    #[test]
    fn residual_and_polynomial_forms() {
        let two = TargetFunction::constant(Complex64::new(2.0, 0.0));
        let minus = CoefficientSeries::from_real(&[0.5, 0.0, 1.0]);
        let r = TargetFunction::Residual {
            base: Box::new(two),
            minus: minus.clone(),
        };
        let theta = 1.1;
        let expected = 1.5 - Complex64::cis(2.0 * theta);
        assert!((r.eval(theta) - expected).norm() < 1e-15);
        let p = r.as_polynomial().unwrap();
        assert_eq!(
            p.coeffs(),
            &[
                Complex64::new(1.5, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0)
            ]
        );
        assert!(TargetFunction::Conj.as_polynomial().is_none());
        assert!(TargetFunction::Trig {
            pos: vec![],
            neg: vec![]
        }
        .is_zero());
    }

    #[test]
    fn json_form() {
        let t: TargetFunction = serde_json::from_str(r#"{"kind":"trig","pos":[[0,0],[1,0]]}"#).unwrap();
        assert!((t.eval(0.3) - Complex64::cis(0.3)).norm() < 1e-15);
        let c: TargetFunction = serde_json::from_str(r#"{"kind":"conj"}"#).unwrap();
        assert_eq!(c, TargetFunction::Conj);
    }
}
