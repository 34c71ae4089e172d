//! Least-squares polynomial fits on circular arcs.
//!
//! The basis is built by Arnoldi iteration on the sample points (Vandermonde with
//! Arnoldi), which keeps the least-squares problem well conditioned; the monomial
//! coefficients of every basis polynomial are carried along so the result is an
//! explicit Taylor polynomial.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::target::TargetFunction;
use crate::arcs::ArcSet;
use crate::coefficients::CoefficientSeries;
use crate::error::{Error, Result};

pub const DEFAULT_DEG_CAP: usize = 512;
const FIRST_DEGREE: usize = 4;
const POINTS_PER_DEGREE: usize = 8;
const VERIFY_OVERSAMPLING: usize = 16;
const TRIM: f64 = 1e-13;

/// A polynomial with its a-posteriori sup error on the arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcFit {
    pub poly: CoefficientSeries,
    pub sup_error: f64,
    pub degree: usize,
}

/// `max |f|` over `n` equispaced angles covering `[a, b]`, endpoints included.
pub fn sup_on_interval(f: &(dyn Fn(f64) -> f64 + Sync), a: f64, b: f64, n: usize) -> f64 {
    use rayon::prelude::*;
    let n = n.max(2);
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| f(a + i as f64 * h))
        .reduce(|| 0.0, f64::max)
}

fn single_arc(arc: &ArcSet) -> Result<(f64, f64)> {
    match arc.as_single_arc() {
        Some((a, b)) if arc.measure() < 1.0 => Ok((a, b)),
        _ => Err(Error::Validation("fitting needs a single proper arc".into())),
    }
}

/// Verified sup error of `poly` against `target` on `[a, b]`.
fn fit_error(poly: &CoefficientSeries, target: &TargetFunction, a: f64, b: f64, n: usize) -> f64 {
    sup_on_interval(&|t| (poly.evaluate(Complex64::cis(t)) - target.eval(t)).norm(), a, b, n)
}

/// Polynomial `R` with `sup_I |R - target| <= tol`, by degree escalation 4, 8, 16, ... up to `deg_cap`.
pub fn arc_fit(target: &TargetFunction, arc: &ArcSet, tol: f64, deg_cap: usize) -> Result<ArcFit> {
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("fit tolerance {tol} must be positive")));
    }
    let (a, b) = single_arc(arc)?;
    if let TargetFunction::Residual { base, minus } = target {
        let fit = arc_fit(base, arc, tol, deg_cap)?;
        let poly = fit.poly.sub(minus).trimmed();
        return Ok(ArcFit {
            degree: poly.degree().unwrap_or(0),
            poly,
            sup_error: fit.sup_error,
        });
    }
    if let Some(poly) = target.as_polynomial() {
        return Ok(ArcFit {
            degree: poly.degree().unwrap_or(0),
            poly,
            sup_error: 0.0,
        });
    }

    let mut best: Option<ArcFit> = None;
    let mut degree = FIRST_DEGREE.min(deg_cap.max(1));
    loop {
        let m = POINTS_PER_DEGREE * (degree + 1);
        let poly = least_squares_on_arc(target, a, b, degree, m);
        let sup_error = fit_error(&poly, target, a, b, VERIFY_OVERSAMPLING * m);
        let candidate = ArcFit {
            poly,
            sup_error,
            degree,
        };
        if sup_error <= tol {
            return Ok(candidate);
        }
        if best.as_ref().is_none_or(|b| sup_error < b.sup_error) {
            best = Some(candidate);
        }
        if degree >= deg_cap {
            break;
        }
        degree = (degree * 2).min(deg_cap);
    }
    let best = best.expect("at least one degree tried");
    Err(Error::FitFailure {
        best_error: best.sup_error,
        degree: best.degree,
        tol,
    })
}

/// `Q = z^v S` with `S` fitted to `zeta^{-v}` at `tol / 2`, so that `sup_I |Q - 1| <= tol`.
pub fn valuation_lift(v: usize, arc: &ArcSet, tol: f64, deg_cap: usize) -> Result<ArcFit> {
    if v == 0 {
        return Ok(ArcFit {
            poly: CoefficientSeries::from_real(&[1.0]),
            sup_error: 0.0,
            degree: 0,
        });
    }
    let (a, b) = single_arc(arc)?;
    let s = arc_fit(&TargetFunction::inverse_power(v), arc, 0.5 * tol, deg_cap)?;
    let poly = s.poly.shift(v);
    let m = POINTS_PER_DEGREE * (s.degree + 1);
    let one = TargetFunction::constant(Complex64::new(1.0, 0.0));
    let sup_error = fit_error(&poly, &one, a, b, VERIFY_OVERSAMPLING * m);
    if sup_error > tol {
        return Err(Error::FitFailure {
            best_error: sup_error,
            degree: s.degree + v,
            tol,
        });
    }
    Ok(ArcFit {
        degree: poly.degree().unwrap_or(0),
        poly,
        sup_error,
    })
}

/// Least-squares fit of degree `n` on `m` Chebyshev-distributed angles in `[a, b]`.
fn least_squares_on_arc(target: &TargetFunction, a: f64, b: f64, n: usize, m: usize) -> CoefficientSeries {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let thetas: Vec<f64> = (0..m)
        .map(|i| mid + half * (PI * (i as f64 + 0.5) / m as f64).cos())
        .collect();
    let z: Vec<Complex64> = thetas.iter().map(|&t| Complex64::cis(t)).collect();
    let f: Vec<Complex64> = thetas.iter().map(|&t| target.eval(t)).collect();

    let zero = Complex64::new(0.0, 0.0);
    let inv_m = 1.0 / m as f64;
    let dot = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum::<Complex64>() * inv_m;

    // Columns have mean square 1; `mono[k]` holds the monomial coefficients of column k.
    let mut basis: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0); m]];
    let mut mono: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
    for k in 0..n {
        let mut v: Vec<Complex64> = basis[k].iter().zip(&z).map(|(q, zi)| q * zi).collect();
        let mut h = vec![zero; k + 1];
        for _ in 0..2 {
            for (j, q) in basis.iter().enumerate() {
                let c = dot(q, &v);
                h[j] += c;
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = (v.iter().map(|x| x.norm_sqr()).sum::<f64>() * inv_m).sqrt();
        if norm < 1e-300 {
            break;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        let mut p = vec![zero; k + 2];
        for (i, &c) in mono[k].iter().enumerate() {
            p[i + 1] += c;
        }
        for (j, hj) in h.iter().enumerate() {
            for (i, &c) in mono[j].iter().enumerate() {
                p[i] -= hj * c;
            }
        }
        for x in p.iter_mut() {
            *x /= norm;
        }
        basis.push(v);
        mono.push(p);
    }

    let mut coeffs = vec![zero; basis.len()];
    for (q, p) in basis.iter().zip(&mono) {
        let d = dot(q, &f);
        for (c, &pc) in coeffs.iter_mut().zip(p) {
            *c += d * pc;
        }
    }
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in coeffs.iter_mut() {
        if c.norm() <= TRIM * max {
            *c = zero;
        }
    }
    CoefficientSeries::new(coeffs).trimmed()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(a: f64, b: f64) -> ArcSet {
        ArcSet::single(a, b).unwrap()
    }

    #[test]
    fn polynomial_targets_are_exact() {
        let i = arc(0.1 * PI, 1.9 * PI);
        let fit = arc_fit(&TargetFunction::monomial(1, Complex64::new(1.0, 0.0)), &i, 1e-12, 512).unwrap();
        assert_eq!(fit.degree, 1);
        assert_eq!(fit.poly.coeffs(), &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let one = arc_fit(&TargetFunction::constant(Complex64::new(1.0, 0.0)), &i, 1e-12, 512).unwrap();
        assert_eq!(one.poly.coeffs(), &[Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn smooth_target_on_a_short_arc() {
        let i = arc(1.0, 2.0);
        let fit = arc_fit(&TargetFunction::Conj, &i, 1e-8, 512).unwrap();
        assert!(fit.sup_error <= 1e-8);
        for k in 0..=100 {
            let t = 1.0 + k as f64 / 100.0;
            assert!((fit.poly.evaluate(Complex64::cis(t)) - Complex64::cis(-t)).norm() <= 1e-8);
        }
    }

    #[test]
    fn conj_on_a_long_arc_reports_failure() {
        let i = arc(0.1 * PI, 1.9 * PI);
        match arc_fit(&TargetFunction::Conj, &i, 0.05, 64) {
            Err(Error::FitFailure {
                best_error,
                degree,
                tol,
            }) => {
                assert!(best_error > 0.05 && degree <= 64 && tol == 0.05);
            }
            other => panic!("expected a fit failure, got {other:?}"),
        }
    }

    #[test]
    fn lift_examples() {
        let i = arc(0.45 * PI, 1.55 * PI);
        assert_eq!(
            valuation_lift(0, &i, 0.1, 512).unwrap().poly.coeffs(),
            &[Complex64::new(1.0, 0.0)]
        );
        let q = valuation_lift(1, &i, 0.1, 512).unwrap();
        assert_eq!(q.poly.valuation(), Some(1));
        assert!(q.sup_error <= 0.1);
        let q3 = valuation_lift(3, &i, 0.1, 512).unwrap();
        assert!(q3.poly.valuation().unwrap() >= 3);
        assert!(q3.sup_error <= 0.1);
    }

    #[test]
    fn lift_on_a_nearly_full_arc_exceeds_double_precision() {
        // |q| <= tol on the arc with q(0) = 1 forces |q| ~ 1e16 in the 36 degree gap.
        let i = arc(0.1 * PI, 1.9 * PI);
        assert!(matches!(valuation_lift(1, &i, 0.1, 256), Err(Error::FitFailure { .. })));
    }

    #[test]
    fn rejects_full_circle() {
        assert!(arc_fit(&TargetFunction::Conj, &ArcSet::full(), 0.1, 8).is_err());
    }
}
