//! Choice of the power `n` making `||Q o B^n||_phi` small, through the majorant
//! `sum_k |q_k| ||B^{nk}||_phi`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::coefficients::{coeffs_of_power, CoeffOptions, CoefficientSeries};
use crate::error::{Error, Result};
use crate::orlicz::{luxemburg_norm, OrliczFunction, Regime};

pub const DEFAULT_N_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSearchOptions {
    pub coeff: CoeffOptions,
    pub rel_tol: f64,
    pub n_cap: usize,
    /// Smallest admissible power.
    pub n_min: usize,
}

impl Default for PowerSearchOptions {
    fn default() -> Self {
        PowerSearchOptions {
            coeff: CoeffOptions::default(),
            rel_tol: crate::orlicz::DEFAULT_REL_TOL,
            n_cap: DEFAULT_N_CAP,
            n_min: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerIndex {
    pub n0: usize,
    pub majorant: f64,
    pub bound: f64,
    /// Every `(n, majorant)` evaluated, in evaluation order.
    pub trace: Vec<(usize, f64)>,
}

/// Evaluates the majorant with a cache of `||B^m||_phi` keyed by `m`.
pub struct Majorant<'a> {
    q: &'a CoefficientSeries,
    b: &'a BlaschkeProduct,
    phi: &'a OrliczFunction,
    coeff: CoeffOptions,
    rel_tol: f64,
    cache: BTreeMap<usize, f64>,
}

impl<'a> Majorant<'a> {
    pub fn new(
        q: &'a CoefficientSeries,
        b: &'a BlaschkeProduct,
        phi: &'a OrliczFunction,
        coeff: CoeffOptions,
        rel_tol: f64,
    ) -> Self {
        Majorant {
            q,
            b,
            phi,
            coeff,
            rel_tol,
            cache: BTreeMap::new(),
        }
    }

    /// `sum_{k >= 1} |q_k| * lambda_hi(||B^{nk}||_phi)`.
    pub fn at(&mut self, n: usize) -> Result<f64> {
        let terms: Vec<(usize, f64)> = self
            .q
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(k, c)| (k * n, c.norm()))
            .collect();
        let missing: Vec<usize> = terms
            .iter()
            .map(|t| t.0)
            .filter(|m| !self.cache.contains_key(m))
            .collect();
        let computed: Vec<(usize, f64)> = missing
            .par_iter()
            .map(|&m| {
                let s = coeffs_of_power(self.b, m, &self.coeff)?;
                Ok((m, luxemburg_norm(self.phi, &s, self.rel_tol)?.value))
            })
            .collect::<Result<_>>()?;
        self.cache.extend(computed);
        Ok(terms.iter().map(|(m, w)| w * self.cache[m]).sum())
    }
}

/// An `n0` in `[n_min, n_cap]` whose majorant is at most `bound` while that of `n0 - 1`
/// exceeds it (unless `n0 = n_min`). Found by doubling, then bisection.
pub fn find_power_index(
    q: &CoefficientSeries,
    b: &BlaschkeProduct,
    phi: &OrliczFunction,
    bound: f64,
    opts: &PowerSearchOptions,
) -> Result<PowerIndex> {
    if q.coeffs().first().is_some_and(|c| c.norm_sqr() != 0.0) {
        return Err(Error::Validation("Q(0) must vanish".into()));
    }
    if q.is_zero() {
        return Err(Error::Validation("Q must be nonzero".into()));
    }
    if b.is_monomial() {
        return Err(Error::Monomial);
    }
    if phi.regime() != Regime::Vanishing {
        return Err(Error::Validation(format!(
            "{} is not in the vanishing regime",
            phi.label()
        )));
    }
    if !(bound > 0.0) {
        return Err(Error::Validation(format!("bound {bound} must be positive")));
    }
    let n_min = opts.n_min.max(1);
    if n_min > opts.n_cap {
        return Err(Error::Configuration(format!(
            "n_min {n_min} exceeds n_cap {}",
            opts.n_cap
        )));
    }
    let mut majorant = Majorant::new(q, b, phi, opts.coeff, opts.rel_tol);
    let mut trace = Vec::new();
    let mut eval = |n: usize, trace: &mut Vec<(usize, f64)>| -> Result<f64> {
        let v = majorant.at(n)?;
        trace.push((n, v));
        Ok(v)
    };

    let mut failing = None;
    let mut n = n_min;
    let (mut passing, mut passing_value) = loop {
        let v = eval(n, &mut trace)?;
        if v <= bound {
            break (n, v);
        }
        failing = Some(n);
        if n == opts.n_cap {
            return Err(Error::SearchFailure {
                n_cap: opts.n_cap,
                bound,
                last_majorant: v,
                trace,
            });
        }
        n = (2 * n).min(opts.n_cap);
    };
    if let Some(mut lo) = failing {
        while passing - lo > 1 {
            let mid = lo + (passing - lo) / 2;
            let v = eval(mid, &mut trace)?;
            if v <= bound {
                passing = mid;
                passing_value = v;
            } else {
                lo = mid;
            }
        }
    }
    Ok(PowerIndex {
        n0: passing,
        majorant: passing_value,
        bound,
        trace,
    })
}

/// Coefficients of `Q o B^n = sum_k q_k B^{nk}`.
pub fn compose(
    q: &CoefficientSeries,
    b: &BlaschkeProduct,
    n: usize,
    coeff: &CoeffOptions,
) -> Result<CoefficientSeries> {
    let powers: Vec<(Complex64, CoefficientSeries)> = q
        .coeffs()
        .par_iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() != 0.0)
        .map(|(k, &c)| {
            let s = if k == 0 {
                CoefficientSeries::from_real(&[1.0])
            } else {
                coeffs_of_power(b, n * k, coeff)?
            };
            Ok((c, s))
        })
        .collect::<Result<_>>()?;
    let mut out = CoefficientSeries::zero();
    for (c, s) in &powers {
        out.add_scaled(*c, s);
    }
    Ok(out)
}
