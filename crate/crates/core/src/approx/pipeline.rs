use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::fit::{arc_fit, sup_on_interval, valuation_lift};
use super::power_index::{compose, find_power_index, PowerSearchOptions};
use super::target::TargetFunction;
use super::validate::{validate_certificate, MEASURE_SLACK};
use super::{ApproxCertificate, ApproxRequest, Intermediate, LiftStrategy, PipelineOptions};
use crate::arcs::ArcSet;
use crate::coefficients::CoefficientSeries;
use crate::error::{Error, Result};
use crate::orlicz::{luxemburg_norm, Regime};

const ARC_SAMPLES: usize = 1 << 16;

/// `max |P - target|` over the points `e^{2 pi i n / m}` that lie in `arcs`.
pub fn sup_error_on_arcs(p: &CoefficientSeries, target: &TargetFunction, arcs: &ArcSet, m: usize) -> f64 {
    let values = p.boundary_samples(m);
    let step = TAU / m as f64;
    values
        .par_iter()
        .enumerate()
        .with_min_len(1024)
        .filter(|(n, _)| arcs.contains(*n as f64 * step))
        .map(|(n, v)| (v - target.eval(n as f64 * step)).norm())
        .reduce(|| 0.0, f64::max)
}

fn check_request(req: &ApproxRequest) -> Result<()> {
    if !(req.epsilon > 0.0 && req.epsilon < 1.0) {
        return Err(Error::Validation(format!("epsilon {} must lie in (0, 1)", req.epsilon)));
    }
    if req.orlicz.regime() != Regime::Vanishing {
        return Err(Error::Validation(format!(
            "{} is classified {}, but the construction needs phi(t) = o(t^2)",
            req.orlicz.label(),
            req.orlicz.regime()
        )));
    }
    if req.blaschke.origin_order() == 0 {
        return Err(Error::Validation("the Blaschke product must vanish at 0".into()));
    }
    if req.blaschke.is_monomial() {
        return Err(Error::Validation(
            "the Blaschke product must not be a power of z".into(),
        ));
    }
    Ok(())
}

/// Runs the construction with internal budget `eps' = eps / 2`:
///
/// 1. arc `I = [pi eps', 2pi - pi eps']`, of measure `1 - eps'`;
/// 2. `R` with `|R - target| <= eps'/2` on `I`;
/// 3. `Q` with `Q(0) = 0`, valuation floor, `|Q - 1| <= eps' min(1, 1/||R||_I)` on `I`;
/// 4. `n0` with majorant of `||Q o B^{n0}||_phi` at most `eps' / max(||R||_1, ||R||_I)`;
/// 5. `g = R * (Q o B^{n0})` and `K = B^{-n0}(I) ∩ I`;
/// 6. `P = S_n(g_r)` with dilation and truncation errors each at most `eps'/4`;
///
/// then measures `||P||_phi` and `sup_K |P - target|` and re-validates on a random grid.
pub fn run_pipeline(req: &ApproxRequest, opts: &PipelineOptions) -> Result<ApproxCertificate> {
    check_request(req).map_err(|e| e.at_step("request"))?;
    let eps = req.epsilon;
    let eps_w = 0.5 * eps;
    let v = req.valuation;
    let (ia, ib) = (PI * eps_w, TAU - PI * eps_w);
    let arc_i = ArcSet::single(ia, ib)?;
    let b = &req.blaschke;

    let mut inter = Intermediate {
        working_epsilon: eps_w,
        arc_i: (ia, ib),
        degree_r: 0,
        r_fit_error: 0.0,
        r_sup_on_arc: 0.0,
        r_l1: 0.0,
        lift: opts.lift.resolve(v),
        degree_q: 0,
        q_valuation: None,
        q_fit_error: 0.0,
        power_bound: 0.0,
        majorant: 0.0,
        power_trace: Vec::new(),
        g_orlicz_norm: 0.0,
        g_degree: None,
        dilation_r: 0.0,
        truncation_index: 0,
        sup_grid_size: 0,
    };

    if req.target.is_zero() {
        return finish(req, opts, CoefficientSeries::zero(), arc_i, 0, inter);
    }

    let r = arc_fit(&req.target, &arc_i, 0.5 * eps_w, opts.deg_cap).map_err(|e| e.at_step("arc_fit"))?;
    let r_sup = sup_on_interval(&|t| r.poly.evaluate(Complex64::cis(t)).norm(), ia, ib, ARC_SAMPLES);
    let r_l1 = r.poly.l1_norm();
    inter.degree_r = r.degree;
    inter.r_fit_error = r.sup_error;
    inter.r_sup_on_arc = r_sup;
    inter.r_l1 = r_l1;
    if r.poly.is_zero() {
        return finish(req, opts, CoefficientSeries::zero(), arc_i, 0, inter);
    }

    let (lift_valuation, n_min) = match inter.lift {
        LiftStrategy::Blaschke => (1, v.div_ceil(b.origin_order()).max(1)),
        _ => (v.max(1), 1),
    };
    let q_tol = eps_w * (1.0 / r_sup).min(1.0);
    let q = valuation_lift(lift_valuation, &arc_i, q_tol, opts.deg_cap).map_err(|e| e.at_step("valuation_lift"))?;
    inter.degree_q = q.degree;
    inter.q_valuation = q.poly.valuation();
    inter.q_fit_error = q.sup_error;

    let bound = eps_w / r_l1.max(r_sup);
    inter.power_bound = bound;
    let search = PowerSearchOptions {
        coeff: opts.coeff,
        rel_tol: opts.rel_tol,
        n_cap: opts.n_cap,
        n_min,
    };
    let found = find_power_index(&q.poly, b, &req.orlicz, bound, &search).map_err(|e| e.at_step("find_power_index"))?;
    let n0 = found.n0;
    inter.majorant = found.majorant;
    inter.power_trace = found.trace;

    let composed = compose(&q.poly, b, n0, &opts.coeff).map_err(|e| e.at_step("compose"))?;
    let g = r.poly.multiply(&composed);
    let g_norm = luxemburg_norm(&req.orlicz, &g, opts.rel_tol)?.value;
    inter.g_orlicz_norm = g_norm;
    inter.g_degree = g.degree();
    if g_norm > eps_w {
        return Err(Error::CertificateInvalid(format!("||g||_phi = {g_norm:e} exceeds {eps_w:e}")).at_step("assemble"));
    }
    if g.valuation().is_some_and(|gv| gv < v) {
        return Err(Error::CertificateInvalid(format!("valuation of g below {v}")).at_step("assemble"));
    }

    let bn = b.power(n0)?;
    let k_set = bn
        .preimage_of_arc(&arc_i)
        .map_err(|e| e.at_step("preimage"))?
        .intersect(&arc_i);

    let (radius, n) = dilation_and_truncation(&g, 0.25 * eps_w).map_err(|e| e.at_step("dilate"))?;
    inter.dilation_r = radius;
    inter.truncation_index = n;
    let p = g.dilate(radius)?.truncate(n).trimmed();
    finish(req, opts, p, k_set, n0, inter)
}

/// Smallest `r = 1 - 2^-m` with `sum_j (1 - r^j)|g_j| <= budget`, then smallest `n`
/// with `sum_{j > n} r^j |g_j| <= budget`.
fn dilation_and_truncation(g: &CoefficientSeries, budget: f64) -> Result<(f64, usize)> {
    let mags: Vec<f64> = g.coeffs().iter().map(|c| c.norm()).collect();
    for m in 1..=60 {
        let log_r = (-(0.5f64).powi(m)).ln_1p();
        let r = 1.0 - 0.5f64.powi(m);
        let perturbation: f64 = mags
            .iter()
            .enumerate()
            .map(|(j, a)| -(j as f64 * log_r).exp_m1() * a)
            .sum();
        if perturbation > budget {
            continue;
        }
        let weighted: Vec<f64> = mags
            .iter()
            .enumerate()
            .map(|(j, a)| (j as f64 * log_r).exp() * a)
            .collect();
        let mut n = weighted.len().saturating_sub(1);
        let mut tail = 0.0;
        while n > 0 && tail + weighted[n] <= budget {
            tail += weighted[n];
            n -= 1;
        }
        return Ok((r, n));
    }
    Err(Error::Internal("no dilation radius meets the budget".into()))
}

fn finish(
    req: &ApproxRequest,
    opts: &PipelineOptions,
    p: CoefficientSeries,
    k_set: ArcSet,
    n0: usize,
    mut inter: Intermediate,
) -> Result<ApproxCertificate> {
    let eps = req.epsilon;
    let grid = (64 * p.degree().unwrap_or(0)).max(4096).next_power_of_two();
    inter.sup_grid_size = grid;
    let sup_error = sup_error_on_arcs(&p, &req.target, &k_set, grid);
    let lux = luxemburg_norm(&req.orlicz, &p, opts.rel_tol)?;

    let mut problems = Vec::new();
    if sup_error > eps {
        problems.push(format!("sup error {sup_error:e} on K exceeds {eps:e}"));
    }
    if lux.value > eps {
        problems.push(format!("Orlicz norm {:e} exceeds {eps:e}", lux.value));
    }
    if k_set.measure() < 1.0 - eps - MEASURE_SLACK {
        problems.push(format!("m(K) = {} is below {}", k_set.measure(), 1.0 - eps));
    }
    if p.valuation().is_some_and(|pv| pv < req.valuation) {
        problems.push(format!("valuation of P is below {}", req.valuation));
    }
    if !problems.is_empty() {
        return Err(Error::CertificateInvalid(problems.join("; ")).at_step("certify"));
    }

    let mut cert = ApproxCertificate {
        epsilon: eps,
        valuation_floor: req.valuation,
        p,
        k: k_set,
        achieved_orlicz_norm: lux.value,
        orlicz_bracket: lux.bracket,
        achieved_sup_error: sup_error,
        n0,
        intermediate: inter,
        target: req.target.clone(),
        orlicz: req.orlicz.clone(),
        blaschke: req.blaschke.clone(),
        validator: Default::default(),
    };
    let report = validate_certificate(&cert, opts.seed, opts.validator_points, opts.rel_tol);
    if !report.passed {
        return Err(Error::CertificateInvalid(report.failures.join("; ")).at_step("validate"));
    }
    cert.validator = report;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::OrliczFunction;

    #[test]
    fn dilation_choice_respects_budgets() {
        let g = CoefficientSeries::new(
            (0..200)
                .map(|j| Complex64::new(1.0 / (1.0 + j as f64).powi(2), 0.0))
                .collect(),
        );
        let budget = 0.01;
        let (r, n) = dilation_and_truncation(&g, budget).unwrap();
        let pert: f64 = g
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| (1.0 - r.powi(j as i32)) * c.norm())
            .sum();
        let tail: f64 = g
            .coeffs()
            .iter()
            .enumerate()
            .skip(n + 1)
            .map(|(j, c)| r.powi(j as i32) * c.norm())
            .sum();
        assert!(pert <= budget && tail <= budget);
        let previous = 1.0 - 2.0 * (1.0 - r);
        let pert_prev: f64 = g
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| (1.0 - previous.powi(j as i32)) * c.norm())
            .sum();
        assert!(r == 0.5 || pert_prev > budget);
        let tail_prev: f64 = g
            .coeffs()
            .iter()
            .enumerate()
            .skip(n)
            .map(|(j, c)| r.powi(j as i32) * c.norm())
            .sum();
        assert!(n == 0 || tail_prev > budget);
    }

    #[test]
    fn zero_target_is_trivially_certified() {
        let req = ApproxRequest {
            epsilon: 0.2,
            valuation: 3,
            target: TargetFunction::Trig {
                pos: vec![],
                neg: vec![],
            },
            orlicz: OrliczFunction::power(3.0).unwrap(),
            blaschke: crate::BlaschkeProduct::default_product(),
        };
        let cert = run_pipeline(&req, &PipelineOptions::default()).unwrap();
        assert!(cert.p.is_zero());
        assert!((cert.k.measure() - 0.9).abs() < 1e-15);
        assert!(cert.validator.passed);
    }

    #[test]
    fn divergent_regime_is_rejected() {
        let req = ApproxRequest {
            epsilon: 0.1,
            valuation: 5,
            target: TargetFunction::Conj,
            orlicz: OrliczFunction::power(1.5).unwrap(),
            blaschke: crate::BlaschkeProduct::default_product(),
        };
        let err = run_pipeline(&req, &PipelineOptions::default()).unwrap_err();
        assert!(matches!(err.root(), Error::Validation(_)));
        let mut req = req;
        req.orlicz = OrliczFunction::power(3.0).unwrap();
        req.blaschke = crate::BlaschkeProduct::from_real_zeros(&[0.5]).unwrap();
        assert!(matches!(
            run_pipeline(&req, &PipelineOptions::default()).unwrap_err().root(),
            Error::Validation(_)
        ));
    }
}
