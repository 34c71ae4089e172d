//! Chaining approximation blocks with disjoint spectra, so that the partial sums of one
//! series approximate several targets in turn.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pipeline::{run_pipeline, sup_error_on_arcs};
use super::target::TargetFunction;
use super::{ApproxCertificate, ApproxRequest, PipelineOptions};
use crate::arcs::ArcSet;
use crate::blaschke::BlaschkeProduct;
use crate::coefficients::CoefficientSeries;
use crate::error::{Error, Result};
use crate::orlicz::OrliczFunction;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemoStage {
    pub valuation_floor: usize,
    /// `d_j`, the degree of the running sum after this stage.
    pub index: usize,
    /// `max |S_{d_j}(f) - target_j|` on the sup grid points of `K_j`.
    pub partial_sum_error: f64,
    /// Whether `S_{d_j}(f)` equals the running sum coefficientwise.
    pub partial_sum_identity: bool,
    pub certificate: ApproxCertificate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemoResult {
    pub f: CoefficientSeries,
    pub indices: Vec<usize>,
    #[serde(rename = "Ks")]
    pub ks: Vec<ArcSet>,
    pub stages: Vec<DemoStage>,
}

/// Stage `j` approximates `targets[j] - f_{j-1}` with valuation floor `deg f_{j-1} + 1`
/// and accuracy `eps_schedule[j]`, then `f_j = f_{j-1} + P_j`.
pub fn universal_partial_sums_demo(
    targets: &[TargetFunction],
    eps_schedule: &[f64],
    phi: &OrliczFunction,
    b: &BlaschkeProduct,
    opts: &PipelineOptions,
) -> Result<DemoResult> {
    if targets.is_empty() || targets.len() != eps_schedule.len() {
        return Err(Error::Validation(
            "targets and epsilon schedule must be nonempty and of equal length".into(),
        ));
    }
    let mut running = CoefficientSeries::zero();
    let mut partials = Vec::new();
    let mut certs = Vec::new();
    let mut floors = Vec::new();
    for (j, (target, &eps)) in targets.iter().zip(eps_schedule).enumerate() {
        let floor = if j == 0 {
            0
        } else {
            running.degree().map_or(0, |d| d + 1)
        };
        let stage_target = if j == 0 {
            target.clone()
        } else {
            TargetFunction::Residual {
                base: Box::new(target.clone()),
                minus: running.clone(),
            }
        };
        let req = ApproxRequest {
            epsilon: eps,
            valuation: floor,
            target: stage_target,
            orlicz: phi.clone(),
            blaschke: b.clone(),
        };
        let cert = run_pipeline(&req, opts)?;
        running.add_scaled(Complex64::new(1.0, 0.0), &cert.p);
        running = running.trimmed();
        partials.push(running.clone());
        certs.push(cert);
        floors.push(floor);
    }

    let f = running;
    let mut stages = Vec::new();
    let mut indices = Vec::new();
    for (((cert, partial), target), floor) in certs.into_iter().zip(&partials).zip(targets).zip(floors) {
        let index = partial.degree().unwrap_or(0);
        let s = f.truncate(index);
        let identity = s.clone().trimmed().coeffs() == partial.coeffs();
        let grid = (64 * index).max(4096).next_power_of_two();
        let partial_sum_error = sup_error_on_arcs(&s, target, &cert.k, grid);
        indices.push(index);
        stages.push(DemoStage {
            valuation_floor: floor,
            index,
            partial_sum_error,
            partial_sum_identity: identity,
            certificate: cert,
        });
    }
    Ok(DemoResult {
        f,
        indices,
        ks: stages.iter().map(|s| s.certificate.k.clone()).collect(),
        stages,
    })
}
