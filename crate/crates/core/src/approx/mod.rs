//! Simultaneous approximation: polynomials that are small in an Orlicz sequence
//! norm while approximating a target uniformly on a large compact subset of the circle.

mod demo;
mod fit;
mod pipeline;
mod power_index;
mod target;
mod validate;

use serde::{Deserialize, Serialize};

use crate::arcs::ArcSet;
use crate::blaschke::BlaschkeProduct;
use crate::coefficients::{CoeffOptions, CoefficientSeries};
use crate::orlicz::{OrliczFunction, DEFAULT_REL_TOL};

pub use demo::{universal_partial_sums_demo, DemoResult, DemoStage};
pub use fit::{arc_fit, sup_on_interval, valuation_lift, ArcFit, DEFAULT_DEG_CAP};
pub use pipeline::{run_pipeline, sup_error_on_arcs};
pub use power_index::{compose, find_power_index, Majorant, PowerIndex, PowerSearchOptions, DEFAULT_N_CAP};
pub use target::TargetFunction;
pub use validate::{validate_certificate, ValidationReport, MEASURE_SLACK};

/// Hypotheses and accuracy of one approximation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxRequest {
    pub epsilon: f64,
    /// Every coefficient of index below this is zero in the result.
    pub valuation: usize,
    pub target: TargetFunction,
    pub orlicz: OrliczFunction,
    #[serde(default = "BlaschkeProduct::default_product")]
    pub blaschke: BlaschkeProduct,
}

/// How the valuation floor is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftStrategy {
    /// `Q = z^v S` with `S` fitted to `zeta^{-v}` on the arc.
    #[default]
    Direct,
    /// `Q` of valuation 1 and a power `n >= v / ord_0(B)`, so that `B^n` supplies the zeros.
    Blaschke,
    /// `Direct` for `v <= 8`, `Blaschke` above.
    Auto,
}

impl LiftStrategy {
    pub(crate) fn resolve(self, v: usize) -> LiftStrategy {
        match self {
            LiftStrategy::Auto if v <= 8 => LiftStrategy::Direct,
            LiftStrategy::Auto => LiftStrategy::Blaschke,
            s => s,
        }
    }
}

impl std::str::FromStr for LiftStrategy {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "direct" => Ok(LiftStrategy::Direct),
            "blaschke" => Ok(LiftStrategy::Blaschke),
            "auto" => Ok(LiftStrategy::Auto),
            _ => Err(crate::Error::Validation(format!("unknown lift strategy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub coeff: CoeffOptions,
    pub rel_tol: f64,
    pub deg_cap: usize,
    pub n_cap: usize,
    pub lift: LiftStrategy,
    /// Seed of the validator's random grid.
    pub seed: u64,
    pub validator_points: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            coeff: CoeffOptions::default(),
            rel_tol: DEFAULT_REL_TOL,
            deg_cap: DEFAULT_DEG_CAP,
            n_cap: DEFAULT_N_CAP,
            lift: LiftStrategy::Direct,
            seed: 20_240_601,
            validator_points: 100_000,
        }
    }
}

/// Quantities chosen along the way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intermediate {
    /// Internal budget, half the requested epsilon.
    pub working_epsilon: f64,
    pub arc_i: (f64, f64),
    pub degree_r: usize,
    pub r_fit_error: f64,
    pub r_sup_on_arc: f64,
    pub r_l1: f64,
    pub lift: LiftStrategy,
    pub degree_q: usize,
    pub q_valuation: Option<usize>,
    pub q_fit_error: f64,
    pub power_bound: f64,
    pub majorant: f64,
    pub power_trace: Vec<(usize, f64)>,
    pub g_orlicz_norm: f64,
    pub g_degree: Option<usize>,
    pub dilation_r: f64,
    pub truncation_index: usize,
    pub sup_grid_size: usize,
}

/// Output of [`run_pipeline`]: the polynomial `P`, the set `K` and the measured errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxCertificate {
    pub epsilon: f64,
    pub valuation_floor: usize,
    #[serde(rename = "P")]
    pub p: CoefficientSeries,
    #[serde(rename = "K")]
    pub k: ArcSet,
    /// Upper end of the Luxemburg bracket of `P`.
    pub achieved_orlicz_norm: f64,
    pub orlicz_bracket: (f64, f64),
    /// Maximum of `|P - target|` over the grid points lying in `K`.
    pub achieved_sup_error: f64,
    pub n0: usize,
    pub intermediate: Intermediate,
    pub target: TargetFunction,
    pub orlicz: OrliczFunction,
    pub blaschke: BlaschkeProduct,
    pub validator: ValidationReport,
}
