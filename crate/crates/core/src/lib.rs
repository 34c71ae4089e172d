//! Finite Blaschke products, Orlicz sequence norms of their powers, and a
//! constructive simultaneous approximation procedure built on them.
//!
//! The main entry points are [`BlaschkeProduct`], [`coefficients::coeffs_of_power`],
//! [`orlicz::luxemburg_norm`], [`asymptotics::norm_sweep`] and [`approx::run_pipeline`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod arcs;
pub mod asymptotics;
pub mod blaschke;
pub mod coefficients;
pub mod error;
pub mod orlicz;

pub use approx::{ApproxCertificate, ApproxRequest, LiftStrategy, PipelineOptions, TargetFunction};
pub use arcs::ArcSet;
pub use asymptotics::{NormKind, NormSweep, VdcBound};
pub use blaschke::{BlaschkeProduct, CensusOptions, PhaseCensus};
pub use coefficients::{CoeffOptions, CoefficientSeries};
pub use error::{Error, ErrorClass, Result};
pub use num_complex::Complex64;
pub use orlicz::{LuxemburgResult, OrliczFunction, Regime};
