use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ApproxCertificate;
use crate::orlicz::luxemburg_norm;

/// Tolerance on `m(K) >= 1 - eps`, matching the accuracy of arc preimages.
pub const MEASURE_SLACK: f64 = 1e-8;

/// Independent re-check of a certificate from its raw data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub points: usize,
    /// `max |P - target|` over the random points of `K`, by Horner evaluation.
    pub sup_error: f64,
    /// Recomputed upper end of the Luxemburg bracket.
    pub orlicz_norm: f64,
    pub measure: f64,
    pub valuation: Option<usize>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Samples `points` uniform angles of `K` from a seeded ChaCha8 stream and recomputes
/// every quantity the certificate claims.
pub fn validate_certificate(cert: &ApproxCertificate, seed: u64, points: usize, rel_tol: f64) -> ValidationReport {
    let eps = cert.epsilon;
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let thetas = cert.k.sample_uniform(points, &mut rng);
    let sup_error = thetas
        .par_iter()
        .with_min_len(1024)
        .map(|&t| (cert.p.evaluate(Complex64::cis(t)) - cert.target.eval(t)).norm())
        .reduce(|| 0.0, f64::max);
    if !(sup_error <= eps) {
        failures.push(format!("random-grid sup error {sup_error:e} exceeds {eps:e}"));
    }
    let orlicz_norm = match luxemburg_norm(&cert.orlicz, &cert.p, rel_tol) {
        Ok(r) => r.value,
        Err(e) => {
            failures.push(format!("Luxemburg norm: {e}"));
            f64::NAN
        }
    };
    if !(orlicz_norm <= eps) {
        failures.push(format!("Orlicz norm {orlicz_norm:e} exceeds {eps:e}"));
    }
    let measure = cert.k.measure();
    if measure < 1.0 - eps - MEASURE_SLACK {
        failures.push(format!("m(K) = {measure} is below {}", 1.0 - eps));
    }
    let valuation = cert.p.valuation();
    if valuation.is_some_and(|v| v < cert.valuation_floor) {
        failures.push(format!("valuation {valuation:?} is below {}", cert.valuation_floor));
    }
    if points > 0 && thetas.is_empty() {
        failures.push("K is empty".into());
    }
    ValidationReport {
        seed,
        points: thetas.len(),
        sup_error,
        orlicz_norm,
        measure,
        valuation,
        passed: failures.is_empty(),
        failures,
    }
}
