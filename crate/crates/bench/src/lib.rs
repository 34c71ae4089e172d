//! Shared fixtures for the benchmarks.

use blaschke_lab::{ApproxRequest, BlaschkeProduct, Complex64, OrliczFunction, TargetFunction};

/// Zeros `0, 0.5`.
pub fn default_product() -> BlaschkeProduct {
    BlaschkeProduct::default_product()
}

/// Degree four product with complex zeros.
pub fn quartic_product() -> BlaschkeProduct {
    BlaschkeProduct::new(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.3, 0.4),
        Complex64::new(0.1, -0.7),
    ])
    .unwrap()
}

/// A request the pipeline certifies in well under a second.
pub fn small_request() -> ApproxRequest {
    ApproxRequest {
        epsilon: 0.9,
        valuation: 1,
        target: TargetFunction::monomial(1, Complex64::new(0.01, 0.0)),
        orlicz: OrliczFunction::power(4.0).unwrap(),
        blaschke: default_product(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(quartic_product().degree(), 4);
        assert_eq!(small_request().blaschke.origin_order(), 1);
    }
}
