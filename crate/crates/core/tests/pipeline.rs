use std::f64::consts::PI;

use blaschke_lab::approx::{run_pipeline, universal_partial_sums_demo, validate_certificate, LiftStrategy};
use blaschke_lab::{
    ApproxCertificate, ApproxRequest, BlaschkeProduct, Complex64, Error, OrliczFunction, PipelineOptions,
    TargetFunction,
};

fn small_monomial(j: usize, a: f64) -> TargetFunction {
    TargetFunction::monomial(j, Complex64::new(a, 0.0))
}

fn request(eps: f64, valuation: usize, target: TargetFunction, p: f64) -> ApproxRequest {
    ApproxRequest {
        epsilon: eps,
        valuation,
        target,
        orlicz: OrliczFunction::power(p).unwrap(),
        blaschke: BlaschkeProduct::default_product(),
    }
}

fn check_certificate(cert: &ApproxCertificate) {
    let eps = cert.epsilon;
    assert!(cert.achieved_orlicz_norm <= eps);
    assert!(cert.achieved_sup_error <= eps);
    assert!(cert.k.measure() >= 1.0 - eps - 1e-8);
    assert!(cert.p.valuation().is_none_or(|v| v >= cert.valuation_floor));
    assert!(cert.validator.passed);
    assert_eq!(cert.validator.points, 100_000);
}

#[test]
fn feasible_request_is_certified() {
    let cert = run_pipeline(
        &request(0.9, 1, small_monomial(1, 0.01), 4.0),
        &PipelineOptions::default(),
    )
    .unwrap();
    check_certificate(&cert);
    assert!(cert.n0 >= 1);
    assert!(!cert.p.is_zero());
    let inter = &cert.intermediate;
    assert_eq!(inter.working_epsilon, 0.45);
    assert!((inter.arc_i.0 - 0.45 * PI).abs() < 1e-15);
    assert!(inter.majorant <= inter.power_bound);
    assert!(inter.g_orlicz_norm <= inter.working_epsilon);
    assert!(inter.sup_grid_size >= 4096 && inter.sup_grid_size.is_power_of_two());
}

#[test]
fn high_valuation_through_blaschke_lift() {
    let opts = PipelineOptions {
        lift: LiftStrategy::Auto,
        ..Default::default()
    };
    let cert = run_pipeline(&request(0.9, 12, small_monomial(1, 0.01), 3.0), &opts).unwrap();
    check_certificate(&cert);
    assert_eq!(cert.intermediate.lift, LiftStrategy::Blaschke);
    assert!(cert.n0 >= 12);
    assert!(cert.p.valuation().unwrap() >= 12);
}

#[test]
fn validator_is_reproducible_and_independent_of_seed() {
    let cert = run_pipeline(
        &request(0.9, 1, small_monomial(1, 0.01), 4.0),
        &PipelineOptions::default(),
    )
    .unwrap();
    let a = validate_certificate(&cert, 1, 20_000, 1e-10);
    let b = validate_certificate(&cert, 1, 20_000, 1e-10);
    assert_eq!(a, b);
    let c = validate_certificate(&cert, 2, 20_000, 1e-10);
    assert!(c.passed);
    assert_ne!(a.sup_error, c.sup_error);
}

#[test]
fn validator_catches_a_tampered_certificate() {
    let mut cert = run_pipeline(
        &request(0.9, 1, small_monomial(1, 0.01), 4.0),
        &PipelineOptions::default(),
    )
    .unwrap();
    cert.p = cert.p.scale(Complex64::new(200.0, 0.0));
    let report = validate_certificate(&cert, 3, 10_000, 1e-10);
    assert!(!report.passed);
    assert!(!report.failures.is_empty());
}

#[test]
fn certificate_json_round_trip() {
    let cert = run_pipeline(
        &request(0.9, 1, small_monomial(1, 0.01), 4.0),
        &PipelineOptions::default(),
    )
    .unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    let back: ApproxCertificate = serde_json::from_str(&json).unwrap();
    assert_eq!(back.p, cert.p);
    assert_eq!(back.k, cert.k);
    assert_eq!(back.intermediate, cert.intermediate);
    assert_eq!(back.validator, cert.validator);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in [
        "P",
        "K",
        "epsilon",
        "achieved_orlicz_norm",
        "achieved_sup_error",
        "n0",
        "validator",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn request_json_uses_default_blaschke() {
    let req: ApproxRequest = serde_json::from_str(
        r#"{"epsilon": 0.9, "valuation": 1, "target": {"kind": "conj"}, "orlicz": {"family": "power", "p": 4.0}}"#,
    )
    .unwrap();
    assert_eq!(req.blaschke.zeros(), BlaschkeProduct::default_product().zeros());
    assert_eq!(req.target, TargetFunction::Conj);
}

#[test]
fn nearly_full_arc_fit_is_reported_with_step() {
    let err = run_pipeline(
        &request(0.1, 5, TargetFunction::Conj, 3.0),
        &PipelineOptions {
            deg_cap: 64,
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(err.to_string().contains("arc_fit"));
    assert!(matches!(err.root(), Error::FitFailure { .. }));
}

#[test]
fn single_target_demo_reduces_to_the_pipeline() {
    let target = small_monomial(1, 0.01);
    let phi = OrliczFunction::power(4.0).unwrap();
    let b = BlaschkeProduct::default_product();
    let opts = PipelineOptions::default();
    let demo = universal_partial_sums_demo(std::slice::from_ref(&target), &[0.9], &phi, &b, &opts).unwrap();
    let cert = run_pipeline(&request(0.9, 0, target, 4.0), &opts).unwrap();
    assert_eq!(demo.f, cert.p);
    assert_eq!(demo.ks, vec![cert.k]);
    assert!(demo.stages[0].partial_sum_identity);
}

#[test]
fn two_stage_demo_keeps_partial_sums() {
    let targets = [small_monomial(1, 0.002), small_monomial(2, 0.01)];
    let schedule = [0.9, 0.9];
    let phi = OrliczFunction::power(4.0).unwrap();
    let b = BlaschkeProduct::default_product();
    let demo = universal_partial_sums_demo(&targets, &schedule, &phi, &b, &PipelineOptions::default()).unwrap();
    assert_eq!(demo.stages.len(), 2);
    assert!(demo.indices.windows(2).all(|w| w[0] <= w[1]));
    for (stage, eps) in demo.stages.iter().zip(schedule) {
        assert!(stage.partial_sum_identity);
        assert!(stage.partial_sum_error <= 2.0 * eps);
        assert!(stage.certificate.k.measure() >= 1.0 - eps - 1e-8);
    }
    let total: f64 = schedule.iter().sum();
    let norm = blaschke_lab::orlicz::luxemburg_norm(&phi, &demo.f, 1e-10)
        .unwrap()
        .value;
    assert!(norm <= total);
}

#[test]
fn demo_propagates_stage_failures() {
    let targets = [small_monomial(1, 0.01), small_monomial(2, 0.01)];
    let phi = OrliczFunction::power(4.0).unwrap();
    let b = BlaschkeProduct::default_product();
    let opts = PipelineOptions {
        n_cap: 64,
        lift: LiftStrategy::Auto,
        ..Default::default()
    };
    let err = universal_partial_sums_demo(&targets, &[0.9, 0.9], &phi, &b, &opts).unwrap_err();
    assert!(matches!(err.root(), Error::SearchFailure { .. }));
}

#[test]
fn demo_rejects_mismatched_schedule() {
    let phi = OrliczFunction::power(4.0).unwrap();
    let b = BlaschkeProduct::default_product();
    let err = universal_partial_sums_demo(
        &[TargetFunction::Conj],
        &[0.5, 0.5],
        &phi,
        &b,
        &PipelineOptions::default(),
    );
    assert!(matches!(err, Err(Error::Validation(_))));
}
