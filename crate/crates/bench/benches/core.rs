use std::f64::consts::PI;

use blaschke_lab::approx::{arc_fit, run_pipeline, PipelineOptions, TargetFunction};
use blaschke_lab::coefficients::coeffs_of_power;
use blaschke_lab::orlicz::luxemburg_norm;
use blaschke_lab::{ArcSet, CensusOptions, CoeffOptions, OrliczFunction};
use blaschke_lab_bench::{default_product, quartic_product, small_request};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn coefficients(c: &mut Criterion) {
    let mut group = c.benchmark_group("coeffs_of_power");
    let b = default_product();
    for k in [100, 1000, 10000] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |bench, &k| {
            bench.iter(|| coeffs_of_power(&b, black_box(k), &CoeffOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn luxemburg(c: &mut Criterion) {
    let s = coeffs_of_power(&quartic_product(), 2000, &CoeffOptions::default()).unwrap();
    let power = OrliczFunction::power(3.0).unwrap();
    let quadlog = OrliczFunction::quad_log(6.0).unwrap();
    c.bench_function("luxemburg/power", |b| {
        b.iter(|| luxemburg_norm(&power, black_box(&s), 1e-10).unwrap())
    });
    c.bench_function("luxemburg/quadlog", |b| {
        b.iter(|| luxemburg_norm(&quadlog, black_box(&s), 1e-10).unwrap())
    });
}

fn census(c: &mut Criterion) {
    let b = quartic_product();
    c.bench_function("phase_census/quartic", |bench| {
        bench.iter(|| b.phase_census(&CensusOptions::default()).unwrap())
    });
}

fn fitting(c: &mut Criterion) {
    let arc = ArcSet::single(1.0, 2.0 * PI - 1.0).unwrap();
    c.bench_function("arc_fit/conj", |b| {
        b.iter(|| arc_fit(&TargetFunction::Conj, &arc, 1e-3, 512).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let req = small_request();
    let opts = PipelineOptions {
        validator_points: 10_000,
        ..Default::default()
    };
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("small_request", |b| b.iter(|| run_pipeline(&req, &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, coefficients, luxemburg, census, fitting, pipeline);
criterion_main!(benches);
