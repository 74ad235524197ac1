use coarsedata::*;
use coarsedata_bench::{paired_sample, synthetic_sample, world};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_c_factor(c: &mut Criterion) {
    let mut group = c.benchmark_group("c_factor");
    for n in [4usize, 8, 12] {
        let sample = synthetic_sample(n, 200, 7);
        let full = world(n).full_set();
        group.bench_with_input(BenchmarkId::new("scar", n), &sample, |b, s| {
            b.iter(|| c_scar(black_box(s)))
        });
        group.bench_with_input(BenchmarkId::new("wcar_full", n), &sample, |b, s| {
            b.iter(|| c_wcar(black_box(&full), black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn bench_em(c: &mut Criterion) {
    let mut group = c.benchmark_group("face_value_mle");
    for n in [4usize, 8, 12] {
        let sample = synthetic_sample(n, 200, 11);
        group.bench_with_input(BenchmarkId::from_parameter(n), &sample, |b, s| {
            b.iter(|| mle_fv_saturated(black_box(s)).unwrap())
        });
    }
    let paired = paired_sample();
    let model = CompleteDataModel::paired_binary(paired.world()).unwrap();
    group.bench_function("paired_binary", |b| {
        b.iter(|| mle_fv_parametric(black_box(&model), black_box(&paired), 201).unwrap())
    });
    group.finish();
}

fn bench_compatibility(c: &mut Criterion) {
    let mut group = c.benchmark_group("compatibility");
    for n in [4usize, 8, 12] {
        let sample = synthetic_sample(n, 200, 13);
        let theta = CompleteDistribution::uniform_on(&world(n).full_set());
        group.bench_with_input(BenchmarkId::new("flow", n), &(), |b, _| {
            b.iter(|| is_compatible(black_box(&sample), black_box(&theta), 1e-9).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("scar_closed_form", n), &(), |b, _| {
            b.iter(|| is_scar_compatible(black_box(&sample), black_box(&theta), 1e-9).unwrap())
        });
    }
    group.finish();
}

fn bench_hull(c: &mut Criterion) {
    let mut group = c.benchmark_group("extremal_completions");
    for n in [4usize, 6, 7] {
        let sample = synthetic_sample(n, 100, 17);
        group.bench_with_input(BenchmarkId::from_parameter(n), &sample, |b, s| {
            b.iter(|| dempster_extremes(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn bench_saturated_profile(c: &mut Criterion) {
    let paired = paired_sample();
    let theta = CompleteDistribution::uniform_on(&paired.world().full_set());
    c.bench_function("saturated_profile", |b| {
        b.iter(|| {
            log_profile(
                black_box(&theta),
                black_box(&paired),
                CoarseningClass::Saturated,
            )
            .unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_c_factor,
    bench_em,
    bench_compatibility,
    bench_hull,
    bench_saturated_profile
);
criterion_main!(benches);
