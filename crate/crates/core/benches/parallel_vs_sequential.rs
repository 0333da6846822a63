use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kakeya_core::harmonic::{fourier_exact, fourier_float};
use kakeya_core::maximal::MaximalPlan;
use kakeya_core::parallel::{set_execution, Execution};
use kakeya_core::search::exact_min_kakeya;
use kakeya_core::verify::{corpus_density, run_check, CheckId, VerifyConfig};
use kakeya_core::RingContext;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn fourier(c: &mut Criterion) {
    let ctx = RingContext::padic(2, 3, 3).unwrap();
    let f = corpus_density(&ctx, 1, 0);
    let g = f.to_f64();
    let mut group = c.benchmark_group("fourier");
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(BenchmarkId::new("exact", name), |b| b.iter(|| fourier_exact(black_box(&f))));
        group.bench_function(BenchmarkId::new("float", name), |b| b.iter(|| fourier_float(black_box(&g))));
    }
    group.finish();
}

fn maximal(c: &mut Criterion) {
    let ctx = RingContext::padic(3, 2, 3).unwrap();
    let plan = MaximalPlan::new(&ctx, 2).unwrap();
    let f = corpus_density(&ctx, 2, 0);
    let mut group = c.benchmark_group("plane_maximal");
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(name, |b| b.iter(|| plan.evaluate(black_box(&f))));
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let ctx = RingContext::padic(2, 3, 3).unwrap();
    let cfg = VerifyConfig {
        seed: 0,
        trials: 16,
        ..VerifyConfig::default()
    };
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for id in [CheckId::XrayL2, CheckId::MaxEst] {
        for (name, mode) in MODES {
            set_execution(mode);
            group.bench_function(BenchmarkId::new(id.as_str(), name), |b| {
                b.iter(|| run_check(id, &ctx, black_box(&cfg)).unwrap())
            });
        }
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let ctx = RingContext::padic(3, 1, 3).unwrap();
    let mut group = c.benchmark_group("exact_search");
    group.sample_size(10);
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(name, |b| b.iter(|| exact_min_kakeya(&ctx, 2, u64::MAX).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, fourier, maximal, verification, search);
criterion_main!(benches);
