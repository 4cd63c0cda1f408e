use aer_bench::{example1_snapshot, noisy_lower_region, with_band};
use aer_core::asymptotics::eval_phi;
use aer_core::inverse::{
    reconstruct_source, smooth_values, EpsRule, ReconstructOptions, SmoothingOptions,
};
use aer_core::{forward_solve, ProblemSpec, Side, SolverConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn forward(c: &mut Criterion) {
    let spec = ProblemSpec::example1();
    let mut group = c.benchmark_group("forward");
    group.sample_size(10);
    for n in [50, 100] {
        let cfg = SolverConfig::new(spec.grid(n, n).unwrap(), 0.05, vec![0.05]);
        group.bench_with_input(BenchmarkId::new("t=0.05", n), &cfg, |b, cfg| {
            b.iter(|| forward_solve(&spec, black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

fn phi(c: &mut Criterion) {
    let spec = ProblemSpec::example1();
    c.bench_function("eval_phi/example1", |b| {
        b.iter(|| eval_phi(&spec, Side::Minus, black_box(0.3), black_box(-0.4)).unwrap())
    });
}

fn inverse(c: &mut Criterion) {
    let (_, u) = example1_snapshot(50);
    let (region, data) = noisy_lower_region(&u, 31, 0.01);
    let mut group = c.benchmark_group("inverse");
    group.sample_size(10);
    group.bench_function("smoothing/discrepancy", |b| {
        b.iter(|| {
            smooth_values(
                &region,
                black_box(&data),
                0.01,
                &SmoothingOptions::default(),
            )
            .unwrap()
        })
    });
    let fixed = SmoothingOptions {
        rule: EpsRule::Fixed(1e-4),
        ..SmoothingOptions::default()
    };
    group.bench_function("smoothing/fixed", |b| {
        b.iter(|| smooth_values(&region, black_box(&data), 0.01, &fixed).unwrap())
    });
    let g = with_band(&u, 32, 37);
    group.bench_function("reconstruction", |b| {
        b.iter(|| {
            reconstruct_source(black_box(&g), 1e-4, None, &ReconstructOptions::default()).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, forward, phi, inverse);
criterion_main!(benches);
