//! Direct summation of the midpoint series on one worker against the full
//! pool. Building with `--no-default-features` replaces rayon by the plain
//! sequential loop, in which case both entries measure that loop.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use sinc_pi::par;
use sinc_pi::pi_series::{
    pi_accelerated, pi_direct_with, CorrectionOrder, DirectOptions, SeriesKind,
};
use sinc_pi::PrecisionContext;

fn direct_sum(c: &mut Criterion) {
    let ctx = PrecisionContext::digits(40).unwrap();
    let mut group = c.benchmark_group("direct_sum");
    group.sample_size(10);
    for l in [10_000u64, 100_000, 1_000_000] {
        let sequential = DirectOptions {
            threads: Some(1),
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("sequential", l), &l, |b, &l| {
            b.iter(|| {
                pi_direct_with(SeriesKind::Midpoint, black_box(l), &ctx, &sequential).unwrap()
            })
        });
        let parallel = DirectOptions {
            threads: Some(par::available_threads()),
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("parallel", l), &l, |b, &l| {
            b.iter(|| pi_direct_with(SeriesKind::Midpoint, black_box(l), &ctx, &parallel).unwrap())
        });
    }
    group.finish();

    c.bench_function("accelerated_1e12", |b| {
        b.iter(|| {
            pi_accelerated(
                SeriesKind::Midpoint,
                black_box(1_000_000_000_000),
                CorrectionOrder::Auto,
                &ctx,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, direct_sum);
criterion_main!(benches);
