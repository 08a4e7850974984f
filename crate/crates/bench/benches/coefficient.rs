use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use poincare_bench::coefficient_queries;
use poincare_core::poincare::{certify_nonzero, coefficient, tau_oracle, CertifyOptions};

fn coefficients(c: &mut Criterion) {
    let mut group = c.benchmark_group("coefficient");
    group.sample_size(10);
    for q in coefficient_queries() {
        group.bench_with_input(BenchmarkId::new("fixed_1e-20", q), &q, |b, q| {
            b.iter(|| coefficient(q, 128, 1e-20).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("certify", q), &q, |b, q| {
            b.iter(|| certify_nonzero(q, &CertifyOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn tau(c: &mut Criterion) {
    c.bench_function("tau_oracle/1000", |b| b.iter(|| tau_oracle(1000).unwrap()));
}

criterion_group!(benches, coefficients, tau);
criterion_main!(benches);
