use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use poincare_bench::{BESSEL_CASES, PRECISIONS};
use poincare_core::bessel::bessel_j_f64;

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("bessel_j");
    for &(nu, x) in &BESSEL_CASES {
        for &prec in &PRECISIONS {
            let id = BenchmarkId::new(format!("nu{nu}_x{x}"), prec);
            group.bench_with_input(id, &prec, |b, &p| {
                b.iter(|| bessel_j_f64(nu, black_box(x), p).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, series);
criterion_main!(benches);
