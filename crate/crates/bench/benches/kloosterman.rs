use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use poincare_bench::MODULI;
use poincare_core::kloosterman::{
    kloosterman_direct, kloosterman_factored, second_moment, KloostermanTable,
};

fn routes(c: &mut Criterion) {
    let mut group = c.benchmark_group("kloosterman");
    for &modulus in &MODULI {
        group.bench_with_input(BenchmarkId::new("direct", modulus), &modulus, |b, &m| {
            b.iter(|| kloosterman_direct(black_box(3), black_box(7), m, 128).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("factored", modulus), &modulus, |b, &m| {
            b.iter(|| kloosterman_factored(black_box(3), black_box(7), m, 128).unwrap())
        });
    }
    group.finish();
}

fn table_reuse(c: &mut Criterion) {
    let table = KloostermanTable::new(9973, 128).unwrap();
    c.bench_function("kloosterman/table_eval_9973", |b| {
        b.iter(|| table.eval(black_box(5), black_box(11)))
    });
}

fn moment(c: &mut Criterion) {
    c.bench_function("second_moment/1009", |b| {
        b.iter(|| second_moment(black_box(1), 1009, 64).unwrap())
    });
}

criterion_group!(benches, routes, table_reuse, moment);
criterion_main!(benches);
