use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use orlicz::{conjugate, estimate_constants, young_gap, LogGrid, OrliczFunction};

fn bench_conjugate(c: &mut Criterion) {
    let mut group = c.benchmark_group("conjugate");
    let cases = [
        ("power_1.5", OrliczFunction::power(1.5).unwrap()),
        ("power_3", OrliczFunction::power(3.0).unwrap()),
        ("power_log_2", OrliczFunction::power_log(2.0).unwrap()),
        ("exp_minus", OrliczFunction::exp_minus()),
    ];
    for (name, g) in &cases {
        group.bench_function(*name, |b| {
            b.iter(|| {
                let mut acc = 0.0;
                for k in -6..=6 {
                    let arg = 10f64.powf(k as f64 / 2.0);
                    acc += conjugate(g, black_box(arg), 1e-10).unwrap().value;
                }
                acc
            })
        });
    }
    group.finish();
}

fn bench_young_gap(c: &mut Criterion) {
    let g = OrliczFunction::power(2.0).unwrap();
    c.bench_function("young_gap_power2", |b| {
        b.iter(|| young_gap(&g, black_box(3.7), black_box(1.9), 1e-10).unwrap())
    });
}

fn bench_constants(c: &mut Criterion) {
    let g = OrliczFunction::power_log(2.0).unwrap();
    let grid = LogGrid::default();
    c.bench_function("estimate_constants_power_log", |b| {
        b.iter(|| estimate_constants(black_box(&g), &grid).unwrap())
    });
}

criterion_group!(benches, bench_conjugate, bench_young_gap, bench_constants);
criterion_main!(benches);
