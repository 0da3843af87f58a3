use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tpe_core::{
    enclose, grid_sharp_interval, lagrange_baseline, mm_minimize, parse_function, Interval,
};

const CASES: &[(&str, usize, f64, (f64, f64))] = &[
    ("exp", 2, 0.5, (0.0, 2.0)),
    ("relu", 2, 0.5, (-1.0, 1.0)),
    ("softplus", 2, 1.0, (-2.0, 2.0)),
    ("sin", 3, 0.1, (0.0, 0.3)),
    ("lincomb:[(1.5,exp,3,0)]+poly:[0,0,-25]", 2, 0.5, (0.0, 1.0)),
    ("gelu", 3, 0.2, (-1.0, 1.0)),
];

fn enclosures(c: &mut Criterion) {
    let mut group = c.benchmark_group("enclose");
    for &(spec, k, x0, (a, b)) in CASES {
        let f = parse_function(spec).unwrap();
        let region = Interval::new(a, b).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(spec), &f, |bench, f| {
            bench.iter(|| enclose(black_box(f), k, black_box(x0), &region).unwrap())
        });
    }
    group.finish();
}

fn baselines(c: &mut Criterion) {
    let f = parse_function("exp").unwrap();
    let region = Interval::new(0.0, 2.0).unwrap();
    c.bench_function("lagrange_baseline/exp", |bench| {
        bench.iter(|| lagrange_baseline(black_box(&f), 2, &region).unwrap())
    });
}

fn grid_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_sharp_interval");
    group.sample_size(10);
    let f = parse_function("exp").unwrap();
    let region = Interval::new(0.0, 2.0).unwrap();
    for n in [10_000usize, 1_000_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, &n| {
            bench.iter(|| grid_sharp_interval(&f, 2, 0.5, &region, n).unwrap())
        });
    }
    group.finish();
}

fn minimization(c: &mut Criterion) {
    let f = parse_function("lincomb:[(1,softplus,2,0),(1,softplus,-1,0.5)]").unwrap();
    c.bench_function("mm_minimize/softplus-pair", |bench| {
        bench.iter(|| mm_minimize(black_box(&f), 2.0, 1.0, 50, 1e-12).unwrap())
    });
}

criterion_group!(benches, enclosures, baselines, grid_oracle, minimization);
criterion_main!(benches);
