//! Sequential versus rayon execution on the data-parallel kernels.

use bminimal::graphic::{graphic_functional_with, graphic_gradient_with, Axis, FieldWeight, GraphField, GridND};
use bminimal::stability::{inequality_battery, min_eigenvalue_sweep, SmoczykProblem};
use bminimal::Execution;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn graphic(c: &mut Criterion) {
    let grid = GridND::rectangle(Axis::new(-1.0, 1.0, 96).unwrap(), Axis::new(0.0, 1.0, 96).unwrap());
    let field = GraphField::from_fn(grid, 2, |p| vec![(p[0] * p[1]).sin(), p[0] * p[0] - p[1]]).unwrap();
    let b = FieldWeight::parse("0.5*y1 + 0.1*y2*y2", 2).unwrap();
    let mut group = c.benchmark_group("graphic");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("functional", name), &exec, |bench, &e| {
            bench.iter(|| graphic_functional_with(black_box(&field), &b, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gradient", name), &exec, |bench, &e| {
            bench.iter(|| graphic_gradient_with(black_box(&field), &b, e).unwrap())
        });
    }
    group.finish();
}

fn stability(c: &mut Criterion) {
    let prob = SmoczykProblem::new(0.01).unwrap();
    let grid = prob.grid(2000).unwrap();
    let eps: Vec<f64> = (1..=16).map(|i| 0.02 * i as f64).collect();
    let mut group = c.benchmark_group("stability");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("battery", name), &exec, |bench, &e| {
            bench.iter(|| inequality_battery(&prob, grid, 200, 0, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("eigen_sweep", name), &exec, |bench, &e| {
            bench.iter(|| min_eigenvalue_sweep(black_box(&eps), 1000, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, graphic, stability);
criterion_main!(benches);
