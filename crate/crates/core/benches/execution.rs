//! Sequential against parallel execution on the three data-parallel kernels.
//! Both modes produce bit-identical results; only wall-clock time differs.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use marginrcn::dimreduce::{sample_jl_matrix, JlConfig};
use marginrcn::hardness::{correlation_sweep, default_eta, near_orthogonal_set};
use marginrcn::model::empirical_subgradient_with;
use marginrcn::{generate_dataset, Execution, SimulatorConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn subgradient(c: &mut Criterion) {
    let (data, _) = generate_dataset(&SimulatorConfig::new(100, 0.2, 0.2, 50_000, 1)).unwrap();
    let w = vec![0.05; 100];
    let mut g = c.benchmark_group("empirical_subgradient");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "N=50000,d=100"), |b| {
            b.iter(|| empirical_subgradient_with(black_box(&w), &data, 0.2, exec).unwrap())
        });
    }
    g.finish();
}

fn correlation(c: &mut Criterion) {
    let family = near_orthogonal_set(16, 0.25, 8, 2).unwrap();
    let mut g = c.benchmark_group("correlation_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "d=16,28 pairs"), |b| {
            b.iter(|| correlation_sweep(black_box(&family), 11, &default_eta(), 10.0, exec).unwrap())
        });
    }
    g.finish();
}

fn gram(c: &mut Criterion) {
    let a = sample_jl_matrix(&JlConfig::with_dimension(2000, 3, 1e-3, 0.25), 200).unwrap();
    let mut g = c.benchmark_group("gram");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "m=2000,d=200"), |b| b.iter(|| black_box(a.gram(exec))));
    }
    g.finish();
}

criterion_group!(benches, subgradient, correlation, gram);
criterion_main!(benches);
