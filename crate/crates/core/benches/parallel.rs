//! Rayon pool versus a single-thread pool on the data-parallel kernels:
//! dense assembly of the iteration matrix, a batch of independent solves and
//! a 2D transform round trip.
//!
//! Run with `cargo bench -p petviashvili --bench parallel`. Building with
//! `--no-default-features` measures the purely sequential fallback.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;

use petviashvili::diagnostics::IterationMatrix;
use petviashvili::iterate::solve_batch;
use petviashvili::linalg::assemble;
use petviashvili::problems::{gaussian_seed, perturbed_seed, NlsSoliton, SolitonParameters};
use petviashvili::spectral;
use petviashvili::{Grid1D, Grid2D, IterationConfig, ScalarKind, StabilizingFactor};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let all = rayon::current_num_threads();
    vec![
        ("pool", ThreadPoolBuilder::new().num_threads(all).build().unwrap()),
        ("single", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
    ]
}

fn soliton(m: usize) -> NlsSoliton {
    let grid = Grid1D::new(50.0, m).unwrap();
    NlsSoliton::new(SolitonParameters::new(1.0, 1.0, 1.0), grid).unwrap()
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_S");
    group.sample_size(10);
    for m in [128, 256] {
        let problem = soliton(m);
        let u = problem.exact_solution();
        let s = IterationMatrix::new(&problem, &u).unwrap();
        for (label, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(label, m), &m, |b, _| {
                b.iter(|| pool.install(|| black_box(assemble(&s))))
            });
        }
    }
    group.finish();
}

fn bench_batch(c: &mut Criterion) {
    let problem = soliton(512);
    let factor = StabilizingFactor::petviashvili(1.5, &problem).unwrap();
    let exact = problem.exact_solution();
    let seeds: Vec<_> = (0..8)
        .map(|k| perturbed_seed(&exact, 0.05 * k as f64, 0.1))
        .collect();
    let config = IterationConfig::default().with_tolerance(1e-10);
    let mut group = c.benchmark_group("solve_batch");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(label, |b| {
            b.iter(|| pool.install(|| black_box(solve_batch(&problem, Some(&factor), &seeds, &config))))
        });
    }
    group.finish();
}

fn bench_fft2(c: &mut Criterion) {
    let grid = Grid2D::square(32.0 * std::f64::consts::PI, 256).unwrap();
    let eta = gaussian_seed(grid, 2.0, 2.0, false, ScalarKind::Real).unwrap();
    let mut group = c.benchmark_group("fft2_round_trip");
    for (label, pool) in pools() {
        group.bench_function(label, |b| {
            b.iter(|| pool.install(|| black_box(spectral::inverse(eta.domain(), ScalarKind::Real, spectral::forward(&eta)))))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_assembly, bench_batch, bench_fft2);
criterion_main!(benches);
