use criterion::{black_box, criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use potlll_bench::{lll_basis, raw_basis};
use potlll_core::{compute_gso, potential_ratio_scan, Algo, ExtFloat, FloatConfig, GsoState, InsertionStrategy};

const DIMS: [usize; 2] = [40, 60];

fn lll(c: &mut Criterion) {
    let mut group = c.benchmark_group("lll");
    group.sample_size(10);
    for dim in DIMS {
        let input = raw_basis(dim, 0);
        let params = Algo::Lll.params(0.99, false, FloatConfig::default());
        group.bench_with_input(BenchmarkId::from_parameter(dim), &input, |b, input| {
            b.iter_batched(
                || input.clone(),
                |mut basis| Algo::Lll.reduce(&mut basis, &params).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

/// Main phases on an LLL-reduced basis.
fn main_phase(c: &mut Criterion) {
    let mut group = c.benchmark_group("main_phase");
    group.sample_size(10);
    for dim in DIMS {
        let input = lll_basis(dim, 0);
        for algo in [Algo::PotLll, Algo::PotLll2, Algo::DeepLll { beta: 5 }, Algo::Bkz { beta: 5 }] {
            let params = algo.params(0.99, false, FloatConfig::default());
            group.bench_with_input(BenchmarkId::new(algo.to_string(), dim), &input, |b, input| {
                b.iter_batched(
                    || input.clone(),
                    |mut basis| algo.reduce(&mut basis, &params).unwrap(),
                    BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

fn ratio_scan(c: &mut Criterion) {
    let basis = lll_basis(100, 0);
    let gso: GsoState<f64> = compute_gso(&basis).unwrap();
    let ext: GsoState<ExtFloat> = compute_gso(&basis).unwrap();
    c.bench_function("ratio_scan/f64/100", |b| {
        b.iter(|| potential_ratio_scan(&gso, black_box(99), InsertionStrategy::MinPotential, 0.99))
    });
    c.bench_function("ratio_scan/ext/100", |b| {
        b.iter(|| potential_ratio_scan(&ext, black_box(99), InsertionStrategy::MinPotential, 0.99))
    });
}

fn gso(c: &mut Criterion) {
    let basis = lll_basis(100, 0);
    c.bench_function("compute_gso/f64/100", |b| b.iter(|| compute_gso::<_, f64>(black_box(&basis)).unwrap()));
}

criterion_group!(benches, lll, main_phase, ratio_scan, gso);
criterion_main!(benches);
