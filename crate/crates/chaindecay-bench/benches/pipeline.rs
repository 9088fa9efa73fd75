use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use chaindecay::linalg::eigh_tridiagonal;
use chaindecay::model::{tridiagonalize, StarModel};
use chaindecay::propagate::{BandQuadrature, EigenPropagator, QUADRATURE_TARGET};
use chaindecay::regimes::analyze;
use chaindecay_bench::{reference_chain, reference_model, time_grid};

fn bench_eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigh_tridiagonal");
    group.sample_size(10);
    for n in [128usize, 512] {
        let h = reference_chain(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| eigh_tridiagonal(black_box(h.diag()), black_box(h.offdiag())).unwrap())
        });
    }
    group.finish();
}

fn bench_quadrature(c: &mut Criterion) {
    let model = reference_model();
    let mut group = c.benchmark_group("band_quadrature");
    group.sample_size(10);
    group.bench_function("build_tmax_100", |b| {
        b.iter(|| BandQuadrature::build(black_box(&model), 100.0, QUADRATURE_TARGET).unwrap())
    });
    let quadrature = BandQuadrature::build(&model, 100.0, QUADRATURE_TARGET).unwrap();
    group.bench_function("amplitude_t50", |b| {
        b.iter(|| quadrature.amplitude(black_box(50.0)))
    });
    group.finish();
}

fn bench_survival_series(c: &mut Criterion) {
    let mut group = c.benchmark_group("survival_series");
    group.sample_size(10);
    let propagator = EigenPropagator::new(&reference_chain(266)).unwrap();
    let times = time_grid(100.0, 2000);
    group.bench_function("eigen_2000pts", |b| {
        b.iter(|| propagator.series(black_box(&times)).unwrap())
    });
    group.finish();
}

fn bench_recursion(c: &mut Criterion) {
    let mut group = c.benchmark_group("recursion_method");
    group.sample_size(10);
    let star = StarModel::from_chain(&reference_chain(200)).unwrap();
    group.bench_function("tridiagonalize_200", |b| {
        b.iter(|| tridiagonalize(black_box(&star), 200).unwrap())
    });
    group.finish();
}

fn bench_regime_analysis(c: &mut Criterion) {
    let mut group = c.benchmark_group("regimes");
    group.sample_size(10);
    let strong = chaindecay::ChainModel::new(1.8, 0.77, 1.0).unwrap();
    group.bench_function("analyze_strong_coupling", |b| {
        b.iter(|| analyze(black_box(&strong)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_eigensolver,
    bench_quadrature,
    bench_survival_series,
    bench_recursion,
    bench_regime_analysis
);
criterion_main!(benches);
