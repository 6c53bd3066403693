use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use sle_coset::affine::AffineModule;
use sle_coset::internal::{internal_process_step, InternalScheme, InternalState};
use sle_coset::loewner::{q_operator, AutSeries, SleSeriesState};
use sle_coset::montecarlo::{mc_simulate, McConfig, McTarget};
use sle_coset::scalar::{int, rat};
use sle_coset::sl2::Spin;
use sle_coset::virasoro::VermaModule;

fn gram(c: &mut Criterion) {
    c.bench_function("gram_matrix_grade6", |b| {
        b.iter(|| {
            let module = VermaModule::new(rat(1, 2), rat(1, 16), 6);
            black_box(module.gram_matrix(6).unwrap())
        })
    });
}

fn sugawara(c: &mut Criterion) {
    let module = AffineModule::universal(int(1), Spin::HALF, 4);
    c.bench_function("sugawara_l_minus2_grade2", |b| {
        b.iter(|| black_box(module.sugawara(-2, 2, 1).unwrap()))
    });
}

fn q_matrix(c: &mut Criterion) {
    let module = VermaModule::new(rat(1, 2), rat(1, 2), 4);
    let rho = AutSeries::from_coeffs(vec![int(0), int(1), rat(1, 3), rat(-2, 5), rat(1, 7)]);
    c.bench_function("q_operator_cutoff4", |b| b.iter(|| black_box(q_operator(&rho, &module).unwrap())));
}

fn monte_carlo(c: &mut Criterion) {
    let mut config = McConfig::new(McTarget::Tensor { k: int(1) }, int(3), rat(1, 2));
    config.samples = 128;
    config.t_end = 0.02;
    config.dt = 0.01;
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("tensor_k1_128_paths", |b| b.iter(|| black_box(mc_simulate(&config).unwrap())));
    group.finish();
}

fn internal_step(c: &mut Criterion) {
    let order = 6;
    let f = SleSeriesState::new(3.0, order).unwrap();
    let start = InternalState::new(order, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    c.bench_function("internal_milstein_step_order6", |b| {
        b.iter(|| {
            let mut state = start.clone();
            internal_process_step(&mut state, &f, 0.5, 1e-3, [0.01, -0.02, 0.005], InternalScheme::Milstein).unwrap();
            black_box(state)
        })
    });
}

criterion_group!(benches, gram, sugawara, q_matrix, monte_carlo, internal_step);
criterion_main!(benches);
