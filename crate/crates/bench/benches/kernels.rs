use criterion::{criterion_group, criterion_main, Criterion};
use ndarray::Array1;

use linnet_core::activation::{Activation, NeuronSet};
use linnet_core::assembly::mass_matrix;
use linnet_core::linalg::svd_lstsq;
use linnet_core::points::circle_grid;
use linnet_core::quadrature::{gauss_legendre, piecewise_tensor_rule, BoxDomain};

fn bench_gauss_rule(c: &mut Criterion) {
    let domain = BoxDomain::cube(-1.0, 1.0, 2).unwrap();
    c.bench_function("piecewise_tensor_rule_100x100_p3", |b| {
        b.iter(|| piecewise_tensor_rule(&domain, 100, 3).unwrap())
    });
    c.bench_function("gauss_legendre_p20", |b| b.iter(|| gauss_legendre(20).unwrap()));
}

fn bench_mass_assembly(c: &mut Criterion) {
    let neurons = NeuronSet::new(Activation::ReluPow(2), circle_grid(128).unwrap()).unwrap();
    let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
    let rule = piecewise_tensor_rule(&domain, 512, 5).unwrap();
    c.bench_function("mass_matrix_1d_n128_2560pts", |b| {
        b.iter(|| mass_matrix(&neurons, &rule).unwrap())
    });
}

fn bench_svd_lstsq(c: &mut Criterion) {
    let neurons = NeuronSet::new(Activation::ReluPow(2), circle_grid(64).unwrap()).unwrap();
    let domain = BoxDomain::cube(-1.0, 1.0, 1).unwrap();
    let rule = piecewise_tensor_rule(&domain, 256, 2).unwrap();
    let phi = linnet_core::activation::eval_values(&neurons, rule.points.view())
        .unwrap()
        .entries;
    let y = Array1::from_shape_fn(phi.nrows(), |i| (i as f64 * 0.01).sin());
    c.bench_function("svd_lstsq_512x64", |b| {
        b.iter(|| svd_lstsq(phi.view(), y.view(), -1.0).unwrap())
    });
}

criterion_group!(benches, bench_gauss_rule, bench_mass_assembly, bench_svd_lstsq);
criterion_main!(benches);
