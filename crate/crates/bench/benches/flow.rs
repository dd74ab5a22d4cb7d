use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C;
use rgflow::{
    alpha_of_t, boundary_curve, eval_v, fixed_points, solve_pbar, t_star, theta_prime_n, u_of_x,
    zero_density, FlowParams,
};

fn scalar(c: &mut Criterion) {
    let params = FlowParams::critical(2.0).unwrap();
    let eta = C::new(-1.3, 0.4);
    c.bench_function("eval_v complex", |b| {
        b.iter(|| eval_v(&params, black_box(eta)))
    });
    c.bench_function("theta_prime_n N=200", |b| {
        b.iter(|| theta_prime_n(200, black_box(C::new(0.1, 0.05)), 4.0))
    });
}

fn inversion(c: &mut Criterion) {
    let params = FlowParams::critical(2.0).unwrap();
    c.bench_function("solve_pbar real", |b| {
        b.iter(|| solve_pbar(&params, black_box(C::new(0.2, 0.0)), 1e-10))
    });
    c.bench_function("solve_pbar complex", |b| {
        b.iter(|| solve_pbar(&params, black_box(C::new(0.2, 0.3)), 1e-10))
    });
    c.bench_function("u_of_x", |b| {
        b.iter(|| u_of_x(&params, black_box(C::new(0.5, 0.0)), 1e-10))
    });
}

fn geometry(c: &mut Criterion) {
    c.bench_function("alpha_of_t", |b| b.iter(|| alpha_of_t(black_box(3.0))));
    c.bench_function("boundary_curve 256", |b| {
        b.iter(|| boundary_curve(black_box(1.0), 256))
    });
    c.bench_function("zero_density 256", |b| {
        b.iter(|| zero_density(black_box(1.0), 256))
    });
    c.bench_function("fixed_points t=3", |b| {
        b.iter(|| fixed_points(black_box(3.0)))
    });
    let mut slow = c.benchmark_group("slow");
    slow.sample_size(10);
    slow.bench_function("t_star", |b| b.iter(|| t_star(black_box(1e-8))));
    slow.finish();
}

criterion_group!(benches, scalar, inversion, geometry);
criterion_main!(benches);
