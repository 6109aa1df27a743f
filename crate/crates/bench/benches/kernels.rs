use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lpcontrol::dynamics::rk4_step;
use lpcontrol::mhd2d::ShearEquilibrium;
use lpcontrol::satellite::perturbed_state;
use lpcontrol_bench::{channel, channel_state, satellite};

fn moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobian_moments");
    for n in [8, 16, 24] {
        let model = channel(n);
        let (nu, _) = channel_state(&model);
        let psi = ShearEquilibrium::new(&model.cfg).psi_coeffs(&model.basis);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| model.basis.jacobian_moments(black_box(&psi), black_box(&nu)))
        });
    }
    group.finish();
}

fn channel_field(c: &mut Criterion) {
    let mut group = c.benchmark_group("ida_field_z");
    for n in [8, 16, 24] {
        let model = channel(n);
        let (nu, beta) = channel_state(&model);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| model.system.ida_field_z(black_box(&nu), black_box(&beta)))
        });
    }
    group.finish();
}

fn satellite_step(c: &mut Criterion) {
    let sys = satellite();
    let z = perturbed_state(1e-2);
    c.bench_function("satellite_rk4_step", |b| {
        b.iter(|| rk4_step(&|y| sys.z_field_flat(y), black_box(&z), 1e-3))
    });
}

criterion_group!(kernels, moments, channel_field, satellite_step);
criterion_main!(kernels);
