use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use num_complex::Complex64;
use rapshare::capacity::{capacity_on, capacity_quadrature};
use rapshare::channels::{sample_states, ScenarioKind, ScenarioSpec};
use rapshare::espar::{basis_decompose, currents, EsparGeometry, ReactiveLoads};
use rapshare::numerics::{bessel_i, ln_bessel_i0, QuadratureSpec, RngStream};
use rapshare::power::{allocate, solve_lambda_on, ConstraintSet, PowerPolicy};
use rapshare::rap::{rap_link_step, PhaseProfiles, RapConfig};

fn special_functions(c: &mut Criterion) {
    c.bench_function("bessel_i0_series", |b| b.iter(|| bessel_i(0, black_box(7.5))));
    c.bench_function("bessel_i1_asymptotic", |b| b.iter(|| bessel_i(1, black_box(250.0))));
    c.bench_function("ln_bessel_i0", |b| b.iter(|| ln_bessel_i0(black_box(1e4))));
}

fn power_allocation(c: &mut Criterion) {
    let scen = ScenarioSpec::reference(ScenarioKind::RicianRician);
    let states = sample_states(&scen, 100_000, &RngStream::new(1, 0));
    let constraints = ConstraintSet::with_rho(1.0, 1.2, scen.pu_power).unwrap();
    let policy = PowerPolicy::new(0.3, constraints).unwrap();
    c.bench_function("allocate_1e5", |b| {
        b.iter(|| states.iter().map(|s| allocate(s, &policy)).sum::<f64>())
    });
    c.bench_function("solve_lambda_1e5", |b| b.iter(|| solve_lambda_on(&states, constraints, 1e-6)));
    c.bench_function("capacity_on_1e5", |b| b.iter(|| capacity_on(&states, &policy)));
}

fn quadrature(c: &mut Criterion) {
    let scen = ScenarioSpec::reference(ScenarioKind::RayleighRayleigh);
    let constraints = ConstraintSet::with_rho(1.0, 1.2, scen.pu_power).unwrap();
    let policy = PowerPolicy::new(0.3, constraints).unwrap();
    let spec = QuadratureSpec::default();
    c.bench_function("capacity_quadrature_rayleigh", |b| {
        b.iter(|| capacity_quadrature(&scen, &policy, &spec))
    });
}

fn precoding(c: &mut Criterion) {
    let scen = ScenarioSpec::reference(ScenarioKind::RicianRician);
    for (m, smart) in [(5, false), (8, true)] {
        let cfg = RapConfig::new(m, m, smart).unwrap();
        let profiles = PhaseProfiles::random(m, m, &mut RngStream::new(2, 0));
        c.bench_function(&format!("rap_link_step_m{m}_smart_{smart}"), |b| {
            b.iter_batched_ref(
                || RngStream::new(3, 0),
                |rng| rap_link_step(&scen, &cfg, &profiles, rng),
                BatchSize::SmallInput,
            )
        });
    }
}

fn espar(c: &mut Criterion) {
    let geometry = EsparGeometry::default_five_element();
    let loads = ReactiveLoads::new(vec![10.0, -10.0, 30.0, -30.0]).unwrap();
    c.bench_function("espar_currents", |b| b.iter(|| currents(&geometry, &loads, Complex64::new(1.0, 0.0))));
    c.bench_function("espar_basis_decompose", |b| b.iter(|| basis_decompose(&geometry)));
}

criterion_group!(kernels, special_functions, power_allocation, quadrature, precoding, espar);
criterion_main!(kernels);
