//! Benchmarks of the hot paths: jet evaluation, brackets, implicit steps
//! and the seeded involution sweep.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use liftlab_core::dynamics::{IntegrateOptions, Method};
use liftlab_core::tolerances::{DEFAULT_MARGIN, DEFAULT_SEED};
use liftlab_core::{
    build_system, default_spec, grad_phase, integrate, involution_matrix, poisson_bracket,
    sample_points, ChartId, Family, PhasePoint, Tier,
};

fn bench_engine(c: &mut Criterion) {
    let sys = build_system(&default_spec(Family::D, Tier::PdmPotential)).unwrap();
    let z = sample_points(&sys, 1, DEFAULT_SEED, DEFAULT_MARGIN).unwrap()[0];
    let h = sys.hamiltonian();
    let sep_tau = sys.observable("sep_tau").unwrap();

    c.bench_function("grad_phase pdm-potential H", |b| {
        b.iter(|| grad_phase(black_box(h), black_box(&z), DEFAULT_MARGIN).unwrap())
    });

    c.bench_function("poisson_bracket chart-native pair", |b| {
        b.iter(|| poisson_bracket(black_box(sep_tau), black_box(h), &z, DEFAULT_MARGIN).unwrap())
    });

    let geo = build_system(&default_spec(Family::A, Tier::Geodesic3D)).unwrap();
    let z0 = PhasePoint::new(ChartId::Cartesian3, &[1.0, 0.85, 0.0], &[0.1, 0.08, 0.25]).unwrap();
    c.bench_function("implicit midpoint 1000 steps", |b| {
        b.iter(|| {
            let opts = IntegrateOptions::new(1e-3, 1.0, Method::ImplicitMidpoint);
            integrate(geo.hamiltonian(), black_box(&z0), &opts).unwrap()
        })
    });

    c.bench_function("involution matrix 50 samples", |b| {
        b.iter(|| involution_matrix(black_box(&geo), 50, DEFAULT_SEED).unwrap())
    });
}

criterion_group!(benches, bench_engine);
criterion_main!(benches);
