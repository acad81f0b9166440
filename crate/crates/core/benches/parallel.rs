use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dpw_core::frobenius::{frobenius_value, isotropy_kernel};
use dpw_core::holonomy::{monodromy, OdeConfig};
use dpw_core::potentials::make_xi;
use dpw_core::surface::{generate_frames, DomainGrid, InitialData, SurfaceConfig};
use dpw_core::{CircleGrid, Exec, ZPoint};
use num_complex::Complex64;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_monodromy(c: &mut Criterion) {
    let mut g = c.benchmark_group("monodromy_xi_-1");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    let cc = Complex64::new(1.0, 0.0);
    let xi = make_xi(-1, cc).unwrap();
    let z0 = ZPoint::principal(Complex64::new(1.0, 0.0));
    let grid = CircleGrid::new(64).unwrap();
    let init = move |l: Complex64| frobenius_value(cc, &z0, l);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| monodromy(black_box(&xi), z0, &grid, &init, &OdeConfig::default(), exec).unwrap())
        });
    }
    g.finish();
}

fn bench_surface(c: &mut Criterion) {
    let mut g = c.benchmark_group("frames_smyth_k0_16x16");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    let xi = make_xi(0, Complex64::new(1.0, 0.0)).unwrap();
    let domain = DomainGrid::polar_patch(0.2, 0.8, 0.0, 1.5, 16, 16).unwrap();
    let init = InitialData::identity_at_origin();
    for (name, exec) in MODES {
        let cfg = SurfaceConfig { n_lambda: 32, exec, ..Default::default() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_frames(black_box(&xi), &domain, &init, &cfg).unwrap())
        });
    }
    g.finish();
}

fn bench_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("isotropy_kernel_8x12");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| isotropy_kernel(black_box(Complex64::new(2.0, -1.0)), 8, 12, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_monodromy, bench_surface, bench_kernel);
criterion_main!(benches);
