use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use efimov_core::efimov::{lossy_energy, solve_channel_exponent, ModelParams};
use efimov_core::hyperradial::{
    log_spaced, radial_wavefunction_with, scan_states_with, SolverConfig,
};
use efimov_core::verify::{self, Level};
use efimov_core::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn spectrum_scan(c: &mut Criterion) {
    let s = solve_channel_exponent(1e-13).unwrap();
    let params = ModelParams::new(0.5, 1.0).unwrap();
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("scan_states n=-3..3");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| scan_states_with(exec, -3, 3, &params, &s, &cfg).unwrap())
        });
    }
    group.finish();
}

fn wavefunction_grid(c: &mut Criterion) {
    let s = solve_channel_exponent(1e-13).unwrap();
    let energy = lossy_energy(0, &ModelParams::new(0.5, 1.0).unwrap(), &s).unwrap();
    let radii = log_spaced(1e-3, 40.0, 4000);
    let mut group = c.benchmark_group("radial_wavefunction 4000 points");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| radial_wavefunction_with(exec, energy, &radii, &s).unwrap())
        });
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify full");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| verify::run_with(exec, Level::Full).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectrum_scan, wavefunction_grid, verification);
criterion_main!(benches);
