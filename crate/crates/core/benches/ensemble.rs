use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use controlled_echo::dynamics::{build_hamiltonian, build_liouvillian, IntervalPropagator, DEFAULT_SAMPLE_DT};
use controlled_echo::ensemble::{simulate_ensemble_with, EnsembleOptions, EnsembleSpec, ExecutionMode};
use controlled_echo::protocols::{controlled_echo_protocol, wavelength_convert_protocol, AccessMode};

fn ensemble_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    let protocols = [
        ("fig1", controlled_echo_protocol(AccessMode::CounterIntuitive)),
        ("fig3", wavelength_convert_protocol(AccessMode::CounterIntuitive)),
    ];
    let spec = EnsembleSpec::default();
    for (name, protocol) in &protocols {
        for (mode_name, execution) in [("sequential", ExecutionMode::Sequential), ("parallel", ExecutionMode::Parallel)] {
            let options = EnsembleOptions {
                execution,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(*name, mode_name), &options, |b, opts| {
                b.iter(|| simulate_ensemble_with(black_box(protocol), &spec, DEFAULT_SAMPLE_DT, *opts).unwrap())
            });
        }
    }
    group.finish();
}

fn propagator(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagator");
    let protocols = [
        (3, controlled_echo_protocol(AccessMode::CounterIntuitive)),
        (4, wavelength_convert_protocol(AccessMode::CounterIntuitive)),
    ];
    for (levels, p) in &protocols {
        let data_pulse: Vec<_> = p.pulses().iter().take(1).collect();
        let h = build_hamiltonian(&p.scheme, &data_pulse, 0.05).unwrap();
        let l = build_liouvillian(&h, &p.decay).unwrap();
        group.bench_function(BenchmarkId::new("expm", levels), |b| {
            b.iter(|| IntervalPropagator::new(black_box(&l), DEFAULT_SAMPLE_DT).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ensemble_modes, propagator);
criterion_main!(benches);
