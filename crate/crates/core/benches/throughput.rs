use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use airspiral::em::{build_pi_model, pi_to_network, SubstrateModel};
use airspiral::explorer::{sweep, ConstraintSet, DesignGrid, EvalSettings};
use airspiral::geometry::{generate_layout, SpiralSpec};
use airspiral::mech::{frame_for, max_impact_force, MechSettings};
use airspiral::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn impact_scan(c: &mut Criterion) {
    let model = frame_for(&SpiralSpec::reference_device(), true, 4).unwrap();
    let mut g = c.benchmark_group("impact_scan");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| max_impact_force(black_box(&model), 1e-6, exec).unwrap()));
    }
    g.finish();
}

fn pi_network(c: &mut Criterion) {
    let spec = SpiralSpec::reference_device();
    let layout = generate_layout(&spec).unwrap();
    let pi = build_pi_model(&spec, &layout, &SubstrateModel::default()).unwrap();
    let freqs: Vec<f64> = (1..=4000).map(|i| i as f64 * 2.5e6).collect();
    let mut g = c.benchmark_group("pi_to_network");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| pi_to_network(black_box(&pi), &freqs, exec).unwrap()));
    }
    g.finish();
}

fn design_sweep(c: &mut Criterion) {
    let mut grid = DesignGrid::new(SpiralSpec::reference_device());
    grid.turns = vec![2, 4, 6, 8];
    grid.xbeam = vec![false, true];
    let settings = EvalSettings {
        mech: MechSettings { elements_per_segment: 2, ..Default::default() },
        ..Default::default()
    };
    let cons = ConstraintSet::default();
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| sweep(black_box(&grid), &cons, &settings, exec)));
    }
    g.finish();
}

criterion_group!(benches, impact_scan, pi_network, design_sweep);
criterion_main!(benches);
