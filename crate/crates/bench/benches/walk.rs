use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ptwalk_core::bulk::{angle_grid, phase_diagram, winding_number};
use ptwalk_core::dynamics::{dft_of, evolve, left_right_spec, EvolveOptions, WalkerState};
use ptwalk_core::spectrum::{eigendecompose, SpectrumOptions};
use ptwalk_core::{build_operator, CoinAngles, CoinProfile, Lattice, WalkKind, WalkSpec};

fn inner_outer(sites: usize) -> WalkSpec {
    WalkSpec::new(
        Lattice::symmetric((sites - 1) / 2),
        CoinProfile::inner_outer(20, CoinAngles::over_pi(0.4, 0.1), CoinAngles::over_pi(-0.6, 0.2)),
        0.1,
        WalkKind::ThreeStep,
    )
}

fn bulk(c: &mut Criterion) {
    c.bench_function("winding_number k=8192", |b| {
        b.iter(|| winding_number(black_box(-0.6 * PI), 0.2 * PI, 0.1, 8192).unwrap())
    });
    let g = angle_grid(11);
    c.bench_function("phase_diagram 11x11 k=1024", |b| b.iter(|| phase_diagram(&g, &g, black_box(0.1), 1024).unwrap()));
}

fn finite(c: &mut Criterion) {
    let spec = inner_outer(801);
    c.bench_function("build_operator 801 sites", |b| b.iter(|| build_operator(black_box(&spec)).unwrap()));
    let small = inner_outer(101);
    let op = build_operator(&small).unwrap();
    c.bench_function("eigendecompose 101 sites", |b| {
        b.iter(|| eigendecompose(black_box(&op), &SpectrumOptions::default()).unwrap())
    });
}

fn dynamics(c: &mut Criterion) {
    let spec =
        left_right_spec(CoinAngles::over_pi(0.75, 0.05), CoinAngles::over_pi(-1.0 / 3.0, 0.0), 0.05, 601).unwrap();
    c.bench_function("evolve 1000 steps", |b| {
        b.iter(|| evolve(black_box(&spec), &WalkerState::standard(), 1000, &EvolveOptions::default()).unwrap())
    });
    let p: Vec<f64> = (0..4001).map(|t| (0.03 * t as f64).cos().powi(2)).collect();
    c.bench_function("dft 4001 samples", |b| b.iter(|| dft_of(black_box(&p))));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bulk, finite, dynamics
}
criterion_main!(benches);
