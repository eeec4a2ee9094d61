use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tracker_bench::{bench_panel, bench_problem};
use tracker_core::{build_market_graph, solve_anneal, solve_exhaustive, AnnealConfig};

fn graph_build(c: &mut Criterion) {
    let panel = bench_panel(200);
    c.bench_function("market_graph/n200", |b| {
        b.iter(|| build_market_graph(black_box(&panel)).unwrap())
    });
}

fn energy_evaluation(c: &mut Criterion) {
    let problem = bench_problem(453, 10);
    let z: Vec<u8> = (0..problem.n()).map(|i| (i % 45 == 0) as u8).collect();
    c.bench_function("energy/n453", |b| {
        b.iter(|| problem.energy(black_box(&z)).unwrap())
    });
    c.bench_function("delta_energy/n453", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..problem.n() {
                acc += problem.delta_energy(black_box(&z), i).unwrap();
            }
            acc
        })
    });
}

fn annealing(c: &mut Criterion) {
    let problem = bench_problem(453, 10);
    let config = AnnealConfig {
        sweeps: 50,
        restarts: 1,
        seed: 3,
        ..Default::default()
    };
    c.bench_function("anneal/n453_50sweeps", |b| {
        b.iter(|| solve_anneal(black_box(&problem), black_box(&config)).unwrap())
    });
}

fn exhaustive(c: &mut Criterion) {
    let problem = bench_problem(15, 3);
    c.bench_function("exhaustive/n15", |b| {
        b.iter(|| solve_exhaustive(black_box(&problem)).unwrap())
    });
}

criterion_group!(
    benches,
    graph_build,
    energy_evaluation,
    annealing,
    exhaustive
);
criterion_main!(benches);
