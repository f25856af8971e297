use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pmdnav_bench::{city, city_subnetwork, grid, heavy_street};
use pmdnav_core::centrality::edge_betweenness;
use pmdnav_core::router::{astar, dijkstra, prepare_query, search_prepared, RouteQuery};

fn betweenness(c: &mut Criterion) {
    let mut group = c.benchmark_group("edge_betweenness");
    group.sample_size(10);
    for side in [10, 20, 30] {
        let g = grid(side);
        group.bench_with_input(BenchmarkId::from_parameter(side * side), &g, |b, g| {
            b.iter(|| edge_betweenness(black_box(g)))
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let (g, zones) = city();
    let sub = city_subnetwork(&g);
    let q = RouteQuery::new("r15c15", "r45c40");
    let prepared = prepare_query(&g, &zones, &q, None).unwrap();
    let w = prepared.weighting.weights.values();
    let mut group = c.benchmark_group("query");
    group.bench_function("astar", |b| b.iter(|| astar(&sub.graph, sub.origin, sub.destination, |e| w[e])));
    group.bench_function("dijkstra", |b| b.iter(|| dijkstra(&sub.graph, sub.origin, sub.destination, |e| w[e])));
    group.bench_function("search_prepared", |b| b.iter(|| search_prepared(&g, black_box(&prepared))));
    group.finish();
}

fn sfm_step(c: &mut Criterion) {
    let world = heavy_street();
    c.bench_function("sfm_step/street_heavy", |b| {
        b.iter_batched(|| world.clone(), |mut w| w.step(), criterion::BatchSize::SmallInput)
    });
}

criterion_group!(benches, betweenness, search, sfm_step);
criterion_main!(benches);
