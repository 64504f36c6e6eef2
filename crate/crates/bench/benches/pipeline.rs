use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graph_coreset::graph::synth::road_grid;
use graph_coreset::{
    build_coreset, local_search, multi_source_dijkstra, BicriteriaConfig, CandidatePool,
    LocalSearchConfig, WeightedPointSet,
};

fn dijkstra(c: &mut Criterion) {
    let mut group = c.benchmark_group("dijkstra");
    for side in [50usize, 100, 200] {
        let g = road_grid(side, side, 1);
        let sources = [(0, 0.0), (side * side / 2, 0.0), (side * side - 1, 0.0)];
        group.bench_with_input(BenchmarkId::from_parameter(side), &g, |b, g| {
            b.iter(|| multi_source_dijkstra(g, &sources).unwrap())
        });
    }
    group.finish();
}

fn local_search_grid(c: &mut Criterion) {
    let g = road_grid(20, 20, 2);
    let x = WeightedPointSet::unit((0..400).step_by(3)).unwrap();
    let pool = CandidatePool::Restricted(x.support());
    let cfg = LocalSearchConfig::default();
    c.bench_function("local_search/20x20/k5", |b| {
        b.iter(|| local_search(&g, &x, 5, &pool, &cfg, 7).unwrap())
    });
}

fn coreset(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_coreset");
    group.sample_size(10);
    for side in [30usize, 60] {
        let g = road_grid(side, side, 3);
        let x = WeightedPointSet::unit(0..side * side).unwrap();
        let cfg = BicriteriaConfig::default();
        group.bench_with_input(BenchmarkId::from_parameter(side), &g, |b, g| {
            b.iter(|| build_coreset(g, &x, 5, 200, &cfg, 5.0, 11).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dijkstra, local_search_grid, coreset);
criterion_main!(benches);
