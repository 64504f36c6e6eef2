//! Benchmarks for the graph coreset pipeline live under `benches/`.
