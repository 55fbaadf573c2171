//! Benchmarks for ortho-subselect live under `benches/`.
