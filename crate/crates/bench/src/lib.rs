//! Criterion benchmarks for `ocb-core`; see `benches/`.
