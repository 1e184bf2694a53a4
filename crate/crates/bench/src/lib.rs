//! Criterion benchmarks for `concordance-core`; see `benches/`.
