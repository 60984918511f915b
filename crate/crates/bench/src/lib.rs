//! Criterion benchmarks for graphcx-core live in `benches/`.
