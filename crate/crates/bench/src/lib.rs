//! Criterion benchmarks for the rapshare kernels live in `benches/`.
