//! Benchmark-only crate; the Criterion suites live under `benches/`.
