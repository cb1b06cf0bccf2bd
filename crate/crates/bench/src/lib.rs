//! Criterion benchmarks for the ospa-pose metrics live in `benches/`.
//!
//! `cargo bench -p ospa-pose-bench`
