//! Criterion benchmarks for the ring-dynamics laboratory.
//!
//! This crate carries no library code of its own; the benchmarks under
//! `benches/` exercise the public API of `ringflux` — single-step updates,
//! cycle detection, observable extraction, and the exhaustive lab pipelines.
//! Run them with `cargo bench -p ringflux-bench`.
