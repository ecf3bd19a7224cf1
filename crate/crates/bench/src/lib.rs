//! Benchmarks for the transform pipeline; see `benches/`.
pub use puwt_core;
