//! Criterion benchmarks for the field, construction and verification kernels;
//! see `benches/kernels.rs`.
