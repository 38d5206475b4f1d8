//! Bench support crate; benchmarks live in benches/.
