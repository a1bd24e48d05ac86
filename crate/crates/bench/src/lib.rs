//! Criterion benchmarks for `strata-core`; see `benches/strata.rs`.
