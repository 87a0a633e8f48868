//! Criterion benchmarks for the pipeline stages live in `benches/`; run them
//! with `cargo bench -p oodg-bench`.
