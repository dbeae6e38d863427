//! Benchmarks for the solver's hot paths live in `benches/solver.rs`; run
//! them with `cargo bench -p sldg-bench`.
