//! Criterion benchmarks for the flow, inversion and geometry routines; run with `cargo bench -p rgflow-bench`.
