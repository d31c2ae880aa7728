//! Criterion benchmarks for qsearch-core live in benches/.
