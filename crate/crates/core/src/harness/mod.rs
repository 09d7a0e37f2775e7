//! Round-trip verification and brute-force scaling benchmarks.

mod bench;
mod verify;

pub use bench::{
    cmd_bench, least_squares_slope, write_bench_csv, BenchOptions, BenchRecord, BENCH_CSV_HEADER,
    BENCH_SAT_CLAUSES,
};
pub use verify::{cmd_verify, Disagreement, Family, VerifyOptions, VerifyReport};
