//! Experiment orchestration: cross-validation, benchmark tables, the n-gram
//! sweep and report files.

mod config;
mod cv;
mod report;

pub use config::{Algorithm, DatasetSpec, ExperimentConfig};
pub use cv::{
    algorithm_seed, bench_table, compute_order, fit_algorithm, fold_seed, run_bench_on, run_cv,
    run_cv_on, run_nsweep_on, CellResult, Fitted, FoldResult, RunReport, SweepRow,
    REPORT_FORMAT_VERSION,
};
pub use report::{
    bench_csv, bench_json, order_report, orders_json, sweep_csv, timing_csv, timing_json,
    write_bench_outputs, write_sweep_outputs, OrderRequest,
};
