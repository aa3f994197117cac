//! Fairness and tail-drop metrics plus the comparison and capacity-sweep
//! harnesses that emit CSV, JSON and gnuplot reports.

mod harness;
mod metrics;

pub use harness::{
    run_cell, run_comparison, sweep_capacity, within_scale, BenchError, BenchInstance, BenchOptions, BenchRecord,
    BenchReport, CellStatus, CSV_FILE, CSV_HEADER, GNUPLOT_FILE, JSON_FILE, MAX_EXACT_DASHED_EDGES, MAX_LP_ARCS,
};
pub use metrics::{inverse_gini, tail_drop_eval, GiniError, TailDropRow};
