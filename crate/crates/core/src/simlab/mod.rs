//! Experiment orchestration: parameter grids, seeded Monte Carlo sweeps,
//! the exact small-instance oracle and CSV output.
//!
//! Every trial draws its randomness from `derive_seed(master, [grid, trial])`
//! and rows are aggregated in trial order, so output bytes do not depend on
//! the number of worker threads.

mod oracle;
mod run;
mod spec;

pub use oracle::{exact_small_oracle, OracleResult, ORACLE_CAP};
pub use run::{
    binomial_half_width, draw_binary_pair, emit_region_csv, grid_codebook_seeds, metric_columns, run_experiment,
    to_csv_string, trial_codebook_seeds, trial_seed, write_csv, write_region_csv, RegionRow, RunOptions, SummaryRow,
};
pub use spec::{
    Axis, ExperimentSpec, GridPoint, GridValue, Mode, ParamDefault, ParamKind, ParamSpec, DEFAULT_TCQ_G0,
    DEFAULT_TCQ_G1,
};
