//! Experiment orchestration: configs, seeded instances, parallel runs and
//! the result files derived from them.

mod config;
mod report;
mod run;

pub use config::{default_grid, Algorithm, ConfigError, ExperimentConfig, PolicySource, ValueSource};
pub use report::{
    compare_budget_definitions, compare_to_optimal, read_csv, success_curve, tree_statistics,
    write_csv, BudgetMeasure, CsvSummary, CurvesFile, GapRow, InstanceRecord, OracleUnavailable,
    SuccessCurve, TreeRow, CSV_HEADER,
};
pub use run::{
    instance_seed, optimal_lengths, prepare, read_records, replay_solved, run_experiment, run_instance,
    write_results, HarnessError, LengthLookup, Prepared,
};
