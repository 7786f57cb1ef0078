//! Post-training evaluation: fixed-duration test runs, task-efficiency
//! statistics and occupancy density grids.

pub mod kde;
mod runner;
pub mod stats;

pub use kde::{kde_occupancy, positions_of, scott_bandwidth, KdeGrid};
pub use runner::{evaluate_condition, EvalOptions, EvalOutcome, RunRecord};
pub use stats::{
    cohens_d, compare, mean, one_way_anova, sample_std, summarize, task_efficiency, task_efficiency_from_totals, welch_greater,
    AnovaResult, ConditionSummary, PairComparison, WelchResult,
};
