//! Experiment harness: run configurations, single-run and Monte-Carlo
//! drivers, report emission, and the six-row guarantee summary table.

mod config;
mod montecarlo;
mod report_csv;
mod runner;
mod table;

pub use config::{
    derive_seed, selection_from, splitmix64, trial_seed, AlgorithmId, AlgorithmSpec, AuditKind,
    HarnessError, InstanceSource, OutputFormat, RunConfig, SelectorId, TiePolicy, WrapPolicy,
};
pub use montecarlo::{
    monte_carlo_from_csv, monte_carlo_to_csv, run_monte_carlo, AgentMatchStat, ClassPropStat,
    MonteCarloReport, PairEnvyStat, SampleStat,
};
pub use report_csv::{audit_report_from_csv, audit_report_to_csv};
pub use runner::{audit_matching, run_adversary, run_instance, run_once, sweep, SingleRun};
pub use table::{decimal_30, render_table, reproduce_table, table_to_csv, TableRow};
