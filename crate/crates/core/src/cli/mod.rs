//! Scenario files, the experiment runner and the command-line front end.

mod commands;
mod config;
mod run;

pub use commands::{bound_report, execute, mixing_table, run_all, vstar_report, AllArgs, BoundCommand, Cli, Command};
pub use config::{
    shipped_scenario, ArmConfig, BoundName, CouplingConfig, CovarianceConfig, EnvironmentConfig, PolicyConfig,
    ScenarioConfig, DEFAULT_RUNS, DEFAULT_TRACE_RUNS, SHIPPED_SCENARIOS,
};
pub use run::{
    manifest_json, run_scenario, summary_csv, summary_rows, trace_csv, vstar_check, CouplingCheck, RunOverrides,
    ScenarioOutcome, VstarCheck, SUMMARY_HEADER, TRACE_HEADER,
};
