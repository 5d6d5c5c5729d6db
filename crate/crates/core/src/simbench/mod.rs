//! Simulation models, the Spearman metric and the Monte Carlo harness.

mod harness;
mod models;
mod report;
mod spearman;

pub use harness::{
    parse_cells, replication_rng, run_cell, run_cells, CellResult, CellSpec, MethodSummary, SimConfig, TuningMode,
};
pub use models::{gen_response, gen_scenario, Model, Scenario, NOISE_SD};
pub use report::{read_report_csv, render_text_table, write_report_csv, ReportRow, CSV_HEADER};
pub use spearman::{average_ranks, spearman};
