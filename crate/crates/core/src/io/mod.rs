//! Output formats (legacy VTK, CSV, summary tables), run configuration and
//! the driver behind the command-line tool.

mod config;
mod run;
mod tables;
mod vtk;

pub use config::{parse_config, read_config, RunConfig};
pub use run::{check_assumptions, compare_estimators, run, verify_identity, AssumptionSummary, IdentityRow};
pub use tables::{
    format_summary, parse_history_csv, parse_indicator_csv, parse_summary, summary_row, write_history_csv,
    write_indicator_csv, HistoryRow, IndicatorRow, SummaryRow,
};
pub use vtk::{export_vtk, format_vtk, parse_vtk, VtkData};
