//! Configuration parsing, unit conversion, command dispatch and output.

pub mod commands;
pub mod config;
pub mod emit;
pub mod units;

pub use commands::{execute, CliError};
pub use config::{parse_config, Command, ConfigError, Document, OutputFormat, RunSpec};
pub use emit::{format_number, to_csv, to_json};

/// Serialises a result table in the format requested by `spec`.
pub fn render(table: &crate::Table, spec: &RunSpec) -> String {
    match spec.format {
        OutputFormat::Csv => to_csv(table),
        OutputFormat::Json => to_json(table, spec),
    }
}
