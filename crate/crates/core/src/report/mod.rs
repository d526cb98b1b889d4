//! Command-line reports: configuration, tables, charts and the subcommand bodies.

pub mod commands;
pub mod config;
pub mod svg;
pub mod table;

pub use config::{OutputFormat, RunConfig, CONFIG_ENV};
pub use svg::FigureSeries;
pub use table::{Cell, Table};
