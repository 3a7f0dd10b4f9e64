//! Pipeline front end for `popgrowth-core`: TOML configuration, CSV
//! ingestion, the staged end-to-end run and report emission.

pub mod config;
pub mod ingest;
pub mod pipeline;
pub mod render;
pub mod report;

pub use config::{Config, ConfigError, Format};
pub use ingest::{ingest_csv, IngestError, YearRange};
pub use pipeline::{run_pipeline, PipelineError, Scope};
pub use report::{emit_report, Report};
