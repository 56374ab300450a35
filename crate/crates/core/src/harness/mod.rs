//! Seeded runs, parameter sweeps, configuration and CSV output.

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{Condition, ConfigOverrides, RunConfig};
pub use output::{emit_edges, emit_summary, emit_trace};
pub use run::run;
pub use sweep::{sweep, sweep_runs, summarize, RunSummary, SweepGrid, SweepRow};
