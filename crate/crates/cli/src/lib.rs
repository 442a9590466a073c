//! Batch driver for the q-Onsager verification library: configuration,
//! suite execution and report formatting.

pub mod config;
pub mod format;
pub mod run;

pub use config::RunConfig;
pub use format::{report_format, report_value, Format};
pub use run::{run, Command, RunReport};
