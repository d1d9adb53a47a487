//! File formats, job configuration and the `sispace` command-line driver on
//! top of `sispace-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use cli::{execute, run, Args, EXIT_INPUT, EXIT_INVARIANT, EXIT_OK};
pub use config::{demo_config, load_job, Command, Job, JobConfig};
pub use error::CliError;
