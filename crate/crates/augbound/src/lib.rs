//! IO, experiments and the command line on top of `augbound-core`.
//!
//! - [`idx`]: IDX image and label files.
//! - [`config`]: the JSON configuration and dotted-path overrides.
//! - [`cache`]: FNV-1a keyed result cache.
//! - [`suite`], [`sweep`], [`image`], [`diameter`], [`selftest`]: the entry points
//!   behind each subcommand.
//! - [`cli`]: argument parsing and dispatch.

pub mod cache;
pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod diameter;
pub mod error;
pub mod idx;
pub mod image;
mod plot;
pub mod selftest;
pub mod suite;
pub mod sweep;

pub use error::{AppError, AppResult};
