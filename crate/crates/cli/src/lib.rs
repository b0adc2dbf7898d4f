//! Command-line driver for the coverbound engines.

pub mod commands;
pub mod error;
pub mod figures;
pub mod grid;
pub mod output;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "COVERBOUND_THREADS";
