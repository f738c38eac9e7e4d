//! Command line front end for the `coherent-transport` toolkit.

pub mod cli;
pub mod commands;
pub mod config;
pub mod convert;
pub mod error;
pub mod format;
pub mod qsl_table;
pub mod scan;

pub use error::CliError;
