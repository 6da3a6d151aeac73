//! Command-line front end for the spin-dimer library.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod verify;

pub use error::{CliError, CliResult};
