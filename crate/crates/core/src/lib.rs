//! Exactly solvable dynamics of two coupled spin-1/2 particles driven by
//! engineered, time-dependent longitudinal fields.

pub mod algebra;
pub mod dimer;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod quadrature;
pub mod schedules;
pub mod single_spin;

pub use error::{DimerError, Result};
