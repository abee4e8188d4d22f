//! Scenario files and the subcommands that run them.

pub mod commands;
pub mod output;
pub mod scenario;

pub use commands::run;
pub use scenario::{Overrides, Scenario};
