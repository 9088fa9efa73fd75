//! Library half of the `chaindecay` command-line tool: configuration
//! resolution (flags over config file over defaults) and the command
//! runners that write CSV/JSON artifacts.

pub mod config;
pub mod run;
