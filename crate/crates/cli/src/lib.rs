//! Command-line orchestration for `morphoskel`: configuration, subcommands
//! and output files.

pub mod artifacts;
pub mod commands;
pub mod config;
