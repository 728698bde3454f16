//! Scenario runner behind the `stimdyn` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;
