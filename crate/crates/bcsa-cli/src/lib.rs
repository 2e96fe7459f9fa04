//! Experiment harness around the core library: TOML experiment configs, a
//! canonical CSV results format, parallel pipeline execution, and the
//! regression suite driven by the `bcsa` binary.

pub mod config;
pub mod csvout;
pub mod runner;
pub mod verify;
