//! Configuration-driven runner for the built-in experiments and user-defined
//! problems of `mcrelax`: material interface, air shock tube, sphere and double cone.

pub mod cases;
pub mod cli;
pub mod config;
pub mod exact;
pub mod run;
pub mod setup;

pub use cli::run_cli;
