//! Shared pieces of the command-line front end: grid parsing and sweep
//! output rendering. The binary in `main.rs` wires these to clap.

pub mod grid;
pub mod report;
