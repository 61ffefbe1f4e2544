//! Std companion to `arpist-core`: SPHERETRI mesh files, the test integrands
//! and the experiment drivers behind the `arpist` command-line tool.

pub mod checks;
pub mod csv;
pub mod experiments;
pub mod io;
pub mod testfns;

pub use arpist_core as core;
