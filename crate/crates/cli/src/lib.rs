//! Std companion to `multitok-core`: corpus, dictionary, remap, loss and
//! report file formats, run manifests, and the `multitok` command line.

pub mod commands;
pub mod formats;
pub mod manifest;

pub use commands::{run, Cli, Command};

/// Exit status for a failed run: 1 for usage errors, 2 for data errors.
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
