//! The `dct` command-line front end.

mod args;
mod commands;

pub use args::{Cli, Command, DetectOpts, ExtractOpts};
pub use commands::{run, BundleManifest, Failure, Status};
