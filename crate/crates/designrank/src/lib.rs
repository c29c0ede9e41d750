//! File formats, JSON records, parallel drivers and the command line for
//! `designrank-core`.

pub mod cli;
pub mod engine;
pub mod error;
pub mod formats;
pub mod record;

pub use error::{CliError, Result};
