//! File formats, parallel drivers, verification suites and the command line
//! runner built on [`rtm_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod config;
pub mod dataio;
mod error;
pub mod parallel;
pub mod verify;

pub use error::{Error, Result};
