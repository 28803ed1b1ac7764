//! File formats, corpus directories and parallel experiment drivers built on
//! [`qroute_core`], plus the plumbing behind the `qroute` command-line tool.

pub mod corpus;
pub mod error;
pub mod io;
pub mod studies;

pub use error::{Error, Result};
pub use qroute_core as core;
