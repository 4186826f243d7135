//! File formats, parallel wrappers and experiment drivers around
//! `motif-forge-core`.

pub mod checkpoint;
mod error;
pub mod experiment;
pub mod io;
pub mod parallel;
pub mod report;

pub use error::{Error, Result};
pub use motif_forge_core as core;
