//! File formats and command-line front end for [`efic_core`].
//!
//! * [`document`]: JSON instance documents.
//! * [`report`]: JSON and CSV views of reports, payment tables and frontiers.
//! * [`dot`]: Graphviz export of constraint graphs.
//! * [`cli`]: the `efic` binary's argument handling and subcommands.

pub mod cli;
pub mod document;
pub mod dot;
pub mod report;

pub use document::{instance_to_json, parse_instance, FormatError};
