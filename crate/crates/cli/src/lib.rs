//! Command-line front end for `witt-residue`: expression parsing, command
//! dispatch and canonical JSON/text reports.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, unparsable
//! expressions or numbers), 2 for every error raised by the library.

pub mod commands;
pub mod expr;
pub mod report;

pub use commands::{run, Outcome, SEED_ENV};
