//! Command-line front end: identity evaluation, monodromy runs, dimension
//! estimates, tracing of the dimension-one locus and SVG plots.

// Negated comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod locus;
pub mod output;
pub mod svg;

pub use commands::{run, Cli, Command};
pub use error::{CliError, CliResult};
