//! Command-line front end for the bilocal-inequality toolkit: evaluation of
//! measurement strategies on Werner pairs, `S'` maximization with the
//! particle-swarm optimizer, the audit of the bundled reference strategy,
//! and the (p, q) classification scan. All numeric output is printed with a
//! fixed number of significant digits so identical invocations produce
//! byte-identical files.

pub mod commands;
pub mod error;
pub mod formats;
pub mod output;

pub use error::CliError;
