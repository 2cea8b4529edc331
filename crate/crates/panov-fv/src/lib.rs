//! Files, command line and parallel drivers around [`panov_fv_core`].
//!
//! - [`config`]: JSON run manifests with flag overrides
//! - [`io`]: solution CSV, `report.json`, convergence tables
//! - [`convergence`]: mesh levels solved on worker threads
//! - [`invariants`]: the seeded randomized property suite
//! - [`commands`]: the three subcommands of the `panov-fv` binary

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod convergence;
pub mod error;
pub mod invariants;
pub mod io;

pub use error::CliError;
