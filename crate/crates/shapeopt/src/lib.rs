//! Configuration, artifact formats and the command line around
//! `shapeopt-core`.
//!
//! | module | contents |
//! |--------|----------|
//! | [`config`] | TOML experiment configuration, defaults echo, config hash |
//! | [`checkpoint`] | network checkpoints (JSON, bit-exact round trip) |
//! | [`csvio`] | point clouds, level-set grids and Hadamard densities as CSV |
//! | [`contour`] | marching squares, region counting, SVG rendering |
//! | [`history`] | JSON-lines run history |
//! | [`runner`] | executing a configured run and writing its artifacts |
//! | [`selftest`] | oracle checks without configuration |
//! | [`cli`] | subcommands |

pub mod atomic;
pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod contour;
pub mod csvio;
pub mod error;
pub mod history;
pub mod meta;
pub mod runner;
pub mod selftest;

pub use error::{CliError, CliResult};
