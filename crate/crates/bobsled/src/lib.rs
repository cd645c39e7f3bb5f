//! File formats, configuration and command implementations around
//! [`bobsled_core`].
//!
//! Every command builds its outputs in memory first and only then writes them,
//! so a failing run leaves no partial files behind.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod glide;
pub mod meta;
pub mod params;
pub mod pressure;
pub mod provenance;
pub mod report;
pub mod scenario;
pub mod schema;
pub mod telemetry_csv;
pub mod trace_csv;

pub use error::{Error, Result};
