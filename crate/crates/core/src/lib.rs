//! Runner-ice friction models and one-track vehicle dynamics for bobsleds.
//!
//! The crate covers the whole analysis chain from sampled telemetry to
//! driver evaluation:
//!
//! - [`telemetry`]: zero-phase filtering, resampling and differentiation of runs
//! - [`kinematics`]: sensor-to-COG transfer, axle slip angles, runner rotations
//! - [`friction`]: longitudinal (pressure dependent) and lateral (Magic-Formula
//!   style) friction laws, plus the pressure lookup used in simulation
//! - [`onetrack`]: per-axle force reconstruction from COG accelerations
//! - [`icehouse`]: energy-method friction extraction from straight glide runs
//! - [`fitting`]: damped Gauss-Newton estimation of lateral friction parameters
//! - [`aero`]: yaw-sensitive drag
//! - [`evaluation`]: relative loss-energy metrics, angle statistics and RMSE
//! - [`sim`]: forward one-track simulator used as a synthetic ground truth
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line tool live in the `bobsled` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod aero;
pub mod error;
pub mod evaluation;
pub mod fitting;
pub mod friction;
pub mod icehouse;
pub mod kinematics;
pub mod numeric;
pub mod onetrack;
pub mod sim;
pub mod telemetry;

pub use error::{Error, Result};

/// Gravitational acceleration used throughout [m/s²].
pub const G: f64 = 9.81;
