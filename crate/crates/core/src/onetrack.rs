//! One-track model of the bobsled: per-axle forces from the accelerations at
//! the centre of gravity.
//!
//! The front axle carries two frames. `f0` is the front axle expressed in the
//! unrotated body frame; `f` is the runner frame after roll-split and steering.
//! Runner torques are neglected.

use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{Matrix3, Vector3};

use crate::aero::AeroModel;
use crate::friction::{track_radius_y, Axle, LongitudinalLaw};
use crate::kinematics::{
    accel_to_cog, chassis_slip, runner_transform, slip_angle_front, slip_angle_rear, AngularAccel,
    MountingOffset,
};
use crate::telemetry::TelemetryRun;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BobParameters {
    /// Mass including crew [kg].
    pub mass: f64,
    /// Principal moments of inertia [kg·m²].
    pub j_yy: f64,
    pub j_zz: f64,
    /// COG to front / rear axle [m].
    pub l_f: f64,
    pub l_r: f64,
    /// Drag area [m²].
    pub cxax: f64,
    pub offset: MountingOffset,
}

impl BobParameters {
    pub fn wheelbase(&self) -> f64 {
        self.l_f + self.l_r
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.mass, "mass must be positive"),
            (self.j_yy, "J_yy must be positive"),
            (self.j_zz, "J_zz must be positive"),
            (self.l_f, "l_F must be positive"),
            (self.l_r, "l_R must be positive"),
            (self.cxax, "CxAx must be positive"),
        ];
        for (v, msg) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(msg));
            }
        }
        Ok(())
    }
}

/// Lateral forces `(F_y,f0, F_y,r)` from the lateral and yaw balance.
pub fn reconstruct_lateral(
    a_y_cog: f64,
    psi_ddot: f64,
    f_y_ext: f64,
    params: &BobParameters,
) -> (f64, f64) {
    split_axle_pair(
        params.mass * a_y_cog - f_y_ext,
        params.j_zz * psi_ddot,
        params,
    )
}

/// Vertical forces `(F_z,f0, F_z,r)` from the vertical and pitch balance.
pub fn reconstruct_vertical(a_z_cog: f64, theta_ddot: f64, params: &BobParameters) -> (f64, f64) {
    split_axle_pair(params.mass * a_z_cog, params.j_yy * theta_ddot, params)
}

/// Solves `F_f + F_r = total` and `l_F·F_f − l_R·F_r = moment`.
fn split_axle_pair(total: f64, moment: f64, params: &BobParameters) -> (f64, f64) {
    let l = params.wheelbase();
    let front = (params.l_r * total + moment) / l;
    let rear = (params.l_f * total - moment) / l;
    (front, rear)
}

/// Smallest admissible `|A(1,1)|` for recovering `F_x,f0`.
pub const MIN_A11: f64 = 0.5;

/// `F_x,f0` from the prescribed runner-frame longitudinal force and the known
/// lateral and vertical `f0` components. `None` if `|A(1,1)| < 0.5`.
pub fn recover_f_x_f0(f_x_f: f64, f_y_f0: f64, f_z_f0: f64, a: &Matrix3<f64>) -> Option<f64> {
    let a11 = a[(0, 0)];
    (a11.abs() >= MIN_A11).then(|| (f_x_f - a[(0, 1)] * f_y_f0 - a[(0, 2)] * f_z_f0) / a11)
}

pub fn forces_to_runner_frame(f_f0: Vector3<f64>, gamma: f64, delta: f64) -> Vector3<f64> {
    runner_transform(gamma, delta) * f_f0
}

pub fn forces_to_f0_frame(f_f: Vector3<f64>, gamma: f64, delta: f64) -> Vector3<f64> {
    runner_transform(gamma, delta).transpose() * f_f
}

/// Runner-frame longitudinal force `F_x,f = −k·F_z,f` where the runner-frame
/// normal force itself depends on the unknown `F_x,f0`. With `k = μ_x·cos α_f`
/// the coupled system is linear and solved in closed form. `None` if
/// `|A(1,1)| < 0.5`.
pub fn predefine_front_longitudinal(
    k: f64,
    f_y_f0: f64,
    f_z_f0: f64,
    a: &Matrix3<f64>,
) -> Option<f64> {
    let a11 = a[(0, 0)];
    if a11.abs() < MIN_A11 {
        return None;
    }
    let c = a[(0, 1)] * f_y_f0 + a[(0, 2)] * f_z_f0;
    let rhs = -k * (a[(2, 1)] * f_y_f0 + a[(2, 2)] * f_z_f0 - a[(2, 0)] * c / a11);
    Some(rhs / (1.0 + k * a[(2, 0)] / a11))
}

/// Why a sample was excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// Speed at or below the slip-angle validity threshold.
    LowSpeed,
    /// Roll acceleration above the exclusion threshold.
    RollAcceleration,
    /// Roll-split/steering rotation too large to recover `F_x,f0`.
    FrontRotation,
    NonFinite,
}

/// Reconstructed forces at one sample. Forces in N, angles in rad. Fields that
/// could not be computed are NaN and `invalid` says why.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxleSample {
    pub t: f64,
    pub s: f64,
    pub v: f64,
    pub beta: f64,
    pub alpha_f: f64,
    pub alpha_r: f64,
    pub gamma: f64,
    pub delta: f64,
    pub a_y_cog: f64,
    pub a_z_cog: f64,
    pub f_y_ext: f64,
    pub f_x_ext: f64,
    pub f_x_f0: f64,
    pub f_y_f0: f64,
    pub f_z_f0: f64,
    pub f_y_r: f64,
    pub f_z_r: f64,
    pub f_x_f: f64,
    pub f_y_f: f64,
    pub f_z_f: f64,
    /// Rear longitudinal force from the friction law (not reconstructable
    /// from the balance equations).
    pub f_x_r: f64,
    pub invalid: Option<InvalidReason>,
}

impl AxleSample {
    pub fn is_valid(&self) -> bool {
        self.invalid.is_none()
    }

    pub fn front_f0(&self) -> Vector3<f64> {
        Vector3::new(self.f_x_f0, self.f_y_f0, self.f_z_f0)
    }

    pub fn front_f(&self) -> Vector3<f64> {
        Vector3::new(self.f_x_f, self.f_y_f, self.f_z_f)
    }

    pub fn rear(&self) -> Vector3<f64> {
        Vector3::new(self.f_x_r, self.f_y_r, self.f_z_r)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxleForceTrace {
    pub samples: Vec<AxleSample>,
}

impl AxleForceTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn valid(&self) -> impl Iterator<Item = &AxleSample> {
        self.samples.iter().filter(|s| s.is_valid())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Samples with |φ̈| above this value are flagged [rad/s²].
    pub roll_threshold: Option<f64>,
}

/// Roll-acceleration exclusion threshold [°/s²].
pub const ROLL_THRESHOLD_DEG: f64 = 100.0;

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            roll_threshold: Some(ROLL_THRESHOLD_DEG * PI / 180.0),
        }
    }
}

/// Reconstructs the axle forces for every sample of a processed run. Lateral
/// external force is zero; the longitudinal external force is the drag.
pub fn build_axle_trace(
    run: &TelemetryRun,
    params: &BobParameters,
    law: &LongitudinalLaw,
    aero: &AeroModel,
    options: &TraceOptions,
) -> Result<AxleForceTrace> {
    if !run.is_derived() {
        return Err(Error::InvalidParameter(
            "run must be derived before reconstruction",
        ));
    }
    params.validate()?;
    let d = run.derived();
    let off: &MountingOffset = &params.offset;
    let samples = run
        .frames()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let acc = AngularAccel {
                phi_ddot: d.phi_ddot[i],
                theta_ddot: d.theta_ddot[i],
                psi_ddot: d.psi_ddot[i],
            };
            let a_cog = accel_to_cog(f, &acc, off);
            let (f_z_f0, f_z_r) = reconstruct_vertical(a_cog.z, acc.theta_ddot, params);
            let f_y_ext = 0.0;
            let (f_y_f0, f_y_r) = reconstruct_lateral(a_cog.y, acc.psi_ddot, f_y_ext, params);

            let mut sample = AxleSample {
                t: f.t,
                s: d.s[i],
                v: f.v,
                beta: f64::NAN,
                alpha_f: f64::NAN,
                alpha_r: f64::NAN,
                gamma: f.gamma,
                delta: f.delta,
                a_y_cog: a_cog.y,
                a_z_cog: a_cog.z,
                f_y_ext,
                f_x_ext: f64::NAN,
                f_x_f0: f64::NAN,
                f_y_f0,
                f_z_f0,
                f_y_r,
                f_z_r,
                f_x_f: f64::NAN,
                f_y_f: f64::NAN,
                f_z_f: f64::NAN,
                f_x_r: f64::NAN,
                invalid: None,
            };

            let (Some(alpha_f), Some(alpha_r), Some(beta)) = (
                slip_angle_front(f.alpha_sensor, f.psi_dot, f.v, off.l_s_f, f.delta),
                slip_angle_rear(f.alpha_sensor, f.psi_dot, f.v, off.l_s_r),
                chassis_slip(f.alpha_sensor, f.psi_dot, f.v, off.l_x),
            ) else {
                sample.invalid = Some(InvalidReason::LowSpeed);
                return sample;
            };
            sample.alpha_f = alpha_f;
            sample.alpha_r = alpha_r;
            sample.beta = beta;
            sample.f_x_ext = -aero.aero_forces(f.v, beta).actual;

            let radius = track_radius_y(f.v, f.theta_dot);
            let mu_f = law.mu(Axle::Front, f_z_f0, radius);
            let mu_r = law.mu(Axle::Rear, f_z_r, radius);
            sample.f_x_r = -mu_r * f_z_r * libm::cos(alpha_r);

            let a = runner_transform(f.gamma, f.delta);
            let Some(f_x_f) =
                predefine_front_longitudinal(mu_f * libm::cos(alpha_f), f_y_f0, f_z_f0, &a)
            else {
                sample.invalid = Some(InvalidReason::FrontRotation);
                return sample;
            };
            // A(1,1) was checked by predefine_front_longitudinal
            let f_x_f0 = recover_f_x_f0(f_x_f, f_y_f0, f_z_f0, &a).unwrap_or(f64::NAN);
            let runner = a * Vector3::new(f_x_f0, f_y_f0, f_z_f0);
            sample.f_x_f0 = f_x_f0;
            sample.f_x_f = runner.x;
            sample.f_y_f = runner.y;
            sample.f_z_f = runner.z;

            if let Some(limit) = options.roll_threshold {
                if acc.phi_ddot.abs() > limit {
                    sample.invalid = Some(InvalidReason::RollAcceleration);
                }
            }
            if sample.invalid.is_none()
                && !(runner.iter().all(|v| v.is_finite()) && f_y_r.is_finite())
            {
                sample.invalid = Some(InvalidReason::NonFinite);
            }
            sample
        })
        .collect();
    Ok(AxleForceTrace { samples })
}
