//! Rigid-body transforms between the sensor, the centre of gravity, the
//! runners and the driving direction.
//!
//! Conventions: x forward, y left, z up (right-handed). Slip angles (`alpha`,
//! `beta`) are the heading of the body (or runner) minus the direction of the
//! velocity, so a positive slip angle produces a positive lateral friction
//! force. `delta > 0` steers left. Distances `l_s_f`/`l_s_r` are measured from
//! the speed sensor to the axle along x (`x_axle - x_sensor`).

use nalgebra::{Matrix3, Vector3};

use crate::telemetry::TelemetryFrame;

/// Minimum speed for slip angles to be evaluated [m/s].
pub const V_MIN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MountingOffset {
    /// Sensor position relative to the COG [m].
    pub l_x: f64,
    pub l_y: f64,
    pub l_z: f64,
    /// Signed distance from the speed sensor to the front axle along x [m].
    pub l_s_f: f64,
    /// Signed distance from the speed sensor to the rear axle along x [m].
    pub l_s_r: f64,
}

impl MountingOffset {
    /// Offsets for a sensor at `(l_x, l_y, l_z)` from the COG, with the front
    /// axle `l_f` ahead of and the rear axle `l_r` behind the COG.
    pub fn from_geometry(l_x: f64, l_y: f64, l_z: f64, l_f: f64, l_r: f64) -> Self {
        Self {
            l_x,
            l_y,
            l_z,
            l_s_f: l_f - l_x,
            l_s_r: -l_r - l_x,
        }
    }

    pub fn lever_arm(&self) -> Vector3<f64> {
        Vector3::new(self.l_x, self.l_y, self.l_z)
    }
}

/// Angular accelerations around x, y, z [rad/s²].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AngularAccel {
    pub phi_ddot: f64,
    pub theta_ddot: f64,
    pub psi_ddot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotationAngles {
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
}

impl RotationAngles {
    pub fn front_rotation(&self) -> Matrix3<f64> {
        runner_transform(self.gamma, self.delta)
    }
}

/// The matrix `ω×(ω×·) + ω̇×·` that maps a lever arm to the acceleration
/// difference between two points of a rigid body.
pub fn transfer_matrix(
    phi_dot: f64,
    theta_dot: f64,
    psi_dot: f64,
    acc: &AngularAccel,
) -> Matrix3<f64> {
    let (p, q, r) = (phi_dot, theta_dot, psi_dot);
    let AngularAccel {
        phi_ddot: pd,
        theta_ddot: qd,
        psi_ddot: rd,
    } = *acc;
    Matrix3::new(
        -q * q - r * r,
        p * q - rd,
        p * r + qd,
        p * q + rd,
        -p * p - r * r,
        q * r - pd,
        p * r - qd,
        q * r + pd,
        -p * p - q * q,
    )
}

/// Accelerations at the COG from the accelerations measured at the sensor.
pub fn accel_to_cog(
    frame: &TelemetryFrame,
    acc: &AngularAccel,
    offset: &MountingOffset,
) -> Vector3<f64> {
    let m = transfer_matrix(frame.phi_dot, frame.theta_dot, frame.psi_dot, acc);
    Vector3::new(frame.a_x, frame.a_y, frame.a_z) - m * offset.lever_arm()
}

/// Inverse of [`accel_to_cog`]: what a sensor at `offset` measures.
pub fn accel_at_sensor(
    a_cog: Vector3<f64>,
    rates: (f64, f64, f64),
    acc: &AngularAccel,
    offset: &MountingOffset,
) -> Vector3<f64> {
    a_cog + transfer_matrix(rates.0, rates.1, rates.2, acc) * offset.lever_arm()
}

/// Slip angle at the rear axle; `None` at or below [`V_MIN`].
pub fn slip_angle_rear(alpha_sensor: f64, psi_dot: f64, v: f64, l_s_r: f64) -> Option<f64> {
    (v > V_MIN).then(|| alpha_sensor - psi_dot * l_s_r / v)
}

/// Slip angle at the front axle, including the steering angle.
pub fn slip_angle_front(
    alpha_sensor: f64,
    psi_dot: f64,
    v: f64,
    l_s_f: f64,
    delta: f64,
) -> Option<f64> {
    (v > V_MIN).then(|| alpha_sensor - psi_dot * l_s_f / v + delta)
}

/// Chassis slip angle at the COG for a sensor at `l_x` ahead of it.
pub fn chassis_slip(alpha_sensor: f64, psi_dot: f64, v: f64, l_x: f64) -> Option<f64> {
    (v > V_MIN).then(|| alpha_sensor + psi_dot * l_x / v)
}

/// Rotation by the roll-split angle around x.
pub fn rotation_gamma(gamma: f64) -> Matrix3<f64> {
    let (s, c) = libm::sincos(gamma);
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Steering rotation about the roll-split-tilted steering axis, written out
/// element by element.
pub fn rotation_delta(gamma: f64, delta: f64) -> Matrix3<f64> {
    let (sg, cg) = libm::sincos(gamma);
    let (sd, cd) = libm::sincos(delta);
    let dt = 1.0 - cd;
    Matrix3::new(
        cd,
        -cg * sd,
        -sg * sd,
        cg * sd,
        sg * sg * dt + cd,
        -sg * cg * dt,
        sg * sd,
        -sg * cg * dt,
        cg * cg * dt + cd,
    )
}

/// Orientation of the front runner relative to the unrotated front-axle
/// frame `f0`: roll by `gamma`, then steer by `delta` about the rolled axis.
pub fn rotation_f0_to_f(gamma: f64, delta: f64) -> Matrix3<f64> {
    rotation_delta(gamma, delta) * rotation_gamma(gamma)
}

/// Maps force components in `f0` to components in the runner frame `f`.
/// This is the transpose of the runner orientation.
pub fn runner_transform(gamma: f64, delta: f64) -> Matrix3<f64> {
    rotation_f0_to_f(gamma, delta).transpose()
}

/// Rotation of the z-axis by `beta` into the frame aligned with the driving
/// direction. The x̃ component is the force along the direction of travel.
pub fn driving_frame_matrix(beta: f64) -> Matrix3<f64> {
    let (s, c) = libm::sincos(beta);
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub fn to_driving_frame(force: Vector3<f64>, beta: f64) -> Vector3<f64> {
    driving_frame_matrix(beta) * force
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Rotation3, Unit};

    const EPS: f64 = 1e-12;

    fn frame(phi_dot: f64, theta_dot: f64, psi_dot: f64, a: [f64; 3]) -> TelemetryFrame {
        TelemetryFrame {
            phi_dot,
            theta_dot,
            psi_dot,
            a_x: a[0],
            a_y: a[1],
            a_z: a[2],
            ..Default::default()
        }
    }

    #[test]
    fn zero_rates_or_zero_arm_pass_through() {
        let a = [1.0, -2.0, 9.81];
        let off = MountingOffset {
            l_x: 0.4,
            l_y: -0.1,
            l_z: 0.3,
            ..Default::default()
        };
        let out = accel_to_cog(&frame(0.0, 0.0, 0.0, a), &AngularAccel::default(), &off);
        assert_eq!(out, Vector3::from(a));

        let acc = AngularAccel {
            phi_ddot: 1.0,
            theta_ddot: 2.0,
            psi_ddot: 3.0,
        };
        let out = accel_to_cog(&frame(0.3, 0.2, 0.5, a), &acc, &MountingOffset::default());
        assert_eq!(out, Vector3::from(a));
    }

    #[test]
    fn pure_yaw_rate_lever_arm() {
        // row 1 of the matrix is -(θ̇² + ψ̇²) = -1, so a_cog,x = 0 - (-1)(1) = +1:
        // a sensor ahead of the COG reading zero means the COG accelerates forward.
        let off = MountingOffset {
            l_x: 1.0,
            ..Default::default()
        };
        let out = accel_to_cog(
            &frame(0.0, 0.0, 1.0, [0.0; 3]),
            &AngularAccel::default(),
            &off,
        );
        assert!((out.x - 1.0).abs() < EPS);
        assert_eq!(out.y, 0.0);
        assert_eq!(out.z, 0.0);
    }

    #[test]
    fn transfer_matches_cross_products() {
        let w = Vector3::new(0.2, -0.4, 0.7);
        let wd = Vector3::new(1.5, -0.3, 0.9);
        let l = Vector3::new(0.8, 0.1, -0.25);
        let acc = AngularAccel {
            phi_ddot: wd.x,
            theta_ddot: wd.y,
            psi_ddot: wd.z,
        };
        let m = transfer_matrix(w.x, w.y, w.z, &acc);
        let expected = w.cross(&w.cross(&l)) + wd.cross(&l);
        assert!((m * l - expected).norm() < EPS);
    }

    #[test]
    fn sensor_round_trip() {
        let off = MountingOffset {
            l_x: 0.6,
            l_y: 0.05,
            l_z: 0.2,
            ..Default::default()
        };
        let acc = AngularAccel {
            phi_ddot: 0.1,
            theta_ddot: -0.2,
            psi_ddot: 0.4,
        };
        let a_cog = Vector3::new(-0.3, 2.5, 19.6);
        let s = accel_at_sensor(a_cog, (0.1, -0.5, 0.8), &acc, &off);
        let back = accel_to_cog(&frame(0.1, -0.5, 0.8, [s.x, s.y, s.z]), &acc, &off);
        assert!((back - a_cog).norm() < EPS);
    }

    #[test]
    fn slip_angles() {
        assert_eq!(slip_angle_rear(0.03, 0.0, 20.0, 1.2), Some(0.03));
        assert!((slip_angle_rear(0.0, 0.1, 10.0, 1.0).unwrap() + 0.01).abs() < EPS);
        assert_eq!(slip_angle_rear(0.0, 0.1, 0.0, 1.0), None);
        assert_eq!(slip_angle_rear(0.0, 0.1, V_MIN, 1.0), None);

        assert_eq!(slip_angle_front(0.02, 0.0, 15.0, -1.0, 0.0), Some(0.02));
        assert!((slip_angle_front(0.0, 0.0, 15.0, -1.0, 0.02).unwrap() - 0.02).abs() < EPS);
        assert!((slip_angle_front(0.01, 0.1, 10.0, -1.0, 0.02).unwrap() - 0.04).abs() < EPS);
    }

    #[test]
    fn rotation_special_cases() {
        assert!((rotation_f0_to_f(0.0, 0.0) - Matrix3::identity()).norm() < EPS);
        let d = 0.17;
        let z = Rotation3::from_axis_angle(&Vector3::z_axis(), d).into_inner();
        assert!((rotation_f0_to_f(0.0, d) - z).norm() < EPS);
        assert!((rotation_f0_to_f(0.2, 0.0) - rotation_gamma(0.2)).norm() < EPS);
    }

    #[test]
    fn printed_delta_matrix_is_axis_angle() {
        for &(g, d) in &[(0.1, 0.2), (-0.3, 0.05), (0.25, -0.28), (0.0, 0.0)] {
            let axis = Unit::new_normalize(rotation_gamma(g) * Vector3::z());
            let reference = Rotation3::from_axis_angle(&axis, d).into_inner();
            assert!((rotation_delta(g, d) - reference).norm() < EPS);
        }
    }

    #[test]
    fn driving_frame() {
        let f = Vector3::new(3.0, -4.0, 12.0);
        assert_eq!(to_driving_frame(f, 0.0), f);
        let q = to_driving_frame(Vector3::new(0.0, 1.0, 0.0), core::f64::consts::FRAC_PI_2);
        assert!((q.x + 1.0).abs() < EPS);
        let back = to_driving_frame(to_driving_frame(f, 0.3), -0.3);
        assert!((back - f).norm() < EPS);
        assert!((to_driving_frame(f, 1.1).norm() - f.norm()).abs() < EPS);
    }

    #[test]
    fn offsets_from_geometry_have_opposite_signs() {
        let off = MountingOffset::from_geometry(0.2, 0.0, 0.1, 1.5, 1.3);
        assert!(off.l_s_f > 0.0 && off.l_s_r < 0.0);
        assert!((off.l_s_f - 1.3).abs() < EPS);
        assert!((off.l_s_r + 1.5).abs() < EPS);
    }
}
