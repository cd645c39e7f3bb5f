//! Forward one-track simulator.
//!
//! The sled moves along a planar path. Banking is folded into a normal-load
//! factor `n(s)`, the path slope drives the speed equation and the pitch
//! curvature sets the pitch rate. Runner forces come from the friction laws,
//! so a simulated run carries exact ground truth for reconstruction, fitting
//! and evaluation.
//!
//! State: distance `s`, speed `v`, chassis slip `β`, yaw rate `ψ̇`, altitude
//! `h` and the dissipated energy. Integration is classical fourth-order
//! Runge-Kutta at a fixed step.

use alloc::vec::Vec;
use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::aero::{drag_force, AeroModel, AirState};
use crate::friction::{track_radius_y, Axle, LateralModel, LongitudinalLaw};
use crate::icehouse::{Direction, GlideRun};
use crate::kinematics::{accel_at_sensor, runner_transform, AngularAccel};
use crate::onetrack::{reconstruct_vertical, AxleForceTrace, AxleSample, BobParameters};
use crate::telemetry::{RunMeta, TelemetryFrame, TelemetryRun};
use crate::{Error, Result, G};

/// One breakpoint of the track profile.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackPoint {
    /// Distance along the track [m].
    pub s: f64,
    /// Slope, positive downhill [rad].
    pub kappa: f64,
    /// Pitch curvature `1/r_y` [1/m].
    pub curvature_y: f64,
    /// Normal load in multiples of g.
    pub load_factor: f64,
}

/// Piecewise-linear track description over distance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackProfile {
    points: Vec<TrackPoint>,
}

impl TrackProfile {
    pub fn new(points: Vec<TrackPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::MalformedTable("track profile has no breakpoints"));
        }
        if !points.windows(2).all(|w| w[1].s > w[0].s) {
            return Err(Error::MalformedTable(
                "track breakpoints must increase in s",
            ));
        }
        for p in &points {
            if !(p.load_factor >= 1.0) {
                return Err(Error::InvalidParameter("load factor must be at least 1"));
            }
            if ![p.s, p.kappa, p.curvature_y].iter().all(|v| v.is_finite()) {
                return Err(Error::MalformedTable("non-finite track value"));
            }
        }
        Ok(Self { points })
    }

    /// Straight section with constant slope and no banking.
    pub fn straight(length: f64, kappa: f64) -> Self {
        let p = |s| TrackPoint {
            s,
            kappa,
            curvature_y: 0.0,
            load_factor: 1.0,
        };
        Self {
            points: alloc::vec![p(0.0), p(length)],
        }
    }

    pub fn points(&self) -> &[TrackPoint] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.points[self.points.len() - 1].s
    }

    /// Profile values at `s`, clamped outside the breakpoints.
    pub fn at(&self, s: f64) -> TrackPoint {
        let (a, b, w) = bracket(&self.points, s, |p| p.s);
        let mix = |f: fn(&TrackPoint) -> f64| f(a) + w * (f(b) - f(a));
        TrackPoint {
            s,
            kappa: mix(|p| p.kappa),
            curvature_y: mix(|p| p.curvature_y),
            load_factor: mix(|p| p.load_factor),
        }
    }

    /// `d(1/r_y)/ds` on the segment containing `s`.
    pub fn curvature_slope(&self, s: f64) -> f64 {
        let pts = &self.points;
        if pts.len() < 2 || s < pts[0].s || s >= pts[pts.len() - 1].s {
            return 0.0;
        }
        let hi = pts.partition_point(|p| p.s <= s).min(pts.len() - 1);
        let (a, b) = (pts[hi - 1], pts[hi]);
        (b.curvature_y - a.curvature_y) / (b.s - a.s)
    }
}

/// Steering and roll-split inputs at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ControlPoint {
    pub t: f64,
    pub delta: f64,
    pub gamma: f64,
}

/// Piecewise-linear control inputs over time.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlTrace {
    points: Vec<ControlPoint>,
}

impl ControlTrace {
    pub fn new(points: Vec<ControlPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::MalformedTable("control trace has no breakpoints"));
        }
        if !points.windows(2).all(|w| w[1].t > w[0].t) {
            return Err(Error::MalformedTable(
                "control breakpoints must increase in t",
            ));
        }
        let limit = core::f64::consts::FRAC_PI_4;
        if points
            .iter()
            .any(|p| !(p.delta.abs() < limit && p.gamma.abs() < limit))
        {
            return Err(Error::InvalidParameter(
                "control angles must stay below 45°",
            ));
        }
        Ok(Self { points })
    }

    /// No steering, no roll-split.
    pub fn neutral() -> Self {
        Self {
            points: alloc::vec![ControlPoint {
                t: 0.0,
                delta: 0.0,
                gamma: 0.0
            }],
        }
    }

    /// Steering jumps from zero to `delta` at `t_step` over a ramp of
    /// `ramp` seconds.
    pub fn step_steer(t_step: f64, ramp: f64, delta: f64) -> Self {
        let p = |t, delta| ControlPoint {
            t,
            delta,
            gamma: 0.0,
        };
        Self {
            points: alloc::vec![
                p(0.0, 0.0),
                p(t_step, 0.0),
                p(t_step + ramp.max(1e-6), delta)
            ],
        }
    }

    pub fn points(&self) -> &[ControlPoint] {
        &self.points
    }

    /// `(δ, γ)` at time `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let (a, b, w) = bracket(&self.points, t, |p| p.t);
        (
            a.delta + w * (b.delta - a.delta),
            a.gamma + w * (b.gamma - a.gamma),
        )
    }
}

/// Neighbouring breakpoints around `x` and the interpolation weight, clamped
/// at both ends.
fn bracket<T>(points: &[T], x: f64, key: impl Fn(&T) -> f64) -> (&T, &T, f64) {
    let last = points.len() - 1;
    if x <= key(&points[0]) {
        return (&points[0], &points[0], 0.0);
    }
    if x >= key(&points[last]) {
        return (&points[last], &points[last], 0.0);
    }
    let hi = points.partition_point(|p| key(p) <= x);
    let (a, b) = (&points[hi - 1], &points[hi]);
    (a, b, (x - key(a)) / (key(b) - key(a)))
}

/// Everything the simulator needs to know about the sled and the ice.
#[derive(Debug, Clone, PartialEq)]
pub struct SimModel {
    pub bob: BobParameters,
    pub longitudinal: LongitudinalLaw,
    pub lateral: LateralModel,
    pub aero: AeroModel,
}

impl SimModel {
    pub fn new(
        bob: BobParameters,
        longitudinal: LongitudinalLaw,
        lateral: LateralModel,
        air: AirState,
    ) -> Self {
        Self {
            aero: AeroModel::new(bob.cxax, air),
            bob,
            longitudinal,
            lateral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InitialConditions {
    pub v: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub beta: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub psi_dot: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub track: TrackProfile,
    pub controls: ControlTrace,
    pub initial: InitialConditions,
    /// Integration step [s], at most 0.01.
    pub dt: f64,
    /// Interval between logged samples [s]; a multiple of `dt`.
    pub log_interval: f64,
    /// Upper bound on the simulated time [s].
    pub duration: f64,
    /// The run ends once the speed drops to this value [m/s].
    pub stop_speed: f64,
}

impl Scenario {
    pub fn new(
        track: TrackProfile,
        controls: ControlTrace,
        initial: InitialConditions,
        duration: f64,
    ) -> Self {
        Self {
            track,
            controls,
            initial,
            dt: 1e-3,
            log_interval: 0.01,
            duration,
            stop_speed: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 0.01) {
            return Err(Error::InvalidParameter("time step must lie in (0, 0.01] s"));
        }
        if !(self.log_interval >= self.dt) {
            return Err(Error::InvalidParameter(
                "log interval shorter than the time step",
            ));
        }
        let ratio = self.log_interval / self.dt;
        if (ratio - libm::round(ratio)).abs() > 1e-6 * ratio {
            return Err(Error::InvalidParameter(
                "log interval must be a multiple of the time step",
            ));
        }
        if !(self.initial.v > self.stop_speed) {
            return Err(Error::InvalidParameter(
                "initial speed must exceed the stop speed",
            ));
        }
        if !(self.duration > 0.0) {
            return Err(Error::InvalidParameter("duration must be positive"));
        }
        Ok(())
    }
}

/// Integrated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub s: f64,
    pub v: f64,
    pub beta: f64,
    pub psi_dot: f64,
    /// Altitude relative to the start [m].
    pub h: f64,
    /// Energy dissipated by ice and air so far [J].
    pub e_loss: f64,
}

impl SimState {
    fn from_vec(t: f64, x: &[f64; 6]) -> Self {
        Self {
            t,
            s: x[0],
            v: x[1],
            beta: x[2],
            psi_dot: x[3],
            h: x[4],
            e_loss: x[5],
        }
    }

    fn to_vec(self) -> [f64; 6] {
        [self.s, self.v, self.beta, self.psi_dot, self.h, self.e_loss]
    }

    pub fn kinetic_energy(&self, mass: f64) -> f64 {
        0.5 * mass * self.v * self.v
    }
}

/// Forces and accelerations at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub delta: f64,
    pub gamma: f64,
    pub alpha_f: f64,
    pub alpha_r: f64,
    /// Front runner force in the `f0` frame [N].
    pub front_f0: Vector3<f64>,
    /// Front runner force in the runner frame [N].
    pub front_f: Vector3<f64>,
    pub rear: Vector3<f64>,
    /// Drag along −x [N].
    pub drag: f64,
    /// Non-gravitational acceleration at the COG [m/s²].
    pub a_cog: Vector3<f64>,
    pub theta_dot: f64,
    pub theta_ddot: f64,
    pub psi_ddot: f64,
    pub v_dot: f64,
    pub beta_dot: f64,
    /// Power dissipated by the runners and the air [W].
    pub loss_power: f64,
}

/// Runner-frame normal force solving `(Aᵀ·F_f)_z = F_z,f0` with the friction
/// laws supplying the other two runner-frame components.
fn solve_front(
    a: &Matrix3<f64>,
    f_z_f0: f64,
    k: f64,
    lateral: impl Fn(f64) -> f64,
) -> Vector3<f64> {
    let force = |z: f64| Vector3::new(-k * z, lateral(z), z);
    let residual = |z: f64| (a.transpose() * force(z)).z - f_z_f0;
    let mut z = f_z_f0;
    let tol = 1e-13 * f_z_f0.abs().max(1.0);
    for _ in 0..50 {
        let r = residual(z);
        if r.abs() <= tol {
            break;
        }
        let h = 1e-6 * z.abs().max(1.0);
        let slope = (residual(z + h) - residual(z - h)) / (2.0 * h);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        z -= r / slope;
    }
    force(z)
}

/// Forces and derivatives of the state at time `t`.
pub fn snapshot(model: &SimModel, scenario: &Scenario, state: &SimState) -> Snapshot {
    let bob = &model.bob;
    let m = bob.mass;
    let SimState {
        v,
        beta,
        psi_dot,
        s,
        ..
    } = *state;
    let track = scenario.track.at(s);
    let (delta, gamma) = scenario.controls.at(state.t);

    let alpha_f = beta - psi_dot * bob.l_f / v + delta;
    let alpha_r = beta + psi_dot * bob.l_r / v;
    let theta_dot = -v * track.curvature_y;
    let radius = track_radius_y(v, theta_dot);
    let a = runner_transform(gamma, delta);
    let (sb, cb) = libm::sincos(beta);
    let drag = model.aero.aero_forces(v, beta).actual;
    let c_slope = scenario.track.curvature_slope(s);

    // pitch acceleration depends on v̇, which depends on the load split
    let mut v_dot = 0.0;
    let mut out = None;
    for _ in 0..8 {
        let theta_ddot = -(v_dot * track.curvature_y + v * v * c_slope);
        let (f_z_f0, f_z_r) = reconstruct_vertical(track.load_factor * G, theta_ddot, bob);
        let mu_f = model.longitudinal.mu(Axle::Front, f_z_f0, radius);
        let mu_r = model.longitudinal.mu(Axle::Rear, f_z_r, radius);
        let front_f = solve_front(&a, f_z_f0, mu_f * libm::cos(alpha_f), |z| {
            model.lateral.front(z, alpha_f)
        });
        let front_f0 = a.transpose() * front_f;
        let rear = Vector3::new(
            -mu_r * f_z_r * libm::cos(alpha_r),
            model.lateral.rear(f_z_r, alpha_r),
            f_z_r,
        );
        let total = front_f0 + rear + Vector3::new(-drag, 0.0, 0.0);
        let along = total.x * cb - total.y * sb;
        let across = total.x * sb + total.y * cb;
        let new_v_dot = along / m + G * libm::sin(track.kappa);
        let converged = (new_v_dot - v_dot).abs() <= 1e-14 * new_v_dot.abs().max(1.0);
        v_dot = new_v_dot;
        out = Some(Snapshot {
            delta,
            gamma,
            alpha_f,
            alpha_r,
            front_f0,
            front_f,
            rear,
            drag,
            a_cog: Vector3::new(total.x / m, total.y / m, track.load_factor * G),
            theta_dot,
            theta_ddot,
            psi_ddot: (bob.l_f * front_f0.y - bob.l_r * rear.y) / bob.j_zz,
            v_dot,
            beta_dot: psi_dot - across / (m * v),
            loss_power: -along * v,
        });
        if converged {
            break;
        }
    }
    let mut snap = out.expect("at least one pass");
    snap.theta_ddot = -(snap.v_dot * track.curvature_y + v * v * c_slope);
    snap
}

fn derivative(model: &SimModel, scenario: &Scenario, t: f64, x: &[f64; 6]) -> [f64; 6] {
    let state = SimState::from_vec(t, x);
    let snap = snapshot(model, scenario, &state);
    let kappa = scenario.track.at(state.s).kappa;
    [
        state.v,
        snap.v_dot,
        snap.beta_dot,
        snap.psi_ddot,
        -state.v * libm::sin(kappa),
        snap.loss_power,
    ]
}

/// One fourth-order Runge-Kutta step.
pub fn step(model: &SimModel, scenario: &Scenario, state: &SimState, dt: f64) -> SimState {
    let x = state.to_vec();
    let t = state.t;
    let add = |x: &[f64; 6], k: &[f64; 6], h: f64| -> [f64; 6] {
        core::array::from_fn(|i| x[i] + h * k[i])
    };
    let k1 = derivative(model, scenario, t, &x);
    let k2 = derivative(model, scenario, t + 0.5 * dt, &add(&x, &k1, 0.5 * dt));
    let k3 = derivative(model, scenario, t + 0.5 * dt, &add(&x, &k2, 0.5 * dt));
    let k4 = derivative(model, scenario, t + dt, &add(&x, &k3, dt));
    let next =
        core::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    SimState::from_vec(t + dt, &next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    EndOfTrack,
    Duration,
    Stopped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSample {
    pub state: SimState,
    pub snapshot: Snapshot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub samples: Vec<SimSample>,
    pub stop: StopReason,
    pub final_state: SimState,
}

impl SimLog {
    /// Largest deviation of `E_kin + E_pot + E_loss` from its initial value,
    /// relative to the total dissipated energy.
    pub fn energy_closure(&self, mass: f64) -> f64 {
        let total = |s: &SimState| s.kinetic_energy(mass) + mass * G * s.h + s.e_loss;
        let e0 = total(&self.samples[0].state);
        let loss = self.final_state.e_loss.abs().max(f64::MIN_POSITIVE);
        self.samples
            .iter()
            .map(|x| &x.state)
            .chain(core::iter::once(&self.final_state))
            .map(|s| (total(s) - e0).abs() / loss)
            .fold(0.0, f64::max)
    }
}

/// Integrates a scenario until the end of the track, the time limit or a
/// stop, logging every `log_interval`.
pub fn simulate(model: &SimModel, scenario: &Scenario) -> Result<SimLog> {
    scenario.validate()?;
    model.bob.validate()?;
    let every = libm::round(scenario.log_interval / scenario.dt) as usize;
    let mut state = SimState {
        t: 0.0,
        s: scenario.initial.s,
        v: scenario.initial.v,
        beta: scenario.initial.beta,
        psi_dot: scenario.initial.psi_dot,
        h: 0.0,
        e_loss: 0.0,
    };
    let n_max = libm::round(scenario.duration / scenario.dt) as usize;
    let length = scenario.track.length();
    let mut samples = Vec::new();
    let mut stop = StopReason::Duration;
    for i in 0..=n_max {
        if i.is_multiple_of(every) {
            samples.push(SimSample {
                state,
                snapshot: snapshot(model, scenario, &state),
            });
        }
        if i == n_max {
            break;
        }
        if state.s >= length {
            stop = StopReason::EndOfTrack;
            break;
        }
        let next = step(model, scenario, &state, scenario.dt);
        if !(next.v > scenario.stop_speed) || !next.v.is_finite() {
            stop = StopReason::Stopped;
            break;
        }
        state = next;
        // time as a multiple of dt avoids drift from repeated addition
        state.t = (i + 1) as f64 * scenario.dt;
    }
    Ok(SimLog {
        samples,
        stop,
        final_state: state,
    })
}

/// Standard deviations of additive Gaussian sensor noise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct NoiseSpec {
    /// Accelerations [m/s²].
    pub accel: f64,
    /// Angular rates [rad/s].
    pub rate: f64,
    /// Speed [m/s].
    pub speed: f64,
    /// Slip, steering and roll-split angles [rad].
    pub angle: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn is_zero(&self) -> bool {
        self.accel == 0.0 && self.rate == 0.0 && self.speed == 0.0 && self.angle == 0.0
    }
}

/// Converts a log into sensor-frame telemetry (with altitude) and the
/// ground-truth force trace.
pub fn export_synthetic_telemetry(
    log: &SimLog,
    bob: &BobParameters,
    noise: &NoiseSpec,
    meta: RunMeta,
) -> Result<(TelemetryRun, AxleForceTrace)> {
    let off = &bob.offset;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut draw = |sigma: f64| -> f64 {
        if sigma > 0.0 {
            Normal::new(0.0, sigma)
                .map(|n| n.sample(&mut rng))
                .unwrap_or(0.0)
        } else {
            0.0
        }
    };
    let mut frames = Vec::with_capacity(log.samples.len());
    let mut altitude = Vec::with_capacity(log.samples.len());
    let mut truth = Vec::with_capacity(log.samples.len());
    for x in &log.samples {
        let (st, sn) = (&x.state, &x.snapshot);
        let acc = AngularAccel {
            phi_ddot: 0.0,
            theta_ddot: sn.theta_ddot,
            psi_ddot: sn.psi_ddot,
        };
        let a_s = accel_at_sensor(sn.a_cog, (0.0, sn.theta_dot, st.psi_dot), &acc, off);
        frames.push(TelemetryFrame {
            t: st.t,
            a_x: a_s.x + draw(noise.accel),
            a_y: a_s.y + draw(noise.accel),
            a_z: a_s.z + draw(noise.accel),
            phi_dot: draw(noise.rate),
            theta_dot: sn.theta_dot + draw(noise.rate),
            psi_dot: st.psi_dot + draw(noise.rate),
            v: st.v + draw(noise.speed),
            alpha_sensor: st.beta - st.psi_dot * off.l_x / st.v + draw(noise.angle),
            delta: sn.delta + draw(noise.angle),
            gamma: sn.gamma + draw(noise.angle),
        });
        altitude.push(st.h);
        truth.push(AxleSample {
            t: st.t,
            s: st.s - log.samples[0].state.s,
            v: st.v,
            beta: st.beta,
            alpha_f: sn.alpha_f,
            alpha_r: sn.alpha_r,
            gamma: sn.gamma,
            delta: sn.delta,
            a_y_cog: sn.a_cog.y,
            a_z_cog: sn.a_cog.z,
            f_y_ext: 0.0,
            f_x_ext: -sn.drag,
            f_x_f0: sn.front_f0.x,
            f_y_f0: sn.front_f0.y,
            f_z_f0: sn.front_f0.z,
            f_y_r: sn.rear.y,
            f_z_r: sn.rear.z,
            f_x_f: sn.front_f.x,
            f_y_f: sn.front_f.y,
            f_z_f: sn.front_f.z,
            f_x_r: sn.rear.x,
            invalid: None,
        });
    }
    let run = TelemetryRun::new(frames, Some(altitude), meta)?;
    Ok((run, AxleForceTrace { samples: truth }))
}

/// A straight glide on a plane tilted by `kappa` along the direction of
/// travel (positive downhill).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlideScenario {
    pub mass: f64,
    pub mu: f64,
    pub kappa: f64,
    pub v0: f64,
    pub length: f64,
    pub cxax: f64,
    pub air: AirState,
    pub dt: f64,
    /// Rate of the returned samples [Hz].
    pub sample_rate: f64,
}

/// Simulates a straight glide and returns speed over distance. The tilt is
/// not recorded in the result: the run carries neither altitude nor slope,
/// as on a rink assumed to be level.
pub fn simulate_glide(scenario: &GlideScenario, direction: Option<Direction>) -> Result<GlideRun> {
    let GlideScenario {
        mass,
        mu,
        kappa,
        v0,
        length,
        cxax,
        air,
        dt,
        sample_rate,
    } = *scenario;
    if !(mass > 0.0 && v0 > 0.0 && length > 0.0 && dt > 0.0 && sample_rate > 0.0) {
        return Err(Error::InvalidParameter(
            "glide scenario values must be positive",
        ));
    }
    let every = libm::round(1.0 / (sample_rate * dt)).max(1.0) as usize;
    let accel = |v: f64| {
        G * libm::sin(kappa) - mu * G * libm::cos(kappa) - drag_force(v, cxax, &air) / mass
    };
    let (mut s, mut v) = (0.0, v0);
    let (mut ss, mut vs) = (Vec::new(), Vec::new());
    let mut i = 0usize;
    while s <= length && v > 0.0 {
        if i.is_multiple_of(every) {
            ss.push(s);
            vs.push(v);
        }
        let f = |v: f64| (v, accel(v));
        let k1 = f(v);
        let k2 = f(v + 0.5 * dt * k1.1);
        let k3 = f(v + 0.5 * dt * k2.1);
        let k4 = f(v + dt * k3.1);
        s += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        i += 1;
    }
    Ok(GlideRun {
        s: ss,
        v: vs,
        h: None,
        direction,
        mass,
        air,
        cxax,
        kappa: Some(0.0),
    })
}
