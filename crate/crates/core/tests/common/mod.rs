#![allow(dead_code)]

use bobsled_core::aero::AirState;
use bobsled_core::friction::{LateralModel, LongitudinalLaw};
use bobsled_core::kinematics::MountingOffset;
use bobsled_core::onetrack::{
    build_axle_trace, AxleForceTrace, AxleSample, BobParameters, TraceOptions,
};
use bobsled_core::sim::{
    export_synthetic_telemetry, simulate, ControlPoint, ControlTrace, InitialConditions, NoiseSpec,
    Scenario, SimLog, SimModel, TrackPoint, TrackProfile,
};
use bobsled_core::telemetry::{derive_channels, RunMeta, TelemetryRun};

pub fn two_man_bob() -> BobParameters {
    BobParameters {
        mass: 390.0,
        j_yy: 300.0,
        j_zz: 320.0,
        l_f: 1.4,
        l_r: 1.3,
        cxax: 0.3,
        offset: MountingOffset::from_geometry(0.3, 0.05, 0.2, 1.4, 1.3),
    }
}

pub fn model_with(lateral: LateralModel) -> SimModel {
    SimModel::new(
        two_man_bob(),
        LongitudinalLaw::Fixed(0.004),
        lateral,
        AirState::ICE_HOUSE,
    )
}

pub fn fitted_model() -> SimModel {
    model_with(LateralModel::fitted())
}

fn start(v: f64) -> InitialConditions {
    InitialConditions {
        v,
        beta: 0.0,
        psi_dot: 0.0,
        s: 0.0,
    }
}

fn tp(s: f64, kappa: f64, curvature_y: f64, load_factor: f64) -> TrackPoint {
    TrackPoint {
        s,
        kappa,
        curvature_y,
        load_factor,
    }
}

fn cp(t: f64, delta_deg: f64, gamma_deg: f64) -> ControlPoint {
    ControlPoint {
        t,
        delta: delta_deg.to_radians(),
        gamma: gamma_deg.to_radians(),
    }
}

pub fn straight_scenario(duration: f64) -> Scenario {
    Scenario::new(
        TrackProfile::straight(5000.0, 0.1),
        ControlTrace::neutral(),
        start(25.0),
        duration,
    )
}

/// Steering steps from 0 to 1° at t = 5 s on a straight downhill section.
pub fn step_steer_scenario() -> Scenario {
    Scenario::new(
        TrackProfile::straight(2000.0, 0.1),
        ControlTrace::step_steer(5.0, 0.1, 1f64.to_radians()),
        start(25.0),
        10.0,
    )
}

/// A banked curve with a compression, steered with `delta_deg` and some
/// roll-split.
pub fn corner_scenario(delta_deg: f64) -> Scenario {
    let track = TrackProfile::new(vec![
        tp(0.0, 0.1, 0.0, 1.0),
        tp(100.0, 0.1, 0.0, 1.0),
        tp(150.0, 0.08, 0.01, 3.5),
        tp(250.0, 0.08, 0.01, 3.5),
        tp(300.0, 0.1, 0.0, 1.0),
        tp(600.0, 0.1, 0.0, 1.0),
    ])
    .unwrap();
    let controls = ControlTrace::new(vec![
        cp(0.0, 0.0, 0.0),
        cp(3.0, 0.0, 0.0),
        cp(4.0, delta_deg, 1.7),
        cp(8.0, delta_deg, 1.7),
        cp(9.0, 0.0, 0.0),
    ])
    .unwrap();
    Scenario::new(track, controls, start(25.0), 12.0)
}

/// Alternating steering through a sequence of banked curves.
pub fn slalom_scenario(amplitude_deg: f64) -> Scenario {
    let mut pts = vec![tp(0.0, 0.1, 0.0, 1.0)];
    for k in 0..6 {
        let s0 = 60.0 + 80.0 * k as f64;
        pts.push(tp(s0, 0.1, 0.0, 1.0));
        pts.push(tp(s0 + 20.0, 0.09, 0.004, 1.5 + 0.5 * k as f64));
        pts.push(tp(s0 + 50.0, 0.09, 0.004, 1.5 + 0.5 * k as f64));
    }
    pts.push(tp(600.0, 0.1, 0.0, 1.0));
    pts.push(tp(1000.0, 0.1, 0.0, 1.0));
    let controls = (0..24)
        .map(|k| {
            let sign = if k % 4 < 2 { 1.0 } else { -1.0 };
            let on = if k % 2 == 1 { 1.0 } else { 0.3 };
            cp(
                1.0 + 0.6 * k as f64,
                sign * on * amplitude_deg,
                0.5 * sign * on,
            )
        })
        .collect();
    Scenario::new(
        TrackProfile::new(pts).unwrap(),
        ControlTrace::new(controls).unwrap(),
        start(25.0),
        15.0,
    )
}

pub struct Pipeline {
    pub log: SimLog,
    pub run: TelemetryRun,
    pub truth: AxleForceTrace,
    pub reconstructed: AxleForceTrace,
}

/// Simulate, export noise-free telemetry, derive channels and reconstruct.
pub fn pipeline(model: &SimModel, scenario: &Scenario, driver: &str) -> Pipeline {
    let log = simulate(model, scenario).unwrap();
    let meta = RunMeta {
        driver: driver.into(),
        track: "synthetic".into(),
        sample_rate: 0.0,
    };
    let (run, truth) =
        export_synthetic_telemetry(&log, &model.bob, &NoiseSpec::default(), meta).unwrap();
    let run = derive_channels(&run).unwrap();
    let reconstructed = build_axle_trace(
        &run,
        &model.bob,
        &model.longitudinal,
        &model.aero,
        &TraceOptions::default(),
    )
    .unwrap();
    Pipeline {
        log,
        run,
        truth,
        reconstructed,
    }
}

pub type ForceField = (&'static str, fn(&AxleSample) -> f64);

pub const FORCE_FIELDS: [ForceField; 9] = [
    ("F_x,f0", |x| x.f_x_f0),
    ("F_y,f0", |x| x.f_y_f0),
    ("F_z,f0", |x| x.f_z_f0),
    ("F_x,f", |x| x.f_x_f),
    ("F_y,f", |x| x.f_y_f),
    ("F_z,f", |x| x.f_z_f),
    ("F_x,r", |x| x.f_x_r),
    ("F_y,r", |x| x.f_y_r),
    ("F_z,r", |x| x.f_z_r),
];

/// `rms(reconstructed − truth) / rms(truth)` over the valid reconstructed
/// samples, per force component.
pub fn relative_rms_errors(
    reconstructed: &AxleForceTrace,
    truth: &AxleForceTrace,
) -> Vec<(&'static str, f64)> {
    FORCE_FIELDS
        .iter()
        .map(|(name, f)| {
            let (mut err, mut norm) = (0.0, 0.0);
            for (a, b) in reconstructed.samples.iter().zip(&truth.samples) {
                if a.is_valid() {
                    err += (f(a) - f(b)).powi(2);
                    norm += f(b).powi(2);
                }
            }
            (
                *name,
                if norm > 0.0 {
                    (err / norm).sqrt()
                } else {
                    err.sqrt()
                },
            )
        })
        .collect()
}
