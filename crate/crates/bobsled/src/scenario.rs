//! Simulator scenario files (TOML).
//!
//! ```toml
//! name = "corner"
//! driver = "A"
//! track = "synthetic"
//! duration = 12.0
//! angle_unit = "deg"
//!
//! [initial]
//! v = 30.0
//!
//! [[profile]]
//! s = 0.0
//! kappa = 0.5
//! curvature_y = 0.0
//! load_factor = 1.0
//!
//! [[controls]]
//! t = 0.0
//! delta = 0.0
//! gamma = 0.0
//! ```
//!
//! Angles (`kappa`, `delta`, `gamma`, `initial.beta`) are read in
//! `angle_unit`; noise standard deviations stay in SI units and radians.

use bobsled_core::sim::{
    ControlPoint, ControlTrace, InitialConditions, NoiseSpec, Scenario, TrackPoint, TrackProfile,
};
use serde::{Deserialize, Serialize};

use crate::error::CoreContext;
use crate::params::parse_toml;
use crate::provenance::Input;
use crate::schema::AngleUnit;
use crate::{Error, Result};

fn default_dt() -> f64 {
    1e-3
}

fn default_log_interval() -> f64 {
    0.01
}

fn default_stop_speed() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub driver: String,
    #[serde(default)]
    pub track: String,
    pub duration: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_log_interval")]
    pub log_interval: f64,
    #[serde(default = "default_stop_speed")]
    pub stop_speed: f64,
    #[serde(default)]
    pub angle_unit: AngleUnit,
    pub initial: InitialConditions,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub profile: Vec<TrackPoint>,
    #[serde(default)]
    pub controls: Vec<ControlPoint>,
}

impl ScenarioFile {
    pub fn scenario(&self) -> bobsled_core::Result<Scenario> {
        let u = self.angle_unit;
        let track = TrackProfile::new(
            self.profile
                .iter()
                .map(|p| TrackPoint {
                    kappa: u.to_rad(p.kappa),
                    ..*p
                })
                .collect(),
        )?;
        let controls = if self.controls.is_empty() {
            ControlTrace::neutral()
        } else {
            ControlTrace::new(
                self.controls
                    .iter()
                    .map(|c| ControlPoint {
                        t: c.t,
                        delta: u.to_rad(c.delta),
                        gamma: u.to_rad(c.gamma),
                    })
                    .collect(),
            )?
        };
        let initial = InitialConditions {
            beta: u.to_rad(self.initial.beta),
            ..self.initial
        };
        let scenario = Scenario {
            dt: self.dt,
            log_interval: self.log_interval,
            stop_speed: self.stop_speed,
            ..Scenario::new(track, controls, initial, self.duration)
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn parse_scenario(input: &Input) -> Result<(ScenarioFile, Scenario)> {
    let file: ScenarioFile = parse_toml(input)?;
    let scenario = file
        .scenario()
        .context(input.path.display().to_string())
        .map_err(|e| match e {
            Error::Core { source, .. } => Error::config(&input.path, source.to_string()),
            other => other,
        })?;
    Ok((file, scenario))
}
