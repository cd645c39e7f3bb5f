//! Run configuration (TOML with sections). Paths are relative to the config
//! file; `BOBSLED_SCHEMA`, `BOBSLED_LATERAL_PARAMS`, `BOBSLED_LONGITUDINAL_PARAMS`,
//! `BOBSLED_PRESSURE_FRONT` and `BOBSLED_PRESSURE_REAR` override the
//! corresponding file paths.

use std::path::{Path, PathBuf};

use bobsled_core::aero::{AeroModel, AirState};
use bobsled_core::friction::{LongitudinalLaw, DEFAULT_MU_X};
use bobsled_core::kinematics::MountingOffset;
use bobsled_core::onetrack::BobParameters;
use serde::{Deserialize, Serialize};

use crate::params::{parse_lateral, parse_longitudinal, parse_toml, LateralParamsFile};
use crate::pressure::parse_pressure_table;
use crate::provenance::{read_input, Input};
use crate::schema::Schema;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSection {
    pub l_x: f64,
    pub l_y: f64,
    pub l_z: f64,
    /// Distances from the speed sensor to the axles; derived from the
    /// geometry when absent.
    pub l_s_f: Option<f64>,
    pub l_s_r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BobSection {
    pub mass: f64,
    pub j_yy: f64,
    pub j_zz: f64,
    pub l_f: f64,
    pub l_r: f64,
    pub cxax: f64,
    pub sensor: SensorSection,
}

impl Default for BobSection {
    fn default() -> Self {
        Self {
            mass: 390.0,
            j_yy: 300.0,
            j_zz: 320.0,
            l_f: 1.4,
            l_r: 1.3,
            cxax: 0.3,
            sensor: SensorSection {
                l_x: 0.3,
                l_y: 0.05,
                l_z: 0.2,
                l_s_f: None,
                l_s_r: None,
            },
        }
    }
}

impl BobSection {
    pub fn parameters(&self) -> BobParameters {
        let s = &self.sensor;
        let mut offset = MountingOffset::from_geometry(s.l_x, s.l_y, s.l_z, self.l_f, self.l_r);
        if let Some(v) = s.l_s_f {
            offset.l_s_f = v;
        }
        if let Some(v) = s.l_s_r {
            offset.l_s_r = v;
        }
        BobParameters {
            mass: self.mass,
            j_yy: self.j_yy,
            j_zz: self.j_zz,
            l_f: self.l_f,
            l_r: self.l_r,
            cxax: self.cxax,
            offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LongitudinalSection {
    /// Fixed friction coefficient; used when no parameter file is given.
    pub mu: Option<f64>,
    pub params: Option<PathBuf>,
    pub pressure_front: Option<PathBuf>,
    pub pressure_rear: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LateralSection {
    pub params: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AeroSection {
    /// Relative drag-area increase per degree of chassis slip.
    pub yaw_sensitivity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Processing {
    pub schema: Option<PathBuf>,
    /// Low-pass cutoff before the analysis [Hz].
    pub cutoff: f64,
    /// Optional anti-alias cutoff applied before resampling [Hz].
    pub prefilter: Option<f64>,
    /// Analysis sample rate [Hz].
    pub rate: f64,
    /// Roll-acceleration exclusion threshold [°/s²].
    pub roll_threshold: f64,
    /// Central share of a glide run used for the friction fit.
    pub glide_window: f64,
    /// Normal-force band edges for fit diagnostics [N].
    pub fz_bands: Vec<f64>,
    pub alpha_bins: usize,
}

impl Default for Processing {
    fn default() -> Self {
        Self {
            schema: None,
            cutoff: 20.0,
            prefilter: None,
            rate: 100.0,
            roll_threshold: 100.0,
            glide_window: 0.6,
            fz_bands: vec![0.0, 1500.0, 3000.0, 4500.0, 6000.0, 10000.0],
            alpha_bins: 12,
        }
    }
}

impl Processing {
    pub fn validate(&self, path: &Path) -> Result<()> {
        let bad = |msg: &str| Err(Error::config(path, msg));
        if !(self.cutoff > 0.0) {
            return bad("cutoff must be positive");
        }
        if let Some(p) = self.prefilter {
            if !(p > 0.0) {
                return bad("prefilter cutoff must be positive");
            }
        }
        if !(self.rate > 0.0) {
            return bad("rate must be positive");
        }
        if !(self.roll_threshold > 0.0) {
            return bad("roll threshold must be positive");
        }
        if !(self.glide_window > 0.0 && self.glide_window <= 1.0) {
            return bad("glide window must lie in (0, 1]");
        }
        if self.fz_bands.len() < 2 || self.fz_bands.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("fz_bands needs at least two increasing edges");
        }
        if self.alpha_bins == 0 {
            return bad("alpha_bins must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub bob: BobSection,
    #[serde(default)]
    pub air: AirState,
    #[serde(default)]
    pub longitudinal: LongitudinalSection,
    #[serde(default)]
    pub lateral: LateralSection,
    #[serde(default)]
    pub aero: AeroSection,
    #[serde(default)]
    pub processing: Processing,
}

/// A configuration with every referenced file loaded and checked.
#[derive(Debug, Clone)]
pub struct Config {
    pub bob: BobParameters,
    pub air: AirState,
    pub yaw_sensitivity: f64,
    pub longitudinal: LongitudinalLaw,
    pub lateral: Option<LateralParamsFile>,
    pub schema: Schema,
    pub processing: Processing,
    /// Every file read while loading, for provenance.
    pub inputs: Vec<Input>,
}

impl Config {
    pub fn aero(&self) -> AeroModel {
        AeroModel {
            yaw_sensitivity: self.yaw_sensitivity,
            ..AeroModel::new(self.bob.cxax, self.air)
        }
    }
}

/// Reads a file the configuration points at; failures are configuration
/// errors.
pub fn read_config_input(path: &Path) -> Result<Input> {
    read_input(path).map_err(|e| match e {
        Error::Io { path, source } => Error::config(path, source.to_string()),
        other => other,
    })
}

/// Loads `path` (or the defaults when `None`). `env` looks up path overrides.
pub fn load(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Config> {
    let mut inputs = Vec::new();
    let (file, base, label) = match path {
        Some(p) => {
            let input = read_config_input(p)?;
            let file: ConfigFile = parse_toml(&input)?;
            inputs.push(input);
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (file, base, p.to_path_buf())
        }
        None => (
            ConfigFile::default(),
            PathBuf::new(),
            PathBuf::from("<defaults>"),
        ),
    };
    let resolve = |var: &str, value: &Option<PathBuf>| -> Option<PathBuf> {
        env(var)
            .map(PathBuf::from)
            .or_else(|| value.as_ref().map(|p| base.join(p)))
    };

    let bob = file.bob.parameters();
    bob.validate()
        .map_err(|e| Error::config(&label, format!("[bob]: {e}")))?;
    if !(file.air.p_air > 0.0 && file.air.temperature > 0.0 && file.air.gas_constant > 0.0) {
        return Err(Error::config(&label, "[air]: values must be positive"));
    }
    file.processing.validate(&label)?;

    let schema = match resolve("BOBSLED_SCHEMA", &file.processing.schema) {
        Some(p) => {
            let input = read_config_input(&p)?;
            let schema = Schema::parse(&input)?;
            inputs.push(input);
            schema
        }
        None => Schema::default(),
    };

    let long = &file.longitudinal;
    let params = resolve("BOBSLED_LONGITUDINAL_PARAMS", &long.params);
    let front = resolve("BOBSLED_PRESSURE_FRONT", &long.pressure_front);
    let rear = resolve("BOBSLED_PRESSURE_REAR", &long.pressure_rear);
    let longitudinal = match (params, front, rear) {
        (Some(params), Some(front), Some(rear)) => {
            if long.mu.is_some() {
                return Err(Error::config(
                    &label,
                    "[longitudinal]: give either `mu` or pressure tables",
                ));
            }
            let mut load_input = |p: &Path| -> Result<Input> {
                let input = read_config_input(p)?;
                inputs.push(input.clone());
                Ok(input)
            };
            let params = parse_longitudinal(&load_input(&params)?)?;
            let front = parse_pressure_table(&load_input(&front)?).map_err(Error::into_config)?;
            let rear = parse_pressure_table(&load_input(&rear)?).map_err(Error::into_config)?;
            LongitudinalLaw::Pressure {
                params,
                front,
                rear,
            }
        }
        (None, None, None) => {
            let mu = long.mu.unwrap_or(DEFAULT_MU_X);
            if !(0.0..1.0).contains(&mu) {
                return Err(Error::config(
                    &label,
                    "[longitudinal]: mu must lie in [0, 1)",
                ));
            }
            LongitudinalLaw::Fixed(mu)
        }
        _ => {
            return Err(Error::config(
                &label,
                "[longitudinal]: `params`, `pressure_front` and `pressure_rear` go together",
            ))
        }
    };

    let lateral = match resolve("BOBSLED_LATERAL_PARAMS", &file.lateral.params) {
        Some(p) => {
            let input = read_config_input(&p)?;
            let lateral = parse_lateral(&input)?;
            inputs.push(input);
            Some(lateral)
        }
        None => None,
    };

    let yaw_sensitivity = file
        .aero
        .yaw_sensitivity
        .unwrap_or(bobsled_core::aero::YAW_SENSITIVITY);
    if !(yaw_sensitivity >= 0.0) {
        return Err(Error::config(
            &label,
            "[aero]: yaw_sensitivity must not be negative",
        ));
    }

    Ok(Config {
        bob,
        air: file.air,
        yaw_sensitivity,
        longitudinal,
        lateral,
        schema,
        processing: file.processing,
        inputs,
    })
}
