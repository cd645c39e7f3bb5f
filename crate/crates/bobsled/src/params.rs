//! Friction parameter files (TOML).

use bobsled_core::fitting::{Convergence, FitResult};
use bobsled_core::friction::{LateralFrictionParams, LongitudinalFrictionParams};
use serde::{Deserialize, Serialize};

use crate::provenance::{Input, Provenance};
use crate::{Error, Result};

/// Fit statistics stored next to the fitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub samples: usize,
    pub iterations: usize,
    pub converged: bool,
    /// RMS of the force residuals [N].
    pub residual_rms: f64,
    /// Standard errors of (μ_y·ζ_y, C_y, K_y).
    pub std_error: [f64; 3],
    pub covariance: [[f64; 3]; 3],
}

impl From<&FitResult> for FitRecord {
    fn from(r: &FitResult) -> Self {
        Self {
            samples: r.samples,
            iterations: r.iterations,
            converged: r.status == Convergence::Converged,
            residual_rms: r.residual_rms,
            std_error: core::array::from_fn(|i| r.covariance[i][i].max(0.0).sqrt()),
            covariance: r.covariance,
        }
    }
}

/// Lateral model validation on held-out runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub track: String,
    pub runs: usize,
    /// RMSE of the lateral force at the COG [N].
    pub rmse_fitted: f64,
    pub rmse_reference: f64,
}

/// Lateral parameters for both runners; `fit` output and `eval` input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LateralParamsFile {
    pub front: LateralFrictionParams,
    pub rear: LateralFrictionParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_fit: Option<FitRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rear_fit: Option<FitRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationRecord>,
}

impl Default for LateralParamsFile {
    fn default() -> Self {
        Self {
            front: LateralFrictionParams::FRONT,
            rear: LateralFrictionParams::REAR,
            front_fit: None,
            rear_fit: None,
            validation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LongitudinalParamsFile {
    pub longitudinal: LongitudinalFrictionParams,
}

pub fn parse_toml<T: for<'de> Deserialize<'de>>(input: &Input) -> Result<T> {
    toml::from_str(&input.text).map_err(|e| {
        let line = e.span().map_or(0, |span| {
            input.text[..span.start].matches('\n').count() as u64 + 1
        });
        Error::config(&input.path, format!("line {line}: {}", e.message()))
    })
}

pub fn parse_lateral(input: &Input) -> Result<LateralParamsFile> {
    let file: LateralParamsFile = parse_toml(input)?;
    for (name, p) in [("front", &file.front), ("rear", &file.rear)] {
        p.validate()
            .map_err(|e| Error::config(&input.path, format!("[{name}]: {e}")))?;
    }
    Ok(file)
}

pub fn parse_longitudinal(input: &Input) -> Result<LongitudinalFrictionParams> {
    let file: LongitudinalParamsFile = parse_toml(input)?;
    file.longitudinal
        .validate()
        .map_err(|e| Error::config(&input.path, e.to_string()))?;
    Ok(file.longitudinal)
}

/// TOML with the provenance block as leading comments.
pub fn format_toml<T: Serialize>(value: &T, provenance: &Provenance) -> String {
    let body = toml::to_string(value).expect("parameter records serialize to TOML");
    provenance.comment_lines() + &body
}
