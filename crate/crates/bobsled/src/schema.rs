//! Column mapping between CSV files and telemetry channels.

use std::collections::BTreeMap;
use std::path::Path;

use bobsled_core::telemetry::Channel;
use serde::{Deserialize, Serialize};

use crate::provenance::Input;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Rad,
    Deg,
}

impl AngleUnit {
    pub fn to_rad(self, x: f64) -> f64 {
        match self {
            AngleUnit::Rad => x,
            AngleUnit::Deg => x.to_radians(),
        }
    }

    pub fn from_rad(self, x: f64) -> f64 {
        match self {
            AngleUnit::Rad => x,
            AngleUnit::Deg => x.to_degrees(),
        }
    }
}

pub const TIME: &str = "t";
pub const ALTITUDE: &str = "h";

/// Maps channel keys (`t`, `a_x`, …, `gamma`, `h`) to column names. Keys left
/// out map to a column of the same name. Angles and angular rates are read in
/// `angle_unit` (degrees means ° and °/s).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schema {
    #[serde(default)]
    pub columns: BTreeMap<String, String>,
    #[serde(default)]
    pub angle_unit: AngleUnit,
}

impl Schema {
    pub fn keys() -> impl Iterator<Item = &'static str> {
        [TIME]
            .into_iter()
            .chain(Channel::ALL.iter().map(|c| c.name()))
            .chain([ALTITUDE])
    }

    pub fn column<'a>(&'a self, key: &'a str) -> &'a str {
        self.columns.get(key).map(String::as_str).unwrap_or(key)
    }

    pub fn parse(input: &Input) -> Result<Self> {
        let schema: Schema = serde_json::from_str(&input.text)
            .map_err(|e| Error::parse(&input.path, e.line() as u64, e.to_string()))?;
        schema.validate(&input.path)?;
        Ok(schema)
    }

    pub fn validate(&self, path: &Path) -> Result<()> {
        for key in self.columns.keys() {
            if !Self::keys().any(|k| k == key) {
                return Err(Error::config(
                    path,
                    format!("unknown channel `{key}` in schema"),
                ));
            }
        }
        let mut seen = BTreeMap::new();
        for key in Self::keys() {
            if let Some(other) = seen.insert(self.column(key), key) {
                return Err(Error::config(
                    path,
                    format!(
                        "column `{}` mapped to both `{other}` and `{key}`",
                        self.column(key)
                    ),
                ));
            }
        }
        Ok(())
    }
}
