//! Flat JSON scene description.
//!
//! Derived quantities (b, E0) are never read from the file; they are always
//! recomputed from f, g and H0.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::scene::{Angle, BseConfig, DriverModel, VehicleGeometry};

const ODYSSEY_JSON: &str = include_str!("../data/odyssey.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default)]
    pub label: String,
    #[serde(rename = "W_cm")]
    pub w_cm: f64,
    pub h_cm: f64,
    pub l_cm: f64,
    pub p_cm: f64,
    pub m_cm: f64,
    pub theta_deg: f64,
    #[serde(rename = "H0_cm")]
    pub h0_cm: f64,
    pub f_cm: f64,
    pub g_cm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_cm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_deg: Option<f64>,
}

#[derive(Debug)]
pub enum ConfigError {
    Io { path: String, source: std::io::Error },
    Parse(serde_json::Error),
    Invalid { key: &'static str, value: f64, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "cannot read {path}: {source}"),
            ConfigError::Parse(e) => write!(f, "invalid scene config: {e}"),
            ConfigError::Invalid { key, value, reason } => {
                write!(f, "invalid scene config: {key} = {value}: {reason}")
            }
        }
    }
}

impl std::error::Error for ConfigError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ConfigError::Io { source, .. } => Some(source),
            ConfigError::Parse(e) => Some(e),
            ConfigError::Invalid { .. } => None,
        }
    }
}

/// A validated scene.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneModel {
    pub label: String,
    pub geom: VehicleGeometry,
    pub driver: DriverModel,
    pub bse: Option<BseConfig>,
}

impl SceneConfig {
    /// The bundled Odyssey scene, sheet of 45.7°.
    pub fn odyssey() -> Self {
        SceneConfig::from_json(ODYSSEY_JSON).expect("bundled config parses")
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(ConfigError::Parse)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        SceneConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Validates every field and builds the model types.
    pub fn to_model(&self) -> Result<SceneModel, ConfigError> {
        let bad = |key: &'static str, value: f64, reason: &str| ConfigError::Invalid {
            key,
            value,
            reason: reason.to_string(),
        };
        for (key, v) in [
            ("W_cm", self.w_cm),
            ("h_cm", self.h_cm),
            ("l_cm", self.l_cm),
            ("p_cm", self.p_cm),
            ("f_cm", self.f_cm),
            ("g_cm", self.g_cm),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(bad(key, v, "must be a positive length"));
            }
        }
        if !(self.m_cm >= 0.0) || !self.m_cm.is_finite() {
            return Err(bad("m_cm", self.m_cm, "must be a non-negative length"));
        }
        if !(0.0..45.0).contains(&self.theta_deg) {
            return Err(bad("theta_deg", self.theta_deg, "must lie in [0, 45)"));
        }
        if !(self.h0_cm >= 0.0) || !self.h0_cm.is_finite() {
            return Err(bad("H0_cm", self.h0_cm, "must be a non-negative length"));
        }
        if self.f_cm >= 2.0 * self.g_cm {
            return Err(bad("f_cm", self.f_cm, "must be below 2 * g_cm"));
        }
        if let Some(d) = self.d_cm {
            if !(d > 0.0) || !d.is_finite() {
                return Err(bad("d_cm", d, "must be a positive length"));
            }
        }
        if let Some(mu) = self.mu_deg {
            if !(0.0..90.0).contains(&mu) {
                return Err(bad("mu_deg", mu, "must lie in [0, 90)"));
            }
        }
        let keyed = |key: &'static str| {
            move |e: GeometryError| ConfigError::Invalid {
                key,
                value: f64::NAN,
                reason: e.to_string(),
            }
        };
        let geom = VehicleGeometry::new(
            self.w_cm,
            self.h_cm,
            self.l_cm,
            self.p_cm,
            self.m_cm,
            Angle::from_degrees(self.theta_deg),
        )
        .map_err(keyed("W_cm"))?;
        let driver = DriverModel::new(self.f_cm, self.g_cm, self.h0_cm, self.d_cm).map_err(keyed("f_cm"))?;
        let bse = self
            .mu_deg
            .map(BseConfig::from_degrees)
            .transpose()
            .map_err(keyed("mu_deg"))?;
        Ok(SceneModel {
            label: self.label.clone(),
            geom,
            driver,
            bse,
        })
    }
}
