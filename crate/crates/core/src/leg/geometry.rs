//! Link parameters of the leg and the surrounding water.
//!
//! The bundled `uwml-default` profile carries the measured parameters of the
//! prototype leg. Other profiles load from a TOML document:
//!
//! ```toml
//! angles = "degrees"          # optional, unit of angle columns in input CSVs
//!
//! [geometry]
//! l1 = 0.0
//! l2 = 0.660
//! # ... every field of LegGeometry
//!
//! [environment]
//! rho_water = 1000.0
//! ```

use serde::{Deserialize, Serialize};

use super::Link;
use crate::error::{Error, Result};

pub const DEFAULT_PROFILE: &str = "uwml-default";

/// Link lengths, centroid offsets, cross sections and masses of the leg.
///
/// `d_i1` is the effective section height of link `i` (the face swept by
/// hip-yaw motion), `d_i2` the effective width (the face swept by the roll
/// joints). Lengths in meters, masses in kg, densities in kg/m³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegGeometry {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub lc1: f64,
    pub lc2: f64,
    pub lc3: f64,
    pub d11: f64,
    pub d12: f64,
    pub d21: f64,
    pub d22: f64,
    pub d31: f64,
    pub d32: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// Equivalent density of the link material.
    pub rho_link: f64,
    /// Gravitational acceleration, m/s².
    pub g: f64,
}

impl LegGeometry {
    /// Prototype leg: hip yaw and hip roll axes intersect, so link 1 has no
    /// length and no wetted section.
    pub const fn uwml_default() -> Self {
        Self {
            l1: 0.0,
            l2: 0.660,
            l3: 0.714,
            lc1: 0.0,
            lc2: 0.506,
            lc3: 0.560,
            d11: 0.0,
            d12: 0.0,
            d21: 0.131,
            d22: 0.238,
            d31: 0.131,
            d32: 0.279,
            m1: 10.758,
            m2: 19.261,
            m3: 10.375,
            rho_link: 2700.0,
            g: 9.81,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("l1", self.l1),
            ("l2", self.l2),
            ("l3", self.l3),
            ("lc1", self.lc1),
            ("lc2", self.lc2),
            ("lc3", self.lc3),
            ("d11", self.d11),
            ("d12", self.d12),
            ("d21", self.d21),
            ("d22", self.d22),
            ("d31", self.d31),
            ("d32", self.d32),
            ("m1", self.m1),
            ("m2", self.m2),
            ("m3", self.m3),
            ("rho_link", self.rho_link),
            ("g", self.g),
        ];
        for (name, value) in named {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        for (name, value) in [
            ("l2", self.l2),
            ("l3", self.l3),
            ("rho_link", self.rho_link),
        ] {
            if value <= 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be strictly positive"
                )));
            }
        }
        if self.lc2 > self.l2 {
            return Err(Error::InvalidGeometry("lc2 exceeds l2".into()));
        }
        if self.lc3 > self.l3 {
            return Err(Error::InvalidGeometry("lc3 exceeds l3".into()));
        }
        Ok(())
    }

    pub fn length(&self, link: Link) -> f64 {
        match link {
            Link::L1 => self.l1,
            Link::L2 => self.l2,
            Link::L3 => self.l3,
        }
    }

    /// Effective section height (yaw-facing).
    pub fn height(&self, link: Link) -> f64 {
        match link {
            Link::L1 => self.d11,
            Link::L2 => self.d21,
            Link::L3 => self.d31,
        }
    }

    /// Effective section width (roll-facing).
    pub fn width(&self, link: Link) -> f64 {
        match link {
            Link::L1 => self.d12,
            Link::L2 => self.d22,
            Link::L3 => self.d32,
        }
    }

    /// Effective cross-sectional area `height * width`.
    pub fn area(&self, link: Link) -> f64 {
        self.height(link) * self.width(link)
    }
}

impl Default for LegGeometry {
    fn default() -> Self {
        Self::uwml_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvParams {
    /// Water density, kg/m³.
    pub rho_water: f64,
}

impl EnvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_water.is_finite() && self.rho_water > 0.0) {
            return Err(Error::Config(format!(
                "rho_water must be positive, got {}",
                self.rho_water
            )));
        }
        Ok(())
    }
}

impl Default for EnvParams {
    fn default() -> Self {
        Self { rho_water: 1000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Radians,
    Degrees,
}

impl AngleUnit {
    /// Factor converting a value in this unit to radians.
    pub fn to_radians_factor(self) -> f64 {
        match self {
            AngleUnit::Radians => 1.0,
            AngleUnit::Degrees => std::f64::consts::PI / 180.0,
        }
    }
}

/// Geometry, environment and input conventions loaded together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub angles: AngleUnit,
    pub geometry: LegGeometry,
    #[serde(default)]
    pub environment: EnvParams,
}

impl ModelConfig {
    pub fn profile(name: &str) -> Result<Self> {
        match name {
            DEFAULT_PROFILE => Ok(Self::default()),
            other => Err(Error::Config(format!("unknown geometry profile '{other}'"))),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ModelConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.geometry.validate()?;
        config.environment.validate()?;
        Ok(config)
    }

    /// Resolves either a bundled profile name or a path to a TOML document.
    pub fn load(profile_or_path: &str) -> Result<Self> {
        if profile_or_path == DEFAULT_PROFILE {
            return Self::profile(profile_or_path);
        }
        let text = std::fs::read_to_string(profile_or_path)
            .map_err(|e| Error::Config(format!("{profile_or_path}: {e}")))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("model config serializes")
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            angles: AngleUnit::Radians,
            geometry: LegGeometry::uwml_default(),
            environment: EnvParams::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_matches_prototype_table() {
        let g = LegGeometry::uwml_default();
        assert_eq!((g.l1, g.l2, g.l3), (0.0, 0.660, 0.714));
        assert_eq!((g.lc1, g.lc2, g.lc3), (0.0, 0.506, 0.560));
        assert_eq!((g.d11, g.d12), (0.0, 0.0));
        assert_eq!((g.d21, g.d22), (0.131, 0.238));
        assert_eq!((g.d31, g.d32), (0.131, 0.279));
        assert_eq!((g.m1, g.m2, g.m3), (10.758, 19.261, 10.375));
        assert_eq!(g.rho_link, 2700.0);
        assert_eq!(EnvParams::default().rho_water, 1000.0);
        g.validate().unwrap();
        assert_eq!(g.area(Link::L1), 0.0);
    }

    #[test]
    fn toml_round_trip_and_degrees() {
        let cfg = ModelConfig {
            angles: AngleUnit::Degrees,
            ..ModelConfig::default()
        };
        let text = cfg.to_toml_string();
        let back = ModelConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_invalid_geometry() {
        let mut g = LegGeometry::uwml_default();
        g.lc3 = 1.0;
        assert!(g.validate().is_err());
        g = LegGeometry::uwml_default();
        g.l2 = 0.0;
        assert!(g.validate().is_err());
        g = LegGeometry::uwml_default();
        g.m2 = -1.0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn unknown_profile_and_unknown_key() {
        assert!(ModelConfig::profile("nope").is_err());
        let text = ModelConfig::default().to_toml_string() + "\nbogus = 1\n";
        assert!(ModelConfig::from_toml_str(&text).is_err());
    }
}
