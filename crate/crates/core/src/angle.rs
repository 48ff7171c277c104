//! Angle newtype used throughout the toolkit.
//!
//! Angles are stored in radians. Degrees appear only at user boundaries
//! (config files, CLI flags, CSV columns) and are converted on entry.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AngleError {
    #[error("angle must be finite, got {0}")]
    NonFinite(f64),
    #[error("angle {got_deg:.4}° outside open interval (0°, 180°)")]
    OutsideInterior { got_deg: f64 },
}

/// A plane angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleRad(f64);

impl AngleRad {
    pub fn from_radians(value: f64) -> Result<Self, AngleError> {
        if !value.is_finite() {
            return Err(AngleError::NonFinite(value));
        }
        Ok(AngleRad(value))
    }

    pub fn from_degrees(deg: f64) -> Result<Self, AngleError> {
        Self::from_radians(deg * PI / 180.0)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0 * 180.0 / PI
    }

    /// True when the angle lies strictly inside (0, π), the domain where
    /// joint angles are defined.
    pub fn is_interior(self) -> bool {
        self.0 > 0.0 && self.0 < PI
    }

    /// Enforce the joint-angle domain (0, π).
    pub fn require_interior(self) -> Result<Self, AngleError> {
        if self.is_interior() {
            Ok(self)
        } else {
            Err(AngleError::OutsideInterior {
                got_deg: self.degrees(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_round_trip() {
        let a = AngleRad::from_degrees(120.0).unwrap();
        assert!((a.degrees() - 120.0).abs() < 1e-12);
        assert!((a.radians() - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(AngleRad::from_radians(f64::NAN).is_err());
        assert!(AngleRad::from_radians(f64::INFINITY).is_err());
    }

    #[test]
    fn interior_domain_is_open() {
        assert!(!AngleRad::from_radians(0.0).unwrap().is_interior());
        assert!(!AngleRad::from_radians(PI).unwrap().is_interior());
        assert!(AngleRad::from_radians(1.0).unwrap().is_interior());
        assert!(AngleRad::from_degrees(180.0)
            .unwrap()
            .require_interior()
            .is_err());
    }
}
