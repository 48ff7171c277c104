//! Planar open-chain forward kinematics.
//!
//! A chain is a turtle traversal: start at the base pose, walk each link,
//! and turn at each joint. Joints are zero-radius vertices; the interior
//! angle is measured between adjacent links, with π meaning straight.
//! Positive turns are counterclockwise, so a joint with interior angle θ
//! and positive sign turns the heading by π − θ to the left.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::AngleRad;
use crate::geom::Point2;

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("need one joint angle per interior vertex: {links} links require {} angles, got {angles}", links - 1)]
    LengthMismatch { links: usize, angles: usize },
    #[error("link lengths must be positive and finite, got {0}")]
    BadLinkLength(f64),
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
}

/// Base position and heading of the chain's first link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasePose {
    pub origin: Point2,
    pub heading_rad: f64,
}

impl Default for BasePose {
    fn default() -> Self {
        BasePose {
            origin: Point2::new(0.0, 0.0),
            heading_rad: 0.0,
        }
    }
}

/// Vertices of a posed chain, one more than the number of links.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainPose {
    pub vertices: Vec<Point2>,
    pub joint_angles: Vec<AngleRad>,
}

/// Interior joint angles with a bending sign (bilateral chambers bend the
/// other way). Positive sign bends toward the chamber side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedAngle {
    pub angle: AngleRad,
    pub sign: f64,
}

impl SignedAngle {
    pub fn positive(angle: AngleRad) -> Self {
        SignedAngle { angle, sign: 1.0 }
    }
}

/// Turtle-walk the chain and return every vertex.
pub fn forward_pose(
    link_lengths: &[f64],
    joint_angles: &[AngleRad],
    base: BasePose,
) -> Result<ChainPose, ChainError> {
    let signed: Vec<SignedAngle> = joint_angles
        .iter()
        .map(|&a| SignedAngle::positive(a))
        .collect();
    forward_pose_signed(link_lengths, &signed, base)
}

pub fn forward_pose_signed(
    link_lengths: &[f64],
    joint_angles: &[SignedAngle],
    base: BasePose,
) -> Result<ChainPose, ChainError> {
    if link_lengths.is_empty() || joint_angles.len() != link_lengths.len() - 1 {
        return Err(ChainError::LengthMismatch {
            links: link_lengths.len(),
            angles: joint_angles.len(),
        });
    }
    for &len in link_lengths {
        if !(len > 0.0 && len.is_finite()) {
            return Err(ChainError::BadLinkLength(len));
        }
    }
    if !base.origin.x.is_finite() || !base.origin.y.is_finite() || !base.heading_rad.is_finite() {
        return Err(ChainError::NonFinite("base pose"));
    }

    let mut vertices = Vec::with_capacity(link_lengths.len() + 1);
    let mut heading = base.heading_rad;
    let mut cursor = base.origin;
    vertices.push(cursor);

    for (i, &len) in link_lengths.iter().enumerate() {
        cursor = Point2::new(
            cursor.x + len * heading.cos(),
            cursor.y + len * heading.sin(),
        );
        vertices.push(cursor);
        if i < joint_angles.len() {
            let j = joint_angles[i];
            heading += j.sign * (std::f64::consts::PI - j.angle.radians());
        }
    }

    Ok(ChainPose {
        vertices,
        joint_angles: joint_angles.iter().map(|s| s.angle).collect(),
    })
}
