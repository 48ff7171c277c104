//! Angle transformation model: contraction factor, affine angle map,
//! multi-chamber state resolution, and inflated-pose computation.
//!
//! Two empirical facts drive this module: the final inflated angle depends
//! on the flat-pattern geometry rather than on pressure (above a small
//! activation threshold), and the map from initial angle α0 to inflated
//! angle α1 is affine over the working range.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actuator::{ActuatorSpec, InflationState, ACTIVATION_THRESHOLD_KPA};
use crate::angle::AngleRad;
use crate::chain::{forward_pose_signed, BasePose, ChainPose, SignedAngle};

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("angle {got_deg:.4}° outside (0°, 180°)")]
    AngleOutOfDomain { got_deg: f64 },
    #[error("α0 {got_deg:.4}° outside map domain [{lo_deg:.4}°, {hi_deg:.4}°]")]
    OutsideMapDomain { got_deg: f64, lo_deg: f64, hi_deg: f64 },
    #[error("α1 {got_deg:.4}° outside map image [{lo_deg:.4}°, {hi_deg:.4}°]")]
    OutsideMapImage { got_deg: f64, lo_deg: f64, hi_deg: f64 },
    #[error("degenerate map: slope must be positive, got {0}")]
    DegenerateSlope(f64),
    #[error("map domain [{lo_deg:.4}°, {hi_deg:.4}°] must lie inside (0°, 180°) with lo < hi")]
    BadDomain { lo_deg: f64, hi_deg: f64 },
    #[error("map image [{lo_deg:.4}°, {hi_deg:.4}°] escapes (0°, 180°)")]
    ImageEscapes { lo_deg: f64, hi_deg: f64 },
    #[error("map must not open joints: α1 > α0 at domain endpoint {at_deg:.4}°")]
    MapOpensJoint { at_deg: f64 },
    #[error("state references unknown chamber `{0}`")]
    UnknownChamber(String),
    #[error("actuator spec invalid: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Chain(#[from] crate::chain::ChainError),
}

/// Affine initial-angle → inflated-angle map with a validity domain.
///
/// `calibrated` is false for the shipped example coefficients; outputs
/// derived from an uncalibrated map are watermarked downstream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleMap {
    slope: f64,
    intercept_rad: f64,
    domain_lo: AngleRad,
    domain_hi: AngleRad,
    #[serde(default)]
    pub calibrated: bool,
}

impl AngleMap {
    pub fn new(
        slope: f64,
        intercept_rad: f64,
        domain_lo: AngleRad,
        domain_hi: AngleRad,
    ) -> Result<Self, KinematicsError> {
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(KinematicsError::DegenerateSlope(slope));
        }
        if !domain_lo.is_interior() || !domain_hi.is_interior() || domain_lo >= domain_hi {
            return Err(KinematicsError::BadDomain {
                lo_deg: domain_lo.degrees(),
                hi_deg: domain_hi.degrees(),
            });
        }
        let map = AngleMap {
            slope,
            intercept_rad,
            domain_lo,
            domain_hi,
            calibrated: false,
        };
        let (img_lo, img_hi) = map.image_rad();
        if img_lo <= 0.0 || img_hi >= PI {
            return Err(KinematicsError::ImageEscapes {
                lo_deg: img_lo.to_degrees(),
                hi_deg: img_hi.to_degrees(),
            });
        }
        // Inflation closes joints: α1 ≤ α0 everywhere on the domain. The
        // map is affine, so checking both endpoints suffices.
        for end in [domain_lo, domain_hi] {
            if map.eval(end.radians()) > end.radians() + 1e-12 {
                return Err(KinematicsError::MapOpensJoint {
                    at_deg: end.degrees(),
                });
            }
        }
        Ok(map)
    }

    /// Example calibration from the characterization figures; slope 0.6,
    /// zero intercept, valid over [20°, 170°]. Marked uncalibrated.
    pub fn example_default() -> Self {
        AngleMap::new(
            0.6,
            0.0,
            AngleRad::from_degrees(20.0).unwrap(),
            AngleRad::from_degrees(170.0).unwrap(),
        )
        .expect("example map is valid")
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn intercept_rad(&self) -> f64 {
        self.intercept_rad
    }

    pub fn domain(&self) -> (AngleRad, AngleRad) {
        (self.domain_lo, self.domain_hi)
    }

    fn eval(&self, alpha0_rad: f64) -> f64 {
        self.slope * alpha0_rad + self.intercept_rad
    }

    fn image_rad(&self) -> (f64, f64) {
        (
            self.eval(self.domain_lo.radians()),
            self.eval(self.domain_hi.radians()),
        )
    }

    /// α1 = a·α0 + b. Errors when α0 is outside the validity domain.
    pub fn apply(&self, alpha0: AngleRad) -> Result<AngleRad, KinematicsError> {
        let a0 = alpha0.radians();
        if a0 < self.domain_lo.radians() || a0 > self.domain_hi.radians() {
            return Err(KinematicsError::OutsideMapDomain {
                got_deg: alpha0.degrees(),
                lo_deg: self.domain_lo.degrees(),
                hi_deg: self.domain_hi.degrees(),
            });
        }
        AngleRad::from_radians(self.eval(a0)).map_err(|_| KinematicsError::AngleOutOfDomain {
            got_deg: alpha0.degrees(),
        })
    }

    /// Inverse of `apply`: the α0 whose image is the requested α1. Errors
    /// outside the map image, naming the feasible interval.
    pub fn invert(&self, alpha1: AngleRad) -> Result<AngleRad, KinematicsError> {
        let (img_lo, img_hi) = self.image_rad();
        let a1 = alpha1.radians();
        if a1 < img_lo || a1 > img_hi {
            return Err(KinematicsError::OutsideMapImage {
                got_deg: alpha1.degrees(),
                lo_deg: img_lo.to_degrees(),
                hi_deg: img_hi.to_degrees(),
            });
        }
        AngleRad::from_radians((a1 - self.intercept_rad) / self.slope)
            .map_err(|_| KinematicsError::AngleOutOfDomain { got_deg: alpha1.degrees() })
    }
}

/// Contraction factor λ = (π − α0)/(π − α1); the ratio by which a joint's
/// supplement contracts from rest to inflated angle.
pub fn contraction_factor(alpha0: AngleRad, alpha1: AngleRad) -> Result<f64, KinematicsError> {
    for a in [alpha0, alpha1] {
        if !a.is_interior() {
            return Err(KinematicsError::AngleOutOfDomain { got_deg: a.degrees() });
        }
    }
    Ok((PI - alpha0.radians()) / (PI - alpha1.radians()))
}

/// One measured (α0, α1, pressure, geometry) sample with its contraction
/// factor, as produced by characterization sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationRecord {
    pub alpha0: AngleRad,
    pub alpha1: AngleRad,
    pub lambda: f64,
    pub pressure_kpa: f64,
    pub circumferential_length_mm: f64,
    pub width_mm: f64,
}

impl CharacterizationRecord {
    pub fn new(
        alpha0: AngleRad,
        alpha1: AngleRad,
        pressure_kpa: f64,
        circumferential_length_mm: f64,
        width_mm: f64,
    ) -> Result<Self, KinematicsError> {
        let lambda = contraction_factor(alpha0, alpha1)?;
        Ok(CharacterizationRecord {
            alpha0,
            alpha1,
            lambda,
            pressure_kpa,
            circumferential_length_mm,
            width_mm,
        })
    }
}

/// Resolution of one joint under an inflation state.
#[derive(Debug, Clone, PartialEq)]
pub struct JointResolution {
    pub joint: String,
    /// Winning chamber, or None when the joint holds its rest angle.
    pub active_chamber: Option<String>,
    /// Deflated angle to feed through the angle map (for active joints) or
    /// to hold as-is (for inactive ones).
    pub rest_target: AngleRad,
    /// +1 bends toward the chamber side, −1 away (bilateral).
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateDiagnostic {
    /// Two chambers tied at the same pressure; declaration order decided.
    TieBrokenByOrder { joint: String, winner: String, loser: String },
    /// Antagonist chambers active together on a bilateral joint.
    CoContraction { joint: String, chambers: Vec<String> },
}

impl std::fmt::Display for StateDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateDiagnostic::TieBrokenByOrder { joint, winner, loser } => write!(
                f,
                "joint `{joint}`: chambers `{winner}` and `{loser}` tied; `{winner}` wins by declaration order"
            ),
            StateDiagnostic::CoContraction { joint, chambers } => write!(
                f,
                "joint `{joint}`: antagonist co-contraction among {}; resolved toward the higher pressure",
                chambers
                    .iter()
                    .map(|c| format!("`{c}`"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedJointState {
    pub joints: Vec<JointResolution>,
    pub diagnostics: Vec<StateDiagnostic>,
}

/// Decide, per joint, which chamber (if any) wins under the given state.
///
/// Among chambers driving a joint above the activation threshold the
/// highest pressure wins; ties go to the first-declared chamber. A joint
/// with no active chamber holds its rest angle. Antagonist co-activation
/// on bilateral joints resolves toward the higher pressure and is
/// reported as a co-contraction diagnostic.
pub fn resolve_state(
    spec: &ActuatorSpec,
    state: &InflationState,
) -> Result<ResolvedJointState, KinematicsError> {
    for chamber in state.pressures_kpa.keys() {
        if spec.chamber(chamber).is_none() {
            return Err(KinematicsError::UnknownChamber(chamber.clone()));
        }
    }

    let mut joints = Vec::with_capacity(spec.joints.len());
    let mut diagnostics = Vec::new();

    for joint in &spec.joints {
        // Candidates in declaration order: (chamber id, pressure, drive).
        let mut candidates = Vec::new();
        for chamber in &spec.chambers {
            if let Some(drive) = chamber.drives.iter().find(|d| d.joint == joint.id) {
                let p = state.pressure(&chamber.id);
                if p > ACTIVATION_THRESHOLD_KPA {
                    candidates.push((chamber.id.clone(), p, drive));
                }
            }
        }

        let Some(winner) = candidates
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| {
                // Highest pressure wins; on exact ties the earlier
                // declaration wins, so compare indices in reverse.
                a.1.partial_cmp(&b.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(ib.cmp(ia))
            })
            .map(|(i, _)| i)
        else {
            joints.push(JointResolution {
                joint: joint.id.clone(),
                active_chamber: None,
                rest_target: joint.rest_angle,
                sign: 1.0,
            });
            continue;
        };

        let (win_id, win_p, win_drive) = &candidates[winner];
        for (i, (id, p, drive)) in candidates.iter().enumerate() {
            if i == winner {
                continue;
            }
            if *p == *win_p {
                diagnostics.push(StateDiagnostic::TieBrokenByOrder {
                    joint: joint.id.clone(),
                    winner: win_id.clone(),
                    loser: id.clone(),
                });
            }
            if drive.sign != win_drive.sign {
                diagnostics.push(StateDiagnostic::CoContraction {
                    joint: joint.id.clone(),
                    chambers: candidates.iter().map(|(c, _, _)| c.clone()).collect(),
                });
            }
        }

        joints.push(JointResolution {
            joint: joint.id.clone(),
            active_chamber: Some(win_id.clone()),
            rest_target: win_drive.rest_angle,
            sign: win_drive.sign.factor(),
        });
    }

    Ok(ResolvedJointState { joints, diagnostics })
}

/// Result of an inflated-pose computation, with the diagnostics that
/// arose while resolving the state.
#[derive(Debug, Clone, PartialEq)]
pub struct InflatedPose {
    pub pose: ChainPose,
    pub diagnostics: Vec<StateDiagnostic>,
}

/// Pose the actuator under an inflation state: resolve chamber winners,
/// map active rest angles through the angle map, hold inactive joints at
/// rest, and run forward kinematics. The result depends only on the set
/// of active chambers, never on how far above threshold the pressures
/// sit.
pub fn inflate_pose(
    spec: &ActuatorSpec,
    state: &InflationState,
    map: &AngleMap,
    base: BasePose,
) -> Result<InflatedPose, KinematicsError> {
    let report = spec.validate();
    if !report.ok() {
        return Err(KinematicsError::InvalidSpec(
            report
                .violations
                .iter()
                .map(|v| format!("{}: {}", v.path, v.message))
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }

    let resolved = resolve_state(spec, state)?;
    let (chain_links, chain_joints) = spec
        .chain_order()
        .ok_or_else(|| KinematicsError::InvalidSpec("joint graph is not a simple chain".into()))?;

    let mut signed = Vec::with_capacity(chain_joints.len());
    for joint in &chain_joints {
        let res = resolved
            .joints
            .iter()
            .find(|r| r.joint == joint.id)
            .expect("every joint is resolved");
        let angle = if res.active_chamber.is_some() {
            map.apply(res.rest_target)?
        } else {
            res.rest_target
        };
        signed.push(SignedAngle { angle, sign: res.sign });
    }

    let lengths: Vec<f64> = chain_links.iter().map(|l| l.length_mm).collect();
    let pose = forward_pose_signed(&lengths, &signed, base)?;
    Ok(InflatedPose {
        pose,
        diagnostics: resolved.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actuator::{
        Architecture, ChamberSpec, JointDrive, JointSpec, LinkSpec, Sign,
    };

    fn deg(v: f64) -> AngleRad {
        AngleRad::from_degrees(v).unwrap()
    }

    fn map_05_30() -> AngleMap {
        AngleMap::new(0.5, deg(30.0).radians(), deg(70.0), deg(170.0)).unwrap()
    }

    #[test]
    fn lambda_identity_case() {
        let l = contraction_factor(deg(90.0), deg(90.0)).unwrap();
        assert!((l - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_direct_arithmetic() {
        let l = contraction_factor(deg(120.0), deg(60.0)).unwrap();
        assert!((l - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lambda_domain_error_at_boundary() {
        assert!(contraction_factor(deg(180.0), deg(90.0)).is_err());
        assert!(contraction_factor(deg(90.0), deg(0.0)).is_err());
    }

    #[test]
    fn lambda_round_trip() {
        // α1 reconstructed from λ must reproduce the input.
        for (a0, a1) in [(120.0, 60.0), (150.0, 100.0), (45.0, 20.0)] {
            let l = contraction_factor(deg(a0), deg(a1)).unwrap();
            let back = PI - (PI - deg(a0).radians()) / l;
            assert!((back - deg(a1).radians()).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_affine_arithmetic() {
        let a1 = map_05_30().apply(deg(120.0)).unwrap();
        assert!((a1.degrees() - 90.0).abs() < 1e-12);
    }

    #[test]
    fn identity_map_is_allowed() {
        let id = AngleMap::new(1.0, 0.0, deg(10.0), deg(170.0)).unwrap();
        for a in [15.0, 90.0, 169.0] {
            assert!((id.apply(deg(a)).unwrap().degrees() - a).abs() < 1e-12);
        }
    }

    #[test]
    fn invert_affine_arithmetic() {
        let a0 = map_05_30().invert(deg(90.0)).unwrap();
        assert!((a0.degrees() - 120.0).abs() < 1e-12);
    }

    #[test]
    fn invert_apply_round_trip_100_points() {
        let map = map_05_30();
        let (lo, hi) = (70.0, 170.0);
        for i in 0..100 {
            let a0 = deg(lo + (hi - lo) * (i as f64 + 0.5) / 100.0);
            let a1 = map.apply(a0).unwrap();
            let back = map.invert(a1).unwrap();
            assert!((back.radians() - a0.radians()).abs() < 1e-12);
        }
    }

    #[test]
    fn invert_below_image_names_interval() {
        let err = map_05_30().invert(deg(10.0)).unwrap_err();
        match err {
            KinematicsError::OutsideMapImage { lo_deg, hi_deg, .. } => {
                assert!((lo_deg - 65.0).abs() < 1e-9);
                assert!((hi_deg - 115.0).abs() < 1e-9);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn map_that_opens_joints_is_rejected() {
        // slope 1, intercept +20°: α1 > α0 everywhere.
        let err = AngleMap::new(1.0, deg(20.0).radians(), deg(30.0), deg(120.0)).unwrap_err();
        assert!(matches!(err, KinematicsError::MapOpensJoint { .. }));
    }

    #[test]
    fn zero_slope_rejected_at_construction() {
        assert!(matches!(
            AngleMap::new(0.0, 0.1, deg(30.0), deg(120.0)),
            Err(KinematicsError::DegenerateSlope(_))
        ));
    }

    /// Generate records from known coefficients, fit-free: applying the
    /// same map must reproduce each record's α1 to 1e-9.
    #[test]
    fn generated_records_reproduced_by_apply() {
        let map = AngleMap::new(0.7, deg(10.0).radians(), deg(40.0), deg(170.0)).unwrap();
        for i in 0..50 {
            let a0 = 40.0 + 130.0 * (i as f64) / 49.0;
            let expected = 0.7 * deg(a0).radians() + deg(10.0).radians();
            let got = map.apply(deg(a0)).unwrap().radians();
            assert!((got - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn apply_is_monotone() {
        let map = map_05_30();
        let mut prev = map.apply(deg(70.0)).unwrap().radians();
        for i in 1..200 {
            let a0 = 70.0 + 100.0 * (i as f64) / 199.0;
            let cur = map.apply(deg(a0)).unwrap().radians();
            assert!(cur > prev);
            prev = cur;
        }
    }

    fn multi_state_spec() -> ActuatorSpec {
        ActuatorSpec {
            architecture: Architecture::MultiState,
            links: vec![
                LinkSpec { id: "l0".into(), length_mm: 30.0 },
                LinkSpec { id: "l1".into(), length_mm: 30.0 },
                LinkSpec { id: "l2".into(), length_mm: 30.0 },
            ],
            joints: vec![
                JointSpec {
                    id: "j0".into(),
                    between: ["l0".into(), "l1".into()],
                    rest_angle: deg(170.0),
                },
                JointSpec {
                    id: "j1".into(),
                    between: ["l1".into(), "l2".into()],
                    rest_angle: deg(170.0),
                },
            ],
            chambers: vec![
                ChamberSpec {
                    id: "pinch".into(),
                    circumferential_length_mm: 24.0,
                    overall_length_mm: 60.0,
                    width_mm: 20.0,
                    rest_angle: deg(120.0),
                    seal_offset_mm: None,
                    drives: vec![
                        JointDrive { joint: "j0".into(), rest_angle: deg(120.0), sign: Sign::Plus },
                        JointDrive { joint: "j1".into(), rest_angle: deg(100.0), sign: Sign::Plus },
                    ],
                },
                ChamberSpec {
                    id: "grasp".into(),
                    circumferential_length_mm: 24.0,
                    overall_length_mm: 60.0,
                    width_mm: 20.0,
                    rest_angle: deg(90.0),
                    seal_offset_mm: None,
                    drives: vec![
                        JointDrive { joint: "j0".into(), rest_angle: deg(90.0), sign: Sign::Plus },
                        JointDrive { joint: "j1".into(), rest_angle: deg(90.0), sign: Sign::Plus },
                    ],
                },
            ],
            constraint_layers: vec![],
        }
    }

    #[test]
    fn no_inflation_holds_rest_angles() {
        let spec = multi_state_spec();
        let resolved = resolve_state(&spec, &InflationState::new()).unwrap();
        for (res, joint) in resolved.joints.iter().zip(&spec.joints) {
            assert_eq!(res.active_chamber, None);
            assert_eq!(res.rest_target, joint.rest_angle);
        }
        assert!(resolved.diagnostics.is_empty());
    }

    #[test]
    fn pinch_only_drives_pinch_targets() {
        let spec = multi_state_spec();
        let map = AngleMap::example_default();
        let state = InflationState::new().with("pinch", 50.0);
        let resolved = resolve_state(&spec, &state).unwrap();
        assert_eq!(resolved.joints[0].active_chamber.as_deref(), Some("pinch"));
        assert_eq!(resolved.joints[1].active_chamber.as_deref(), Some("pinch"));

        let inflated = inflate_pose(&spec, &state, &map, BasePose::default()).unwrap();
        let expect0 = map.apply(deg(120.0)).unwrap();
        let expect1 = map.apply(deg(100.0)).unwrap();
        assert!((inflated.pose.joint_angles[0].radians() - expect0.radians()).abs() < 1e-12);
        assert!((inflated.pose.joint_angles[1].radians() - expect1.radians()).abs() < 1e-12);
    }

    #[test]
    fn pressure_tie_goes_to_first_declared() {
        let spec = multi_state_spec();
        let state = InflationState::new().with("pinch", 50.0).with("grasp", 50.0);
        let resolved = resolve_state(&spec, &state).unwrap();
        assert_eq!(resolved.joints[0].active_chamber.as_deref(), Some("pinch"));
        assert!(resolved
            .diagnostics
            .iter()
            .any(|d| matches!(d, StateDiagnostic::TieBrokenByOrder { .. })));
    }

    #[test]
    fn higher_pressure_wins() {
        let spec = multi_state_spec();
        let state = InflationState::new().with("pinch", 30.0).with("grasp", 60.0);
        let resolved = resolve_state(&spec, &state).unwrap();
        assert_eq!(resolved.joints[0].active_chamber.as_deref(), Some("grasp"));
    }

    #[test]
    fn unknown_chamber_in_state_errors() {
        let spec = multi_state_spec();
        let state = InflationState::new().with("ghost", 10.0);
        assert!(matches!(
            resolve_state(&spec, &state),
            Err(KinematicsError::UnknownChamber(_))
        ));
    }

    #[test]
    fn pose_is_pressure_invariant_above_threshold() {
        let spec = multi_state_spec();
        let map = AngleMap::example_default();
        let a = inflate_pose(
            &spec,
            &InflationState::new().with("pinch", 40.0),
            &map,
            BasePose::default(),
        )
        .unwrap();
        let b = inflate_pose(
            &spec,
            &InflationState::new().with("pinch", 80.0),
            &map,
            BasePose::default(),
        )
        .unwrap();
        assert_eq!(a.pose, b.pose);
    }

    #[test]
    fn subthreshold_pressure_is_deflated() {
        let spec = multi_state_spec();
        let map = AngleMap::example_default();
        let low = inflate_pose(
            &spec,
            &InflationState::new().with("pinch", 0.5),
            &map,
            BasePose::default(),
        )
        .unwrap();
        let rest = inflate_pose(&spec, &InflationState::new(), &map, BasePose::default()).unwrap();
        assert_eq!(low.pose, rest.pose);
    }

    /// Four-joint segmented actuator with alternating chambers active:
    /// the pose is pinned by composing the map arithmetic with an
    /// independent complex-rotation walk of the chain.
    #[test]
    fn segmented_alternating_chambers_match_composition_oracle() {
        use crate::actuator::{Architecture, LinkSpec};
        let n = 4usize;
        let spec = ActuatorSpec {
            architecture: Architecture::Segmented,
            links: (0..=n)
                .map(|i| LinkSpec { id: format!("l{i}"), length_mm: 30.0 })
                .collect(),
            joints: (0..n)
                .map(|i| JointSpec {
                    id: format!("j{i}"),
                    between: [format!("l{i}"), format!("l{}", i + 1)],
                    rest_angle: deg(150.0),
                })
                .collect(),
            chambers: (0..n)
                .map(|i| ChamberSpec {
                    id: format!("c{i}"),
                    circumferential_length_mm: 19.0,
                    overall_length_mm: 30.0,
                    width_mm: 20.0,
                    rest_angle: deg(150.0),
                    seal_offset_mm: None,
                    drives: vec![JointDrive {
                        joint: format!("j{i}"),
                        rest_angle: deg(150.0),
                        sign: Sign::Plus,
                    }],
                })
                .collect(),
            constraint_layers: vec![],
        };
        let map = AngleMap::example_default();
        let state = InflationState::new().with("c0", 50.0).with("c2", 50.0);
        let posed = inflate_pose(&spec, &state, &map, BasePose::default()).unwrap();

        // oracle: expected angles from the affine arithmetic, vertices
        // from an independent complex-number heading accumulation
        let rest = deg(150.0).radians();
        let inflated = 0.6 * rest;
        let expected_angles = [inflated, rest, inflated, rest];
        let (mut re, mut im) = (1.0f64, 0.0f64);
        let (mut x, mut y) = (0.0f64, 0.0f64);
        let mut expected_vertices = vec![(0.0, 0.0)];
        for i in 0..=n - 1 + 1 {
            x += 30.0 * re;
            y += 30.0 * im;
            expected_vertices.push((x, y));
            if i < n {
                let delta = PI - expected_angles[i];
                let (c, s) = (delta.cos(), delta.sin());
                let (nre, nim) = (re * c - im * s, re * s + im * c);
                re = nre;
                im = nim;
            }
        }
        for (got, want) in posed.pose.joint_angles.iter().zip(expected_angles) {
            assert!((got.radians() - want).abs() < 1e-12);
        }
        for (got, want) in posed.pose.vertices.iter().zip(expected_vertices) {
            assert!(
                (got.x - want.0).abs() < 1e-9 && (got.y - want.1).abs() < 1e-9,
                "({}, {}) vs {:?}",
                got.x,
                got.y,
                want
            );
        }
    }

    #[test]
    fn characterization_record_lambda_by_construction() {
        let rec = CharacterizationRecord::new(deg(120.0), deg(60.0), 50.0, 24.0, 20.0).unwrap();
        let direct = (PI - rec.alpha0.radians()) / (PI - rec.alpha1.radians());
        assert!((rec.lambda - direct).abs() < 1e-12);
    }

    #[test]
    fn kinematics_ignores_width_and_l0() {
        let mut spec = multi_state_spec();
        let map = AngleMap::example_default();
        let state = InflationState::new().with("grasp", 50.0);
        let before = inflate_pose(&spec, &state, &map, BasePose::default()).unwrap();
        spec.chambers[1].width_mm = 55.0;
        spec.chambers[1].circumferential_length_mm = 34.0;
        let after = inflate_pose(&spec, &state, &map, BasePose::default()).unwrap();
        assert_eq!(before.pose, after.pose);
    }
}
