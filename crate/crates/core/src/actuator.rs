//! Actuator specification: links, joints, chambers, constraint layers.
//!
//! An actuator is a planar open chain of rigid links connected by
//! zero-radius joints. Heat-sealed chambers sit across joints and drive
//! them toward target angles when inflated; constraint layers guide the
//! deformation. `validate` checks every structural invariant and returns
//! violations as data rather than failing.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::angle::AngleRad;

/// Default activation threshold: a chamber below this pressure is treated
/// as deflated. 1 kPa is the baseline that keeps a chamber barely inflated.
pub const ACTIVATION_THRESHOLD_KPA: f64 = 1.0;

/// Default maximum supply pressure when the config does not override it.
pub const DEFAULT_MAX_PRESSURE_KPA: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    Basic,
    Parallel,
    SingleChamber,
    MultiState,
    Segmented,
    Bilateral,
}

/// Bending direction of a chamber's pull on a joint. Bilateral actuators
/// pair chambers of opposite sign on the same joint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub id: String,
    pub length_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    pub id: String,
    /// The two links this joint connects.
    pub between: [String; 2],
    /// Flat (deflated) interior angle of the joint.
    pub rest_angle: AngleRad,
}

/// One (joint, deflated angle) entry of a chamber's drive map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDrive {
    pub joint: String,
    /// Deflated angle the chamber imposes at this joint; the angle map
    /// takes it to the inflated angle.
    pub rest_angle: AngleRad,
    #[serde(default)]
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamberSpec {
    pub id: String,
    /// Circumferential length L0: total fabric length across the chamber
    /// in the bending plane. Each of the two faces has length L0/2.
    pub circumferential_length_mm: f64,
    /// Overall chamber length L1 along the actuator. Recorded for
    /// documentation; the kinematics use explicit link lengths instead.
    pub overall_length_mm: f64,
    pub width_mm: f64,
    /// Rest angle of the seal pattern (alpha0 for GPA joints, beta0 for
    /// single-chamber outlines).
    pub rest_angle: AngleRad,
    /// Distance from the joint vertex to the seal line along each limb.
    /// Defaults to L0/4, which makes the flat state exactly taut.
    #[serde(default)]
    pub seal_offset_mm: Option<f64>,
    pub drives: Vec<JointDrive>,
}

impl ChamberSpec {
    /// Face arc length of one fabric face (L0/2).
    pub fn face_length_mm(&self) -> f64 {
        self.circumferential_length_mm / 2.0
    }

    /// Effective seal offset, applying the L0/4 default.
    pub fn seal_offset(&self) -> f64 {
        self.seal_offset_mm
            .unwrap_or(self.circumferential_length_mm / 4.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerSide {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerCoverage {
    Full,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintLayerSpec {
    pub id: String,
    /// Link ids covered by the layer.
    pub span: Vec<String>,
    pub side: LayerSide,
    pub coverage: LayerCoverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuatorSpec {
    pub architecture: Architecture,
    pub links: Vec<LinkSpec>,
    pub joints: Vec<JointSpec>,
    pub chambers: Vec<ChamberSpec>,
    #[serde(default)]
    pub constraint_layers: Vec<ConstraintLayerSpec>,
}

/// Per-chamber inflation pressures in kPa. Chambers absent from the map
/// are at ambient (0 kPa).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InflationState {
    pub pressures_kpa: HashMap<String, f64>,
}

impl InflationState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, chamber: &str, kpa: f64) -> Self {
        self.pressures_kpa.insert(chamber.to_string(), kpa);
        self
    }

    pub fn pressure(&self, chamber: &str) -> f64 {
        self.pressures_kpa.get(chamber).copied().unwrap_or(0.0)
    }
}

/// A single validation finding, pointing at the offending field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Path into the actuator document, e.g. `chambers[2].rest_angle`.
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl ActuatorSpec {
    pub fn link(&self, id: &str) -> Option<&LinkSpec> {
        self.links.iter().find(|l| l.id == id)
    }

    pub fn joint(&self, id: &str) -> Option<&JointSpec> {
        self.joints.iter().find(|j| j.id == id)
    }

    pub fn chamber(&self, id: &str) -> Option<&ChamberSpec> {
        self.chambers.iter().find(|c| c.id == id)
    }

    /// Joints that at least one chamber drives, in joint declaration order.
    pub fn driven_joints(&self) -> Vec<&JointSpec> {
        self.joints
            .iter()
            .filter(|j| {
                self.chambers
                    .iter()
                    .any(|c| c.drives.iter().any(|d| d.joint == j.id))
            })
            .collect()
    }

    /// Links in chain order with the joints between them, walking the
    /// joint graph from the first-declared end link. None when the graph
    /// is not a simple open chain (validate reports why).
    pub fn chain_order(&self) -> Option<(Vec<&LinkSpec>, Vec<&JointSpec>)> {
        if self.links.is_empty() || self.joints.len() + 1 != self.links.len() {
            return None;
        }
        if self.links.len() == 1 {
            return Some((vec![&self.links[0]], vec![]));
        }
        let mut adjacency: HashMap<&str, Vec<(&JointSpec, &str)>> = HashMap::new();
        for joint in &self.joints {
            let [a, b] = [joint.between[0].as_str(), joint.between[1].as_str()];
            adjacency.entry(a).or_default().push((joint, b));
            adjacency.entry(b).or_default().push((joint, a));
        }
        let start = self
            .links
            .iter()
            .find(|l| adjacency.get(l.id.as_str()).is_some_and(|n| n.len() == 1))?;

        let mut links = vec![start];
        let mut joints = Vec::new();
        let mut prev: Option<&str> = None;
        let mut current = start.id.as_str();
        while links.len() < self.links.len() {
            let next = adjacency
                .get(current)?
                .iter()
                .find(|(_, other)| Some(*other) != prev)?;
            joints.push(next.0);
            links.push(self.link(next.1)?);
            prev = Some(current);
            current = next.1;
        }
        Some((links, joints))
    }

    /// Check every structural invariant. Violations are reported as data;
    /// this never fails on any finite input.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();

        let mut link_ids = HashSet::new();
        for (i, link) in self.links.iter().enumerate() {
            if !link_ids.insert(link.id.as_str()) {
                report.push(format!("links[{i}].id"), format!("duplicate link id `{}`", link.id));
            }
            if !(link.length_mm > 0.0 && link.length_mm.is_finite()) {
                report.push(
                    format!("links[{i}].length_mm"),
                    format!("link length must be positive and finite, got {}", link.length_mm),
                );
            }
        }
        if self.links.is_empty() {
            report.push("links", "at least one link is required");
        }

        let mut joint_ids = HashSet::new();
        for (i, joint) in self.joints.iter().enumerate() {
            if !joint_ids.insert(joint.id.as_str()) {
                report.push(format!("joints[{i}].id"), format!("duplicate joint id `{}`", joint.id));
            }
            for (k, link) in joint.between.iter().enumerate() {
                if self.link(link).is_none() {
                    report.push(
                        format!("joints[{i}].between[{k}]"),
                        format!("joint `{}` references unknown link `{link}`", joint.id),
                    );
                }
            }
            if joint.between[0] == joint.between[1] {
                report.push(
                    format!("joints[{i}].between"),
                    format!("joint `{}` must connect two distinct links", joint.id),
                );
            }
            if !joint.rest_angle.is_interior() {
                report.push(
                    format!("joints[{i}].rest_angle"),
                    format!(
                        "rest_angle out of (0, π): {:.4}°",
                        joint.rest_angle.degrees()
                    ),
                );
            }
        }

        self.check_open_chain(&mut report);

        for (i, chamber) in self.chambers.iter().enumerate() {
            self.check_chamber(i, chamber, &mut report);
        }

        for (i, layer) in self.constraint_layers.iter().enumerate() {
            if layer.span.is_empty() {
                report.push(
                    format!("constraint_layers[{i}].span"),
                    format!("constraint layer `{}` has empty span", layer.id),
                );
            }
            for (k, link) in layer.span.iter().enumerate() {
                if self.link(link).is_none() {
                    report.push(
                        format!("constraint_layers[{i}].span[{k}]"),
                        format!("constraint layer `{}` references unknown link `{link}`", layer.id),
                    );
                }
            }
        }

        report
    }

    /// The joint graph must form a simple open chain: every link appears in
    /// at most two joints, no cycles, one connected component.
    fn check_open_chain(&self, report: &mut ValidationReport) {
        if self.joints.len() + 1 != self.links.len() && !self.links.is_empty() {
            report.push(
                "joints",
                format!(
                    "open chain needs exactly {} joints for {} links, got {}",
                    self.links.len().saturating_sub(1),
                    self.links.len(),
                    self.joints.len()
                ),
            );
            return;
        }

        let mut degree: HashMap<&str, usize> = HashMap::new();
        for joint in &self.joints {
            for link in &joint.between {
                *degree.entry(link.as_str()).or_default() += 1;
            }
        }
        for (link, d) in &degree {
            if *d > 2 {
                report.push(
                    "joints",
                    format!("link `{link}` is shared by {d} joints; the chain may not branch"),
                );
            }
        }
        // With n−1 edges and max degree 2, acyclicity follows from
        // connectedness: walk from one end and count reachable links.
        if self.links.len() > 1 && report.ok() {
            let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
            for joint in &self.joints {
                let [a, b] = [joint.between[0].as_str(), joint.between[1].as_str()];
                adjacency.entry(a).or_default().push(b);
                adjacency.entry(b).or_default().push(a);
            }
            let start = self.links[0].id.as_str();
            let mut seen = HashSet::from([start]);
            let mut stack = vec![start];
            while let Some(link) = stack.pop() {
                for next in adjacency.get(link).into_iter().flatten() {
                    if seen.insert(next) {
                        stack.push(next);
                    }
                }
            }
            if seen.len() != self.links.len() {
                report.push("joints", "joint graph does not connect all links into one chain");
            }
        }
    }

    fn check_chamber(&self, i: usize, chamber: &ChamberSpec, report: &mut ValidationReport) {
        if !(chamber.circumferential_length_mm > 0.0 && chamber.circumferential_length_mm.is_finite()) {
            report.push(
                format!("chambers[{i}].circumferential_length_mm"),
                format!("L0 must be positive, got {}", chamber.circumferential_length_mm),
            );
        }
        if !(chamber.width_mm > 0.0 && chamber.width_mm.is_finite()) {
            report.push(
                format!("chambers[{i}].width_mm"),
                format!("width must be positive, got {}", chamber.width_mm),
            );
        }
        if !chamber.rest_angle.is_interior() {
            report.push(
                format!("chambers[{i}].rest_angle"),
                format!("rest_angle out of (0,π): {:.4}°", chamber.rest_angle.degrees()),
            );
        }
        let s = chamber.seal_offset();
        if !(s > 0.0 && s.is_finite()) {
            report.push(
                format!("chambers[{i}].seal_offset_mm"),
                format!("seal offset must be positive, got {s}"),
            );
        } else if chamber.rest_angle.is_interior() {
            // Taut-flat condition: the seal chord at the rest angle must not
            // exceed the face arc length.
            let chord = 2.0 * s * (chamber.rest_angle.radians() / 2.0).sin();
            let face = chamber.face_length_mm();
            if chord > face {
                report.push(
                    format!("chambers[{i}].seal_offset_mm"),
                    format!(
                        "chord {chord:.4} mm at rest angle exceeds face arc length {face:.4} mm"
                    ),
                );
            }
        }
        if chamber.drives.is_empty() {
            report.push(
                format!("chambers[{i}].drives"),
                format!("chamber `{}` must drive at least one joint", chamber.id),
            );
        }
        for (k, drive) in chamber.drives.iter().enumerate() {
            if self.joint(&drive.joint).is_none() {
                report.push(
                    format!("chambers[{i}].drives[{k}].joint"),
                    format!("chamber `{}` drives unknown joint `{}`", chamber.id, drive.joint),
                );
            }
            if !drive.rest_angle.is_interior() {
                report.push(
                    format!("chambers[{i}].drives[{k}].rest_angle"),
                    format!("drive rest_angle out of (0,π): {:.4}°", drive.rest_angle.degrees()),
                );
            }
        }

        if self.architecture == Architecture::Bilateral {
            self.check_bilateral_signs(report);
        }
    }

    /// Bilateral actuators need opposing-sign chambers on every joint that
    /// more than one chamber drives.
    fn check_bilateral_signs(&self, report: &mut ValidationReport) {
        for joint in &self.joints {
            let signs: Vec<Sign> = self
                .chambers
                .iter()
                .flat_map(|c| c.drives.iter())
                .filter(|d| d.joint == joint.id)
                .map(|d| d.sign)
                .collect();
            if signs.len() > 1
                && !(signs.contains(&Sign::Plus) && signs.contains(&Sign::Minus))
                && !report.violations.iter().any(|v| v.message.contains(&joint.id))
            {
                report.push(
                    "chambers",
                    format!(
                        "bilateral joint `{}` needs chambers of opposing sign, got {} same-signed",
                        joint.id,
                        signs.len()
                    ),
                );
            }
        }
    }
}

/// Validate inflation pressures against the actuator and a supply limit.
pub fn validate_state(
    spec: &ActuatorSpec,
    state: &InflationState,
    max_pressure_kpa: f64,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (chamber, &p) in &state.pressures_kpa {
        if spec.chamber(chamber).is_none() {
            report.push(
                format!("state.{chamber}"),
                format!("unknown chamber id `{chamber}`"),
            );
        }
        if !(0.0..=max_pressure_kpa).contains(&p) || !p.is_finite() {
            report.push(
                format!("state.{chamber}"),
                format!("pressure {p} kPa outside [0, {max_pressure_kpa}] kPa"),
            );
        }
    }
    report
}
