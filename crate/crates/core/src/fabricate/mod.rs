//! Inverse design and fabrication export: from target inflated geometry
//! back to a deflated seal pattern, and from patterns to SVG drawings and
//! heat-sealer toolpaths.

pub mod gcode;
pub mod pattern;
pub mod svg;

use thiserror::Error;

use crate::actuator::{ActuatorSpec, Architecture};
use crate::angle::AngleRad;
use crate::geom::Point2;
use crate::kinematics::{AngleMap, KinematicsError};
use pattern::{
    ChamberRegion, PatternCheckConfig, PatternDiagnostic, SealClass, SealPath, SealPattern,
    TubePort, DEFAULT_FOOT_WIDTH_MM,
};

#[derive(Debug, Error, PartialEq)]
pub enum FabricateError {
    #[error("expected {expected} target angles (one per driven joint), got {got}")]
    TargetCountMismatch { expected: usize, got: usize },
    #[error("target for joint `{joint}` infeasible: {source}")]
    InfeasibleTarget {
        joint: String,
        #[source]
        source: KinematicsError,
    },
    #[error("actuator spec invalid: {0}")]
    InvalidSpec(String),
    #[error("chambers `{a}` and `{b}` overlap in the flat layout")]
    OverlappingChambers { a: String, b: String },
    #[error("pattern fails validation: {0:?}")]
    InvalidPattern(Vec<PatternDiagnostic>),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("pattern exceeds bed {bed_x} × {bed_y} mm at ({x:.3}, {y:.3})")]
    OutOfBed { bed_x: f64, bed_y: f64, x: f64, y: f64 },
    #[error("svg parse error: {0}")]
    SvgParse(String),
    #[error("gcode parse error: {0}")]
    GcodeParse(String),
}

/// Compute the deflated geometry that inflates into the requested joint
/// angles: each driven joint's rest angle (and the matching chamber drive
/// entries) is set to the inverse image of its target under the angle
/// map. Undriven joints are untouched. Targets are matched to driven
/// joints in joint declaration order.
pub fn inverse_design(
    target_angles: &[AngleRad],
    map: &AngleMap,
    template: &ActuatorSpec,
) -> Result<ActuatorSpec, FabricateError> {
    let driven: Vec<String> = template.driven_joints().iter().map(|j| j.id.clone()).collect();
    if driven.len() != target_angles.len() {
        return Err(FabricateError::TargetCountMismatch {
            expected: driven.len(),
            got: target_angles.len(),
        });
    }

    let mut spec = template.clone();
    for (joint_id, &target) in driven.iter().zip(target_angles) {
        let rest = map
            .invert(target)
            .map_err(|source| FabricateError::InfeasibleTarget { joint: joint_id.clone(), source })?;
        if let Some(joint) = spec.joints.iter_mut().find(|j| &j.id == joint_id) {
            joint.rest_angle = rest;
        }
        for chamber in &mut spec.chambers {
            for drive in &mut chamber.drives {
                if &drive.joint == joint_id {
                    drive.rest_angle = rest;
                }
            }
        }
    }
    // A chamber's pattern rest angle is its widest operating angle.
    for chamber in &mut spec.chambers {
        let max_rest = chamber
            .drives
            .iter()
            .map(|d| d.rest_angle)
            .fold(None::<AngleRad>, |acc, a| match acc {
                Some(m) if m >= a => Some(m),
                _ => Some(a),
            });
        if let Some(rest) = max_rest {
            chamber.rest_angle = rest;
        }
    }

    let report = spec.validate();
    if !report.ok() {
        return Err(FabricateError::InvalidSpec(
            report
                .violations
                .iter()
                .map(|v| format!("{}: {}", v.path, v.message))
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    Ok(spec)
}

struct RowLayout {
    chamber_spans: Vec<(String, f64, f64)>, // (chamber id, x0, x1)
    length_mm: f64,
}

/// Per-chamber x-interval on the unrolled baseline, from the chamber's
/// driven joints and seal offset.
fn row_spans(spec: &ActuatorSpec, chamber_ids: &[String]) -> Result<RowLayout, FabricateError> {
    let (links, joints) = spec
        .chain_order()
        .ok_or_else(|| FabricateError::InvalidSpec("joint graph is not a simple chain".into()))?;
    let mut joint_x = std::collections::HashMap::new();
    let mut x = 0.0;
    for (link, joint) in links.iter().zip(joints.iter()) {
        x += link.length_mm;
        joint_x.insert(joint.id.as_str(), x);
    }
    let total: f64 = links.iter().map(|l| l.length_mm).sum();

    let mut spans = Vec::new();
    for id in chamber_ids {
        let chamber = spec.chamber(id).expect("chamber exists");
        let s = chamber.seal_offset();
        let xs: Vec<f64> = chamber
            .drives
            .iter()
            .filter_map(|d| joint_x.get(d.joint.as_str()).copied())
            .collect();
        if xs.is_empty() {
            continue;
        }
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min) - s;
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + s;
        spans.push((id.clone(), lo, hi));
    }

    // Overlapping chamber pockets cannot share one fabric layer.
    for i in 0..spans.len() {
        for j in (i + 1)..spans.len() {
            let (a, b) = (&spans[i], &spans[j]);
            if a.1 < b.2 && b.1 < a.2 {
                return Err(FabricateError::OverlappingChambers { a: a.0.clone(), b: b.0.clone() });
            }
        }
    }

    Ok(RowLayout { chamber_spans: spans, length_mm: total })
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point2> {
    vec![
        Point2::new(x0, y0),
        Point2::new(x1, y0),
        Point2::new(x1, y1),
        Point2::new(x0, y1),
    ]
}

/// Deterministic flat layout: links unroll along the x baseline, chamber
/// regions sit across their driven joints with the seal offset on either
/// side, dividers close the pockets, and one perimeter seal wraps each
/// row. Parallel architectures stack one congruent row per chamber and
/// share a constraint-attach line between adjacent rows; declared
/// constraint layers attach along lines below the strip. The finished
/// pattern is translated so its outline corner sits at the origin.
pub fn layout_pattern(spec: &ActuatorSpec) -> Result<SealPattern, FabricateError> {
    let report = spec.validate();
    if !report.ok() {
        return Err(FabricateError::InvalidSpec(
            report
                .violations
                .iter()
                .map(|v| format!("{}: {}", v.path, v.message))
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }

    let foot = DEFAULT_FOOT_WIDTH_MM;
    let mut seal_lines = Vec::new();
    let mut chamber_regions = Vec::new();

    // Row assignment: parallel stacks one chamber per row, every other
    // architecture lays all chambers on a single strip.
    let rows: Vec<Vec<String>> = if spec.architecture == Architecture::Parallel {
        spec.chambers.iter().map(|c| vec![c.id.clone()]).collect()
    } else {
        vec![spec.chambers.iter().map(|c| c.id.clone()).collect()]
    };

    let width = spec
        .chambers
        .iter()
        .map(|c| c.width_mm)
        .fold(0.0f64, f64::max)
        .max(10.0);
    let half = width / 2.0;
    let row_pitch = width + 4.0 * foot;

    let mut port: Option<TubePort> = None;
    let mut length_all: f64 = 0.0;

    for (row_idx, row) in rows.iter().enumerate() {
        let layout = row_spans(spec, row)?;
        let y_center = row_idx as f64 * row_pitch;
        let (y_lo, y_hi) = (y_center - half, y_center + half);
        length_all = length_all.max(layout.length_mm);

        seal_lines.push(SealPath {
            class: SealClass::Perimeter,
            points: rect(-foot, y_lo, layout.length_mm + foot, y_hi),
            closed: true,
        });

        for (chamber_id, x0, x1) in &layout.chamber_spans {
            for x in [*x0, *x1] {
                seal_lines.push(SealPath {
                    class: SealClass::Divider,
                    points: vec![Point2::new(x, y_lo), Point2::new(x, y_hi)],
                    closed: false,
                });
            }
            chamber_regions.push(ChamberRegion {
                chamber_id: chamber_id.clone(),
                outline: rect(*x0, y_lo, *x1, y_hi),
            });
            if port.is_none() {
                port = Some(TubePort {
                    position: Point2::new(*x0, y_center),
                    direction: Point2::new(1.0, 0.0),
                });
            }
        }

        // Shared constraint-attach line between adjacent parallel rows.
        if row_idx + 1 < rows.len() {
            let y_shared = y_hi + 2.0 * foot;
            seal_lines.push(SealPath {
                class: SealClass::Constraint,
                points: vec![Point2::new(-foot, y_shared), Point2::new(layout.length_mm + foot, y_shared)],
                closed: false,
            });
        }
    }

    // Declared constraint layers attach along lines below the strip.
    let (links, _) = spec
        .chain_order()
        .ok_or_else(|| FabricateError::InvalidSpec("joint graph is not a simple chain".into()))?;
    let mut link_x = std::collections::HashMap::new();
    let mut x = 0.0;
    for link in &links {
        link_x.insert(link.id.as_str(), (x, x + link.length_mm));
        x += link.length_mm;
    }
    for (k, layer) in spec.constraint_layers.iter().enumerate() {
        let xs: Vec<(f64, f64)> = layer
            .span
            .iter()
            .filter_map(|l| link_x.get(l.as_str()).copied())
            .collect();
        if xs.is_empty() {
            continue;
        }
        let x0 = xs.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let x1 = xs.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let y = -half - 2.0 * foot * (k as f64 + 1.0);
        seal_lines.push(SealPath {
            class: SealClass::Constraint,
            points: vec![Point2::new(x0, y), Point2::new(x1, y)],
            closed: false,
        });
    }

    let port = port.unwrap_or(TubePort {
        position: Point2::new(0.0, 0.0),
        direction: Point2::new(1.0, 0.0),
    });

    let mut pattern = SealPattern {
        outline: vec![],
        seal_lines,
        chamber_regions,
        tube_port: port,
    };
    let (min, max) = pattern.bounds();
    pattern.outline = rect(min.x - foot, min.y - foot, max.x + foot, max.y + foot);
    let (min, _) = pattern.bounds();
    pattern.translate(-min.x, -min.y);

    let diags = pattern::validate_pattern(&pattern, &PatternCheckConfig::default());
    if !diags.is_empty() {
        return Err(FabricateError::InvalidPattern(diags));
    }
    Ok(pattern)
}
