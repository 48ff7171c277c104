//! Project configuration document.
//!
//! The config is a JSON document with user-facing units: angles in
//! degrees, lengths in mm, pressures in kPa. Parsing is strict — unknown
//! keys are rejected with their path and the list of accepted keys — and
//! every semantic rule is checked with a path-qualified message. The
//! parsed [`ProjectConfig`] holds the internal (radian) types, and
//! `to_document` round-trips it back into document form with all
//! defaults filled in, which backs the CLI's `--explain` mode.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actuator::{
    ActuatorSpec, Architecture, ChamberSpec, ConstraintLayerSpec, JointDrive, JointSpec,
    LayerCoverage, LayerSide, LinkSpec, Sign, DEFAULT_MAX_PRESSURE_KPA,
};
use crate::angle::AngleRad;
use crate::calibrate::FsrCalibration;
use crate::fabricate::gcode::MachineConfig;
use crate::fabricate::pattern::DEFAULT_FOOT_WIDTH_MM;
use crate::gait::CrawlerModel;
use crate::kinematics::AngleMap;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config syntax/schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("config value error at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

/// Fully resolved configuration in internal units.
#[derive(Debug, Clone)]
pub struct ProjectConfig {
    pub actuator: ActuatorSpec,
    pub angle_map: AngleMap,
    pub machine: MachineConfig,
    pub crawler: CrawlerModel,
    pub haptics: HapticsConfig,
    pub max_pressure_kpa: f64,
    pub torque_scale: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct HapticsConfig {
    pub f_max_n: f64,
    pub p_max_kpa: f64,
    pub p_base_kpa: f64,
    pub fsr: Option<FsrCalibration>,
}

// ---- document types (degree-facing, strict keys) ----

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    actuator: ActuatorDoc,
    #[serde(default)]
    angle_map: Option<AngleMapDoc>,
    #[serde(default)]
    machine: Option<MachineDoc>,
    #[serde(default)]
    crawler: Option<CrawlerDoc>,
    #[serde(default)]
    haptics: Option<HapticsDoc>,
    #[serde(default)]
    limits: Option<LimitsDoc>,
    #[serde(default)]
    torque_scale: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActuatorDoc {
    architecture: Architecture,
    links: Vec<LinkDoc>,
    joints: Vec<JointDoc>,
    chambers: Vec<ChamberDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constraint_layers: Vec<LayerDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    id: String,
    length_mm: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointDoc {
    id: String,
    between: [String; 2],
    rest_angle_deg: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChamberDoc {
    id: String,
    circumferential_length_mm: f64,
    overall_length_mm: f64,
    width_mm: f64,
    rest_angle_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seal_offset_mm: Option<f64>,
    drives: Vec<DriveDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriveDoc {
    joint: String,
    rest_angle_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<Sign>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    id: String,
    span: Vec<String>,
    side: LayerSide,
    coverage: LayerCoverage,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AngleMapDoc {
    slope: f64,
    intercept_deg: f64,
    domain_deg: [f64; 2],
    #[serde(default)]
    calibrated: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachineDoc {
    bed_mm: [f64; 2],
    seal_feed_mm_min: f64,
    travel_feed_mm_min: f64,
    seal_temp_c: f64,
    dwell_ms: f64,
    #[serde(default = "default_foot")]
    foot_width_mm: f64,
}

fn default_foot() -> f64 {
    DEFAULT_FOOT_WIDTH_MM
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrawlerDoc {
    reach_flex_mm: f64,
    reach_relax_mm: f64,
    reach_ext_mm: f64,
    half_spacing_mm: f64,
    mu_high: f64,
    mu_low: f64,
    mu_body: f64,
    load_share_foot: f64,
    load_share_body: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HapticsDoc {
    f_max_n: f64,
    p_max_kpa: f64,
    #[serde(default = "default_p_base")]
    p_base_kpa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fsr: Option<FsrDoc>,
}

fn default_p_base() -> f64 {
    crate::control::HAPTIC_BASELINE_KPA
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FsrDoc {
    a_kohm: f64,
    b_per_n: f64,
    c_kohm: f64,
    force_range_n: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitsDoc {
    max_pressure_kpa: f64,
}

fn angle_deg(path: String, deg: f64) -> Result<AngleRad, ConfigError> {
    AngleRad::from_degrees(deg).map_err(|e| ConfigError::Invalid { path, message: e.to_string() })
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<ProjectConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ConfigDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Schema {
            path: if path == "." { "<document root>".into() } else { path },
            message: e.inner().to_string(),
        }
    })?;
    resolve(doc)
}

fn resolve(doc: ConfigDoc) -> Result<ProjectConfig, ConfigError> {
    let mut links = Vec::new();
    for l in &doc.actuator.links {
        links.push(LinkSpec { id: l.id.clone(), length_mm: l.length_mm });
    }
    let mut joints = Vec::new();
    for (i, j) in doc.actuator.joints.iter().enumerate() {
        joints.push(JointSpec {
            id: j.id.clone(),
            between: j.between.clone(),
            rest_angle: angle_deg(format!("actuator.joints[{i}].rest_angle_deg"), j.rest_angle_deg)?,
        });
    }
    let mut chambers = Vec::new();
    for (i, c) in doc.actuator.chambers.iter().enumerate() {
        let mut drives = Vec::new();
        for (k, d) in c.drives.iter().enumerate() {
            drives.push(JointDrive {
                joint: d.joint.clone(),
                rest_angle: angle_deg(
                    format!("actuator.chambers[{i}].drives[{k}].rest_angle_deg"),
                    d.rest_angle_deg,
                )?,
                sign: d.sign.unwrap_or_default(),
            });
        }
        chambers.push(ChamberSpec {
            id: c.id.clone(),
            circumferential_length_mm: c.circumferential_length_mm,
            overall_length_mm: c.overall_length_mm,
            width_mm: c.width_mm,
            rest_angle: angle_deg(format!("actuator.chambers[{i}].rest_angle_deg"), c.rest_angle_deg)?,
            seal_offset_mm: c.seal_offset_mm,
            drives,
        });
    }
    let constraint_layers = doc
        .actuator
        .constraint_layers
        .iter()
        .map(|l| ConstraintLayerSpec {
            id: l.id.clone(),
            span: l.span.clone(),
            side: l.side,
            coverage: l.coverage,
        })
        .collect();

    let actuator = ActuatorSpec {
        architecture: doc.actuator.architecture,
        links,
        joints,
        chambers,
        constraint_layers,
    };
    let report = actuator.validate();
    if let Some(v) = report.violations.first() {
        return Err(ConfigError::Invalid {
            path: format!("actuator.{}", v.path),
            message: v.message.clone(),
        });
    }

    let angle_map = match &doc.angle_map {
        None => AngleMap::example_default(),
        Some(m) => {
            let lo = angle_deg("angle_map.domain_deg[0]".into(), m.domain_deg[0])?;
            let hi = angle_deg("angle_map.domain_deg[1]".into(), m.domain_deg[1])?;
            let mut map = AngleMap::new(m.slope, m.intercept_deg.to_radians(), lo, hi)
                .map_err(|e| ConfigError::Invalid { path: "angle_map".into(), message: e.to_string() })?;
            map.calibrated = m.calibrated;
            map
        }
    };

    let machine = match &doc.machine {
        None => MachineConfig::default(),
        Some(m) => {
            for (name, v) in [
                ("machine.seal_feed_mm_min", m.seal_feed_mm_min),
                ("machine.travel_feed_mm_min", m.travel_feed_mm_min),
                ("machine.dwell_ms", m.dwell_ms),
                ("machine.foot_width_mm", m.foot_width_mm),
                ("machine.bed_mm[0]", m.bed_mm[0]),
                ("machine.bed_mm[1]", m.bed_mm[1]),
            ] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(ConfigError::Invalid {
                        path: name.into(),
                        message: format!("must be positive, got {v}"),
                    });
                }
            }
            MachineConfig {
                bed_mm: (m.bed_mm[0], m.bed_mm[1]),
                seal_feed_mm_min: m.seal_feed_mm_min,
                travel_feed_mm_min: m.travel_feed_mm_min,
                seal_temp_c: m.seal_temp_c,
                dwell_ms: m.dwell_ms,
                foot_width_mm: m.foot_width_mm,
            }
        }
    };

    let crawler = match &doc.crawler {
        None => CrawlerModel::default(),
        Some(c) => {
            let model = CrawlerModel {
                reach_flex_mm: c.reach_flex_mm,
                reach_relax_mm: c.reach_relax_mm,
                reach_ext_mm: c.reach_ext_mm,
                half_spacing_mm: c.half_spacing_mm,
                mu_high: c.mu_high,
                mu_low: c.mu_low,
                mu_body: c.mu_body,
                load_share_foot: c.load_share_foot,
                load_share_body: c.load_share_body,
            };
            model.validate().map_err(|e| ConfigError::Invalid {
                path: "crawler".into(),
                message: e.to_string(),
            })?;
            model
        }
    };

    let max_pressure_kpa = doc
        .limits
        .as_ref()
        .map(|l| l.max_pressure_kpa)
        .unwrap_or(DEFAULT_MAX_PRESSURE_KPA);
    if !(max_pressure_kpa > 0.0 && max_pressure_kpa.is_finite()) {
        return Err(ConfigError::Invalid {
            path: "limits.max_pressure_kpa".into(),
            message: format!("must be positive, got {max_pressure_kpa}"),
        });
    }

    let haptics = match &doc.haptics {
        None => HapticsConfig {
            f_max_n: 8.0,
            p_max_kpa: 60.0,
            p_base_kpa: crate::control::HAPTIC_BASELINE_KPA,
            fsr: None,
        },
        Some(h) => {
            if !(h.f_max_n > 0.0) {
                return Err(ConfigError::Invalid {
                    path: "haptics.f_max_n".into(),
                    message: format!("must be positive, got {}", h.f_max_n),
                });
            }
            if !(h.p_max_kpa > h.p_base_kpa) {
                return Err(ConfigError::Invalid {
                    path: "haptics.p_max_kpa".into(),
                    message: format!(
                        "mapping pressure {} kPa must exceed the {} kPa baseline",
                        h.p_max_kpa, h.p_base_kpa
                    ),
                });
            }
            if h.p_max_kpa > max_pressure_kpa {
                return Err(ConfigError::Invalid {
                    path: "haptics.p_max_kpa".into(),
                    message: format!(
                        "{} kPa exceeds limits.max_pressure_kpa = {} kPa",
                        h.p_max_kpa, max_pressure_kpa
                    ),
                });
            }
            let fsr = match &h.fsr {
                None => None,
                Some(f) => {
                    if !(f.a_kohm > 0.0 && f.b_per_n > 0.0) {
                        return Err(ConfigError::Invalid {
                            path: "haptics.fsr".into(),
                            message: "a_kohm and b_per_n must be positive (decreasing curve)".into(),
                        });
                    }
                    Some(FsrCalibration {
                        a_kohm: f.a_kohm,
                        b_per_n: f.b_per_n,
                        c_kohm: f.c_kohm,
                        force_range_n: (f.force_range_n[0], f.force_range_n[1]),
                    })
                }
            };
            HapticsConfig {
                f_max_n: h.f_max_n,
                p_max_kpa: h.p_max_kpa,
                p_base_kpa: h.p_base_kpa,
                fsr,
            }
        }
    };

    let torque_scale = doc.torque_scale.unwrap_or(1.0);
    if !(torque_scale > 0.0 && torque_scale.is_finite()) {
        return Err(ConfigError::Invalid {
            path: "torque_scale".into(),
            message: format!("must be positive, got {torque_scale}"),
        });
    }

    Ok(ProjectConfig {
        actuator,
        angle_map,
        machine,
        crawler,
        haptics,
        max_pressure_kpa,
        torque_scale,
    })
}

impl ProjectConfig {
    /// Serialize back to document form (degrees) with every default made
    /// explicit; `--explain` prints this.
    pub fn to_document(&self) -> serde_json::Value {
        let a = &self.actuator;
        let doc = ConfigDoc {
            actuator: ActuatorDoc {
                architecture: a.architecture,
                links: a
                    .links
                    .iter()
                    .map(|l| LinkDoc { id: l.id.clone(), length_mm: l.length_mm })
                    .collect(),
                joints: a
                    .joints
                    .iter()
                    .map(|j| JointDoc {
                        id: j.id.clone(),
                        between: j.between.clone(),
                        rest_angle_deg: j.rest_angle.degrees(),
                    })
                    .collect(),
                chambers: a
                    .chambers
                    .iter()
                    .map(|c| ChamberDoc {
                        id: c.id.clone(),
                        circumferential_length_mm: c.circumferential_length_mm,
                        overall_length_mm: c.overall_length_mm,
                        width_mm: c.width_mm,
                        rest_angle_deg: c.rest_angle.degrees(),
                        seal_offset_mm: Some(c.seal_offset()),
                        drives: c
                            .drives
                            .iter()
                            .map(|d| DriveDoc {
                                joint: d.joint.clone(),
                                rest_angle_deg: d.rest_angle.degrees(),
                                sign: Some(d.sign),
                            })
                            .collect(),
                    })
                    .collect(),
                constraint_layers: a
                    .constraint_layers
                    .iter()
                    .map(|l| LayerDoc {
                        id: l.id.clone(),
                        span: l.span.clone(),
                        side: l.side,
                        coverage: l.coverage,
                    })
                    .collect(),
            },
            angle_map: Some(AngleMapDoc {
                slope: self.angle_map.slope(),
                intercept_deg: self.angle_map.intercept_rad().to_degrees(),
                domain_deg: [
                    self.angle_map.domain().0.degrees(),
                    self.angle_map.domain().1.degrees(),
                ],
                calibrated: self.angle_map.calibrated,
            }),
            machine: Some(MachineDoc {
                bed_mm: [self.machine.bed_mm.0, self.machine.bed_mm.1],
                seal_feed_mm_min: self.machine.seal_feed_mm_min,
                travel_feed_mm_min: self.machine.travel_feed_mm_min,
                seal_temp_c: self.machine.seal_temp_c,
                dwell_ms: self.machine.dwell_ms,
                foot_width_mm: self.machine.foot_width_mm,
            }),
            crawler: Some(CrawlerDoc {
                reach_flex_mm: self.crawler.reach_flex_mm,
                reach_relax_mm: self.crawler.reach_relax_mm,
                reach_ext_mm: self.crawler.reach_ext_mm,
                half_spacing_mm: self.crawler.half_spacing_mm,
                mu_high: self.crawler.mu_high,
                mu_low: self.crawler.mu_low,
                mu_body: self.crawler.mu_body,
                load_share_foot: self.crawler.load_share_foot,
                load_share_body: self.crawler.load_share_body,
            }),
            haptics: Some(HapticsDoc {
                f_max_n: self.haptics.f_max_n,
                p_max_kpa: self.haptics.p_max_kpa,
                p_base_kpa: self.haptics.p_base_kpa,
                fsr: self.haptics.fsr.map(|f| FsrDoc {
                    a_kohm: f.a_kohm,
                    b_per_n: f.b_per_n,
                    c_kohm: f.c_kohm,
                    force_range_n: [f.force_range_n.0, f.force_range_n.1],
                }),
            }),
            limits: Some(LimitsDoc { max_pressure_kpa: self.max_pressure_kpa }),
            torque_scale: Some(self.torque_scale),
        };
        serde_json::to_value(doc).expect("document serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc() -> String {
        r#"{
            "actuator": {
                "architecture": "basic",
                "links": [
                    {"id": "a", "length_mm": 40.0},
                    {"id": "b", "length_mm": 40.0}
                ],
                "joints": [
                    {"id": "j1", "between": ["a", "b"], "rest_angle_deg": 120.0}
                ],
                "chambers": [
                    {
                        "id": "c1",
                        "circumferential_length_mm": 24.0,
                        "overall_length_mm": 80.0,
                        "width_mm": 20.0,
                        "rest_angle_deg": 120.0,
                        "drives": [{"joint": "j1", "rest_angle_deg": 120.0}]
                    }
                ]
            }
        }"#
        .to_string()
    }

    #[test]
    fn minimal_document_fills_defaults() {
        let cfg = parse_config(&minimal_doc()).unwrap();
        assert_eq!(cfg.max_pressure_kpa, 100.0);
        assert_eq!(cfg.torque_scale, 1.0);
        assert!(!cfg.angle_map.calibrated);
        assert!((cfg.angle_map.slope() - 0.6).abs() < 1e-12);
        assert_eq!(cfg.machine.foot_width_mm, 2.0);
        assert_eq!(cfg.haptics.p_base_kpa, 1.0);
    }

    #[test]
    fn unknown_key_is_rejected_with_path_and_suggestion() {
        let doc = minimal_doc().replace("\"width_mm\"", "\"widht\"");
        let err = parse_config(&doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("widht"), "{msg}");
        assert!(msg.contains("chambers[0]"), "{msg}");
        assert!(msg.contains("width_mm"), "should list the accepted keys: {msg}");
    }

    #[test]
    fn pressure_over_limit_names_field() {
        let doc = minimal_doc().replace(
            "\"actuator\": {",
            "\"haptics\": {\"f_max_n\": 8.0, \"p_max_kpa\": 150.0},\n\"actuator\": {",
        );
        let err = parse_config(&doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("haptics.p_max_kpa"), "{msg}");
        assert!(msg.contains("150"), "{msg}");
    }

    #[test]
    fn actuator_violations_carry_paths() {
        let doc = minimal_doc().replace("\"rest_angle_deg\": 120.0,", "\"rest_angle_deg\": 180.0,");
        let err = parse_config(&doc).unwrap_err();
        assert!(err.to_string().contains("actuator."), "{err}");
    }

    #[test]
    fn explain_round_trip_preserves_values() {
        let cfg = parse_config(&minimal_doc()).unwrap();
        let echoed = cfg.to_document();
        let reparsed = parse_config(&serde_json::to_string_pretty(&echoed).unwrap()).unwrap();
        // the echo makes the seal-offset default explicit
        assert_eq!(reparsed.actuator.chambers[0].seal_offset(), cfg.actuator.chambers[0].seal_offset());
        assert_eq!(reparsed.actuator.joints, cfg.actuator.joints);
        assert_eq!(reparsed.actuator.links, cfg.actuator.links);
        assert_eq!(reparsed.angle_map.slope(), cfg.angle_map.slope());
        assert_eq!(reparsed.crawler, cfg.crawler);
    }

    #[test]
    fn syntax_error_is_reported() {
        let err = parse_config("{ not json").unwrap_err();
        assert!(matches!(err, ConfigError::Schema { .. }));
    }

    #[test]
    fn bad_crawler_ordering_is_rejected() {
        let doc = minimal_doc().replace(
            "\"actuator\": {",
            "\"crawler\": {\"reach_flex_mm\": 20.0, \"reach_relax_mm\": 15.0, \"reach_ext_mm\": 10.0,
              \"half_spacing_mm\": 30.0, \"mu_high\": 0.9, \"mu_low\": 0.1, \"mu_body\": 0.3,
              \"load_share_foot\": 0.25, \"load_share_body\": 0.5},\n\"actuator\": {",
        );
        let err = parse_config(&doc).unwrap_err();
        assert!(err.to_string().contains("crawler"), "{err}");
    }
}
