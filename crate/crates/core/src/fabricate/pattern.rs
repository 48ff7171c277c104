//! Flat seal-pattern document and its validator.

use serde::{Deserialize, Serialize};

use crate::geom::{Point2, Segment};

/// What a seal path does in the finished actuator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SealClass {
    /// Outer airtight boundary of the pouch.
    Perimeter,
    /// Cross seal separating chamber regions.
    Divider,
    /// Attachment line for a constraint layer.
    Constraint,
}

impl SealClass {
    pub fn name(self) -> &'static str {
        match self {
            SealClass::Perimeter => "perimeter",
            SealClass::Divider => "divider",
            SealClass::Constraint => "constraint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SealPath {
    pub class: SealClass,
    pub points: Vec<Point2>,
    pub closed: bool,
}

impl SealPath {
    pub fn segments(&self) -> Vec<Segment> {
        let mut out: Vec<Segment> = self.points.windows(2).map(|w| Segment::new(w[0], w[1])).collect();
        if self.closed && self.points.len() > 2 {
            out.push(Segment::new(*self.points.last().unwrap(), self.points[0]));
        }
        out
    }

    pub fn length_mm(&self) -> f64 {
        self.segments().iter().map(|s| s.length()).sum()
    }
}

/// Closed region that stays unsealed and holds air.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamberRegion {
    pub chamber_id: String,
    pub outline: Vec<Point2>,
}

/// Where the air tube enters the first chamber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubePort {
    pub position: Point2,
    pub direction: Point2,
}

/// Complete 2-D fabrication document: fabric cut outline, seal lines by
/// class, chamber regions, and the tube port. Coordinates in mm with the
/// outline's lower-left corner at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SealPattern {
    pub outline: Vec<Point2>,
    pub seal_lines: Vec<SealPath>,
    pub chamber_regions: Vec<ChamberRegion>,
    pub tube_port: TubePort,
}

impl SealPattern {
    /// Bounding box over every drawn element.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut take = |p: &Point2| {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        };
        for p in &self.outline {
            take(p);
        }
        for path in &self.seal_lines {
            for p in &path.points {
                take(p);
            }
        }
        for region in &self.chamber_regions {
            for p in &region.outline {
                take(p);
            }
        }
        take(&self.tube_port.position);
        (min, max)
    }

    pub fn translate(&mut self, dx: f64, dy: f64) {
        let shift = |p: &mut Point2| {
            p.x += dx;
            p.y += dy;
        };
        self.outline.iter_mut().for_each(&shift);
        for path in &mut self.seal_lines {
            path.points.iter_mut().for_each(&shift);
        }
        for region in &mut self.chamber_regions {
            region.outline.iter_mut().for_each(&shift);
        }
        shift(&mut self.tube_port.position);
    }

    pub fn total_seal_length_mm(&self) -> f64 {
        self.seal_lines.iter().map(|p| p.length_mm()).sum()
    }
}

/// Default sealing-foot width: seal paths closer than this (without
/// touching) cannot be executed by the heat sealer.
pub const DEFAULT_FOOT_WIDTH_MM: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternCheckConfig {
    pub foot_width_mm: f64,
    /// Machine bed (x, y) in mm when geometry should be range-checked.
    pub bed_mm: Option<(f64, f64)>,
}

impl Default for PatternCheckConfig {
    fn default() -> Self {
        PatternCheckConfig { foot_width_mm: DEFAULT_FOOT_WIDTH_MM, bed_mm: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PatternDiagnostic {
    SelfIntersection { path_a: usize, path_b: usize, at: Point2 },
    ClearanceViolation { path_a: usize, path_b: usize, distance_mm: f64 },
    UnenclosedChamber { chamber_id: String, at: Point2 },
    OutOfBed { x: f64, y: f64 },
}

/// Brute-force pattern checks. Diagnostics are data: an empty list means
/// the pattern is fabricable.
pub fn validate_pattern(pattern: &SealPattern, cfg: &PatternCheckConfig) -> Vec<PatternDiagnostic> {
    let mut out = Vec::new();
    let paths: Vec<Vec<Segment>> = pattern.seal_lines.iter().map(|p| p.segments()).collect();

    // Crossings: every segment pair, within and across paths. Adjacent
    // segments of one path share endpoints and are skipped by the
    // proper-crossing test itself.
    for a in 0..paths.len() {
        for b in a..paths.len() {
            'pair: for (i, sa) in paths[a].iter().enumerate() {
                for (j, sb) in paths[b].iter().enumerate() {
                    if a == b && i >= j {
                        continue;
                    }
                    if let Some(at) = sa.proper_crossing(sb) {
                        out.push(PatternDiagnostic::SelfIntersection { path_a: a, path_b: b, at });
                        break 'pair;
                    }
                }
            }
        }
    }

    // Clearance between distinct paths that do not touch anywhere.
    for a in 0..paths.len() {
        for b in (a + 1)..paths.len() {
            let mut min_d = f64::INFINITY;
            let mut touching = false;
            for sa in &paths[a] {
                for sb in &paths[b] {
                    let d = sa.distance_to_segment(sb);
                    if d <= 1e-9 {
                        touching = true;
                        break;
                    }
                    min_d = min_d.min(d);
                }
                if touching {
                    break;
                }
            }
            if !touching && min_d < cfg.foot_width_mm {
                out.push(PatternDiagnostic::ClearanceViolation {
                    path_a: a,
                    path_b: b,
                    distance_mm: min_d,
                });
            }
        }
    }

    // Every chamber region edge must lie on seal geometry.
    for region in &pattern.chamber_regions {
        let n = region.outline.len();
        'edges: for i in 0..n {
            let a = region.outline[i];
            let b = region.outline[(i + 1) % n];
            for probe in [a, Point2::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)] {
                let on_seal = paths
                    .iter()
                    .flatten()
                    .any(|s| s.distance_to_point(&probe) < 1e-6);
                if !on_seal {
                    out.push(PatternDiagnostic::UnenclosedChamber {
                        chamber_id: region.chamber_id.clone(),
                        at: probe,
                    });
                    break 'edges;
                }
            }
        }
    }

    if let Some((bx, by)) = cfg.bed_mm {
        let (min, max) = pattern.bounds();
        if min.x < 0.0 || min.y < 0.0 || max.x > bx || max.y > by {
            let x = if min.x < 0.0 { min.x } else { max.x };
            let y = if min.y < 0.0 { min.y } else { max.y };
            out.push(PatternDiagnostic::OutOfBed { x, y });
        }
    }

    out
}
