//! Small planar geometry helpers shared by the kinematics and the
//! fabrication pattern checks.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn distance_to(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Segment from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance_to(&self.b)
    }

    /// Distance from a point to this segment.
    pub fn distance_to_point(&self, p: &Point2) -> f64 {
        let (dx, dy) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let len2 = dx * dx + dy * dy;
        if len2 == 0.0 {
            return self.a.distance_to(p);
        }
        let t = (((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / len2).clamp(0.0, 1.0);
        let proj = Point2::new(self.a.x + t * dx, self.a.y + t * dy);
        proj.distance_to(p)
    }

    /// Minimum distance between two segments (0 when they touch or cross).
    pub fn distance_to_segment(&self, other: &Segment) -> f64 {
        if self.proper_crossing(other).is_some() || self.touches(other) {
            return 0.0;
        }
        self.distance_to_point(&other.a)
            .min(self.distance_to_point(&other.b))
            .min(other.distance_to_point(&self.a))
            .min(other.distance_to_point(&self.b))
    }

    /// True when the segments share any point (including endpoint touches
    /// and collinear overlap).
    pub fn touches(&self, other: &Segment) -> bool {
        const EPS: f64 = 1e-9;
        self.distance_to_point(&other.a) < EPS
            || self.distance_to_point(&other.b) < EPS
            || other.distance_to_point(&self.a) < EPS
            || other.distance_to_point(&self.b) < EPS
    }

    /// Transversal interior intersection: both segments cross strictly
    /// inside each other. Endpoint touches and T-junctions do not count.
    pub fn proper_crossing(&self, other: &Segment) -> Option<Point2> {
        let d1 = (self.b.x - self.a.x, self.b.y - self.a.y);
        let d2 = (other.b.x - other.a.x, other.b.y - other.a.y);
        let denom = d1.0 * d2.1 - d1.1 * d2.0;
        if denom.abs() < 1e-12 {
            return None; // parallel or collinear
        }
        let (ex, ey) = (other.a.x - self.a.x, other.a.y - self.a.y);
        let t = (ex * d2.1 - ey * d2.0) / denom;
        let u = (ex * d1.1 - ey * d1.0) / denom;
        const IN: f64 = 1e-9;
        if t > IN && t < 1.0 - IN && u > IN && u < 1.0 - IN {
            Some(Point2::new(self.a.x + t * d1.0, self.a.y + t * d1.1))
        } else {
            None
        }
    }
}
