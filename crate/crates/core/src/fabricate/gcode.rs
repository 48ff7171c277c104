//! Heat-sealer toolpath program and G-code emission.
//!
//! The dialect is the minimal subset a converted 3D printer understands,
//! documented bit-exactly in `docs/gcode.md`: millimeter units, absolute
//! positioning, linear moves with feed rates, dwell, and hotend-style
//! temperature control for the sealing foot. The tool seals at Z0 and
//! travels lifted at the safe height.

use std::fmt::Write as _;

use serde::Serialize;

use super::pattern::{PatternCheckConfig, SealPattern};
use super::FabricateError;

/// Tool lift height for travel moves.
pub const Z_SAFE_MM: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MachineConfig {
    pub bed_mm: (f64, f64),
    pub seal_feed_mm_min: f64,
    pub travel_feed_mm_min: f64,
    pub seal_temp_c: f64,
    pub dwell_ms: f64,
    /// Sealing-foot width; patterns are validated against it before any
    /// program is emitted.
    pub foot_width_mm: f64,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig {
            bed_mm: (220.0, 220.0),
            seal_feed_mm_min: 300.0,
            travel_feed_mm_min: 1200.0,
            seal_temp_c: 200.0,
            dwell_ms: 500.0,
            foot_width_mm: super::pattern::DEFAULT_FOOT_WIDTH_MM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ToolMove {
    /// Rapid XY move with the tool lifted.
    Travel { x: f64, y: f64 },
    /// Lower the sealing foot to the fabric.
    ToolDown,
    /// Lift the sealing foot to the safe height.
    ToolUp,
    /// Hold position, milliseconds.
    Dwell { ms: f64 },
    /// Linear sealing move at the seal feed.
    Seal { x: f64, y: f64 },
}

/// Machine program: setup preamble, ordered motion commands, shutdown
/// postamble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolpathProgram {
    pub preamble: Vec<String>,
    pub moves: Vec<ToolMove>,
    pub postamble: Vec<String>,
    pub machine: MachineConfig,
}

fn fmt_coord(v: f64) -> String {
    let mut s = format!("{:.3}", v);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

impl ToolpathProgram {
    /// Render the program in the documented dialect.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.preamble {
            out.push_str(line);
            out.push('\n');
        }
        for mv in &self.moves {
            match *mv {
                ToolMove::Travel { x, y } => {
                    let _ = writeln!(
                        out,
                        "G0 X{} Y{} F{}",
                        fmt_coord(x),
                        fmt_coord(y),
                        fmt_coord(self.machine.travel_feed_mm_min)
                    );
                }
                ToolMove::ToolDown => out.push_str("G0 Z0\n"),
                ToolMove::ToolUp => {
                    let _ = writeln!(out, "G0 Z{}", fmt_coord(Z_SAFE_MM));
                }
                ToolMove::Dwell { ms } => {
                    let _ = writeln!(out, "G4 P{}", fmt_coord(ms));
                }
                ToolMove::Seal { x, y } => {
                    let _ = writeln!(
                        out,
                        "G1 X{} Y{} F{}",
                        fmt_coord(x),
                        fmt_coord(y),
                        fmt_coord(self.machine.seal_feed_mm_min)
                    );
                }
            }
        }
        for line in &self.postamble {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    /// Total length of sealing moves (tool down, G1).
    pub fn sealing_length_mm(&self) -> f64 {
        let mut total = 0.0;
        let mut pos = (0.0f64, 0.0f64);
        let mut down = false;
        for mv in &self.moves {
            match *mv {
                ToolMove::Travel { x, y } => pos = (x, y),
                ToolMove::ToolDown => down = true,
                ToolMove::ToolUp => down = false,
                ToolMove::Dwell { .. } => {}
                ToolMove::Seal { x, y } => {
                    if down {
                        total += (x - pos.0).hypot(y - pos.1);
                    }
                    pos = (x, y);
                }
            }
        }
        total
    }
}

/// Generate the sealing program for a pattern. Every seal path is traced
/// once at the seal feed with a dwell at its start; travels run lifted at
/// the travel feed. Paths are ordered lexicographically by class name and
/// then by start point, so identical patterns give identical programs.
pub fn export_gcode(
    pattern: &SealPattern,
    machine: &MachineConfig,
) -> Result<ToolpathProgram, FabricateError> {
    if !(machine.seal_feed_mm_min > 0.0) {
        return Err(FabricateError::NonPositive {
            name: "seal feed",
            value: machine.seal_feed_mm_min,
        });
    }
    if !(machine.travel_feed_mm_min > 0.0) {
        return Err(FabricateError::NonPositive {
            name: "travel feed",
            value: machine.travel_feed_mm_min,
        });
    }

    let diags = super::pattern::validate_pattern(
        pattern,
        &PatternCheckConfig {
            foot_width_mm: machine.foot_width_mm,
            bed_mm: Some(machine.bed_mm),
        },
    );
    if let Some(oob) = diags.iter().find_map(|d| match d {
        super::pattern::PatternDiagnostic::OutOfBed { x, y } => Some((*x, *y)),
        _ => None,
    }) {
        return Err(FabricateError::OutOfBed {
            bed_x: machine.bed_mm.0,
            bed_y: machine.bed_mm.1,
            x: oob.0,
            y: oob.1,
        });
    }
    if !diags.is_empty() {
        return Err(FabricateError::InvalidPattern(diags));
    }

    let mut order: Vec<usize> = (0..pattern.seal_lines.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&pattern.seal_lines[a], &pattern.seal_lines[b]);
        pa.class
            .name()
            .cmp(pb.class.name())
            .then_with(|| {
                let (sa, sb) = (pa.points[0], pb.points[0]);
                sa.x.partial_cmp(&sb.x)
                    .unwrap()
                    .then(sa.y.partial_cmp(&sb.y).unwrap())
            })
    });

    let mut moves = Vec::new();
    for idx in order {
        let path = &pattern.seal_lines[idx];
        if path.points.is_empty() {
            continue;
        }
        let start = path.points[0];
        moves.push(ToolMove::Travel { x: start.x, y: start.y });
        moves.push(ToolMove::ToolDown);
        moves.push(ToolMove::Dwell { ms: machine.dwell_ms });
        for p in &path.points[1..] {
            moves.push(ToolMove::Seal { x: p.x, y: p.y });
        }
        if path.closed && path.points.len() > 2 {
            moves.push(ToolMove::Seal { x: start.x, y: start.y });
        }
        moves.push(ToolMove::ToolUp);
    }

    Ok(ToolpathProgram {
        preamble: vec![
            "G21".into(),
            "G90".into(),
            format!("M104 S{}", fmt_coord(machine.seal_temp_c)),
            format!("G0 Z{} F{}", fmt_coord(Z_SAFE_MM), fmt_coord(machine.travel_feed_mm_min)),
        ],
        moves,
        postamble: vec![
            format!("G0 Z{}", fmt_coord(Z_SAFE_MM)),
            "M104 S0".into(),
            "M2".into(),
        ],
        machine: *machine,
    })
}
