//! Canonical SVG serialization of seal patterns, one drawing unit = 1 mm.
//!
//! The writer emits a fixed group per element class (`outline`,
//! `perimeter`, `divider`, `constraint`, `chamber`, `port`), omitting
//! groups with nothing in them, and formats every coordinate the same
//! way. The companion parser reads exactly this dialect back, so
//! export → parse → export is byte-identical and coordinates survive to
//! within the 6-decimal (1e-6 mm) grid.

use std::fmt::Write as _;

use crate::geom::Point2;

use super::pattern::{
    ChamberRegion, PatternCheckConfig, SealClass, SealPath, SealPattern, TubePort,
};
use super::FabricateError;

/// Margin added around the pattern bounds for the SVG viewBox.
pub const SVG_MARGIN_MM: f64 = 5.0;

/// Canonical coordinate format: six decimals, trailing zeros trimmed.
fn fmt_mm(v: f64) -> String {
    let mut s = format!("{:.6}", v);
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

fn path_d(points: &[Point2], closed: bool) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{}{},{}", cmd, fmt_mm(p.x), fmt_mm(p.y));
        if i + 1 < points.len() {
            d.push(' ');
        }
    }
    if closed {
        d.push_str(" Z");
    }
    d
}

/// Render the pattern as a standalone SVG 1.1 document. Patterns that
/// fail validation (with the default checks) are refused.
pub fn export_svg(pattern: &SealPattern) -> Result<String, FabricateError> {
    let diags = super::pattern::validate_pattern(pattern, &PatternCheckConfig::default());
    if !diags.is_empty() {
        return Err(FabricateError::InvalidPattern(diags));
    }

    let (min, max) = pattern.bounds();
    let x0 = min.x - SVG_MARGIN_MM;
    let y0 = min.y - SVG_MARGIN_MM;
    let w = (max.x - min.x) + 2.0 * SVG_MARGIN_MM;
    let h = (max.y - min.y) + 2.0 * SVG_MARGIN_MM;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}mm\" height=\"{}mm\" viewBox=\"{} {} {} {}\">",
        fmt_mm(w),
        fmt_mm(h),
        fmt_mm(x0),
        fmt_mm(y0),
        fmt_mm(w),
        fmt_mm(h)
    );

    if !pattern.outline.is_empty() {
        out.push_str("<g id=\"outline\" fill=\"none\" stroke=\"black\">\n");
        let _ = writeln!(out, "<path d=\"{}\"/>", path_d(&pattern.outline, true));
        out.push_str("</g>\n");
    }

    for class in [SealClass::Perimeter, SealClass::Divider, SealClass::Constraint] {
        let paths: Vec<&SealPath> = pattern.seal_lines.iter().filter(|p| p.class == class).collect();
        if paths.is_empty() {
            continue;
        }
        let _ = writeln!(out, "<g id=\"{}\" fill=\"none\" stroke=\"red\">", class.name());
        for p in paths {
            let _ = writeln!(out, "<path d=\"{}\"/>", path_d(&p.points, p.closed));
        }
        out.push_str("</g>\n");
    }

    if !pattern.chamber_regions.is_empty() {
        out.push_str("<g id=\"chamber\" fill=\"none\" stroke=\"blue\">\n");
        for region in &pattern.chamber_regions {
            let _ = writeln!(
                out,
                "<path data-chamber=\"{}\" d=\"{}\"/>",
                region.chamber_id,
                path_d(&region.outline, true)
            );
        }
        out.push_str("</g>\n");
    }

    out.push_str("<g id=\"port\" fill=\"none\" stroke=\"green\">\n");
    let p = &pattern.tube_port;
    let _ = writeln!(
        out,
        "<path d=\"M{},{} l{},{}\"/>",
        fmt_mm(p.position.x),
        fmt_mm(p.position.y),
        fmt_mm(p.direction.x),
        fmt_mm(p.direction.y)
    );
    out.push_str("</g>\n");

    out.push_str("</svg>\n");
    Ok(out)
}

fn parse_point(token: &str) -> Result<Point2, FabricateError> {
    let (x, y) = token
        .split_once(',')
        .ok_or_else(|| FabricateError::SvgParse(format!("bad coordinate pair `{token}`")))?;
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| FabricateError::SvgParse(format!("bad number `{s}`")))
    };
    Ok(Point2::new(parse(x)?, parse(y)?))
}

fn parse_path_d(d: &str) -> Result<(Vec<Point2>, bool), FabricateError> {
    let mut points = Vec::new();
    let mut closed = false;
    for token in d.split_whitespace() {
        if token == "Z" {
            closed = true;
        } else if let Some(rest) = token.strip_prefix('M').or_else(|| token.strip_prefix('L')) {
            points.push(parse_point(rest)?);
        } else {
            return Err(FabricateError::SvgParse(format!("unknown path token `{token}`")));
        }
    }
    Ok((points, closed))
}

fn attr<'a>(tag: &'a str, name: &str) -> Option<&'a str> {
    let key = format!("{name}=\"");
    let start = tag.find(&key)? + key.len();
    let end = tag[start..].find('"')? + start;
    Some(&tag[start..end])
}

/// Parse a document produced by [`export_svg`]. This is the companion
/// import used by tests and the CLI; it understands exactly the canonical
/// dialect, nothing more.
pub fn parse_svg_pattern(text: &str) -> Result<SealPattern, FabricateError> {
    let mut outline = Vec::new();
    let mut seal_lines = Vec::new();
    let mut chamber_regions = Vec::new();
    let mut tube_port = None;

    let mut current_group: Option<String> = None;
    for raw in text.lines() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("<g id=\"") {
            let end = rest
                .find('"')
                .ok_or_else(|| FabricateError::SvgParse("unterminated group id".into()))?;
            current_group = Some(rest[..end].to_string());
        } else if line == "</g>" {
            current_group = None;
        } else if line.starts_with("<path") {
            let group = current_group
                .as_deref()
                .ok_or_else(|| FabricateError::SvgParse("path outside of group".into()))?;
            let d = attr(line, "d")
                .ok_or_else(|| FabricateError::SvgParse("path without d attribute".into()))?;
            match group {
                "outline" => {
                    let (points, _) = parse_path_d(d)?;
                    outline = points;
                }
                "perimeter" | "divider" | "constraint" => {
                    let class = match group {
                        "perimeter" => SealClass::Perimeter,
                        "divider" => SealClass::Divider,
                        _ => SealClass::Constraint,
                    };
                    let (points, closed) = parse_path_d(d)?;
                    seal_lines.push(SealPath { class, points, closed });
                }
                "chamber" => {
                    let id = attr(line, "data-chamber")
                        .ok_or_else(|| FabricateError::SvgParse("chamber path without id".into()))?;
                    let (points, _) = parse_path_d(d)?;
                    chamber_regions.push(ChamberRegion {
                        chamber_id: id.to_string(),
                        outline: points,
                    });
                }
                "port" => {
                    // form: Mx,y ldx,dy
                    let tokens: Vec<&str> = d.split_whitespace().collect();
                    let (pos_tok, dir_tok) = match tokens.as_slice() {
                        [p, d] => (*p, *d),
                        _ => return Err(FabricateError::SvgParse(format!("bad port path `{d}`"))),
                    };
                    let position = parse_point(
                        pos_tok
                            .strip_prefix('M')
                            .ok_or_else(|| FabricateError::SvgParse("port must start with M".into()))?,
                    )?;
                    let direction = parse_point(
                        dir_tok
                            .strip_prefix('l')
                            .ok_or_else(|| FabricateError::SvgParse("port needs an l segment".into()))?,
                    )?;
                    tube_port = Some(TubePort { position, direction });
                }
                other => {
                    return Err(FabricateError::SvgParse(format!("unknown group `{other}`")));
                }
            }
        }
    }

    Ok(SealPattern {
        outline,
        seal_lines,
        chamber_regions,
        tube_port: tube_port
            .ok_or_else(|| FabricateError::SvgParse("document has no port group".into()))?,
    })
}
