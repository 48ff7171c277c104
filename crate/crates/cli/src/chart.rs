//! Native SVG line charts and geometry renderings.
//!
//! Plots are plain polylines with axis ticks, generated without a
//! plotting stack so outputs stay deterministic and diffable.

use std::fmt::Write as _;

use crate::io::fmt_num;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Range {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-12 {
            // flat series: open a symmetric band around the value
            let pad = if lo.abs() > 1e-12 { lo.abs() * 0.1 } else { 1.0 };
            return Range { lo: lo - pad, hi: hi + pad };
        }
        Range { lo, hi }
    }

    fn scale(&self, v: f64, out_lo: f64, out_hi: f64) -> f64 {
        out_lo + (v - self.lo) / (self.hi - self.lo) * (out_hi - out_lo)
    }

    fn ticks(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64)
            .collect()
    }
}

/// A single-series line chart with 5 ticks per axis.
pub fn line_chart(
    series: &[(f64, f64)],
    x_label: &str,
    y_label: &str,
    title: &str,
    comment: Option<&str>,
) -> String {
    let xr = Range::of(series.iter().map(|p| p.0));
    let yr = Range::of(series.iter().map(|p| p.1));
    let (x0, x1) = (MARGIN, WIDTH - MARGIN / 2.0);
    let (y0, y1) = (HEIGHT - MARGIN, MARGIN / 2.0);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if let Some(c) = comment {
        let _ = writeln!(out, "<!-- {c} -->");
    }
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        WIDTH / 2.0,
        title
    );
    // axes
    let _ = writeln!(
        out,
        "<path d=\"M{x0},{y1} L{x0},{y0} L{x1},{y0}\" fill=\"none\" stroke=\"black\"/>"
    );
    for t in xr.ticks(5) {
        let px = xr.scale(t, x0, x1);
        let _ = writeln!(out, "<line x1=\"{px}\" y1=\"{y0}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>", y0 + 5.0);
        let _ = writeln!(
            out,
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>",
            y0 + 18.0,
            fmt_num(t)
        );
    }
    for t in yr.ticks(5) {
        let py = yr.scale(t, y0, y1);
        let _ = writeln!(out, "<line x1=\"{}\" y1=\"{py}\" x2=\"{x0}\" y2=\"{py}\" stroke=\"black\"/>", x0 - 5.0);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{}</text>",
            x0 - 8.0,
            py + 4.0,
            fmt_num(t)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        x_label
    );
    let _ = writeln!(
        out,
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 {})\">{}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        y_label
    );

    let mut points = String::new();
    for (i, (x, y)) in series.iter().enumerate() {
        if i > 0 {
            points.push(' ');
        }
        let _ = write!(
            points,
            "{},{}",
            fmt_num(xr.scale(*x, x0, x1)),
            fmt_num(yr.scale(*y, y0, y1))
        );
    }
    let _ = writeln!(out, "<polyline points=\"{points}\" fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\"/>");
    out.push_str("</svg>\n");
    out
}

/// Render a posed chain or planar path in mm coordinates, vertices marked.
pub fn render_polyline_mm(points: &[(f64, f64)], title: &str, comment: Option<&str>) -> String {
    let xr = Range::of(points.iter().map(|p| p.0));
    let yr = Range::of(points.iter().map(|p| p.1));
    let margin = 10.0;
    let (w, h) = (xr.hi - xr.lo + 2.0 * margin, yr.hi - yr.lo + 2.0 * margin);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if let Some(c) = comment {
        let _ = writeln!(out, "<!-- {c} -->");
    }
    // y flipped so +y points up on screen
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}mm\" height=\"{}mm\" viewBox=\"{} {} {} {}\">",
        fmt_num(w),
        fmt_num(h),
        fmt_num(xr.lo - margin),
        fmt_num(-yr.hi - margin),
        fmt_num(w),
        fmt_num(h)
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let mut path = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        let _ = write!(path, "{}{},{}", if i == 0 { 'M' } else { 'L' }, fmt_num(*x), fmt_num(-*y));
        if i + 1 < points.len() {
            path.push(' ');
        }
    }
    let _ = writeln!(out, "<path d=\"{path}\" fill=\"none\" stroke=\"blue\" stroke-width=\"1\"/>");
    for (x, y) in points {
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"1.2\" fill=\"red\"/>",
            fmt_num(*x),
            fmt_num(-*y)
        );
    }
    out.push_str("</svg>\n");
    out
}
