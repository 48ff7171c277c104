//! CSV parsing/formatting helpers shared by the subcommands.
//!
//! All numeric output uses a canonical format (six decimals, trailing
//! zeros trimmed) so identical inputs always produce byte-identical
//! files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Canonical number formatting for CSV and report output.
pub fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
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

/// Read a CSV with an exact expected header, returning one `Vec<f64>` per
/// row. Lines starting with `#` are comments.
pub fn read_csv_columns(path: &Path, header: &str) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let first = lines.next().context("empty dataset")?;
    if first != header {
        bail!(
            "unexpected CSV header in {}: got `{first}`, expected `{header}`",
            path.display()
        );
    }
    let ncols = header.split(',').count();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != ncols {
            bail!("line {} of {}: expected {ncols} fields, got {}", i + 2, path.display(), fields.len());
        }
        let mut row = Vec::with_capacity(ncols);
        for f in fields {
            row.push(
                f.trim()
                    .parse::<f64>()
                    .with_context(|| format!("line {} of {}: bad number `{f}`", i + 2, path.display()))?,
            );
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("no data rows in {}", path.display());
    }
    Ok(rows)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Comment line prepended to outputs that were derived from the example
/// (uncalibrated) angle map.
pub const UNCALIBRATED_WATERMARK: &str =
    "# uncalibrated: angle map uses example coefficients; run `gpa calibrate angle`";
