//! Result table and metadata sidecar.
//!
//! The CSV column set and order are fixed: `zeta`, then every reported scalar
//! followed by its `_se`, then `im_residual_max`. Undefined values (`g²` of an
//! empty mode) are written as empty fields. Floats use Rust's shortest
//! round-trip formatting, so identical results give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use shgsim_core::observables::QUANTITY_NAMES;
use shgsim_core::ReportWithErrors;

use crate::config::SimConfig;
use crate::error::{Result, RunError};

pub fn csv_header() -> String {
    let mut cols = vec!["zeta".to_string()];
    for name in QUANTITY_NAMES {
        cols.push(name.to_string());
        cols.push(format!("{name}_se"));
    }
    cols.push("im_residual_max".into());
    cols.join(",")
}

fn field(out: &mut String, v: Option<f64>) {
    out.push(',');
    if let Some(v) = v {
        write!(out, "{v}").expect("string write");
    }
}

pub fn csv_row(r: &ReportWithErrors) -> String {
    let mut out = format!("{}", r.report.zeta);
    let values = r.report.values();
    for (v, se) in values.into_iter().zip(r.se) {
        field(&mut out, v);
        field(&mut out, se);
    }
    field(&mut out, Some(r.im_residual_max));
    out
}

pub fn to_csv(rows: &[ReportWithErrors]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| RunError::io(path, e))
}

#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub config: &'a SimConfig,
    pub seed: u64,
    pub code_version: &'static str,
    pub wall_time_s: f64,
    pub divergence_count: u64,
    pub workers: usize,
    pub columns: Vec<String>,
}

pub fn metadata_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Sibling path with `suffix` inserted before the extension.
pub fn with_suffix(csv: &Path, suffix: &str) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = csv
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    csv.with_file_name(format!("{stem}{suffix}.{ext}"))
}

pub fn write_metadata(csv: &Path, meta: &Metadata) -> Result<PathBuf> {
    let path = metadata_path(csv);
    let text = serde_json::to_string_pretty(meta).expect("metadata serialises");
    write_file(&path, &text)?;
    Ok(path)
}
