//! Plain-text column files.
//!
//! Every file starts with `#` lines repeating the resolved scenario, then a
//! `# columns:` line, then one record per line. Floats carry 17 significant
//! digits so a reparse reproduces the exact bits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::dynamics::{Branch, JumpEvent, TrajectorySample};
use crate::ensemble::{EnsembleFrame, HCurve};
use crate::spinor::Vec3;

pub const TRAJECTORY_COLUMNS: &str = "t x y z branch speed";
pub const JUMP_COLUMNS: &str = "t x y z from to";
pub const H_COLUMNS: &str = "t H";
pub const FRAME_COLUMNS: &str = "x y z branch";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
}

/// `{:.16e}`: one leading digit plus sixteen decimals.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn branch_cell(b: Option<Branch>) -> &'static str {
    b.map_or("-", Branch::as_str)
}

fn header(meta: &str, columns: &str) -> String {
    let mut s = String::new();
    for line in meta.lines() {
        let _ = writeln!(s, "# {line}");
    }
    let _ = writeln!(s, "# columns: {columns}");
    s
}

fn push_vec(s: &mut String, x: &Vec3) {
    let _ = write!(s, " {} {} {}", fmt_f64(x.x), fmt_f64(x.y), fmt_f64(x.z));
}

pub fn format_trajectory(meta: &str, samples: &[TrajectorySample]) -> String {
    let mut s = header(meta, TRAJECTORY_COLUMNS);
    for p in samples {
        s.push_str(&fmt_f64(p.t));
        push_vec(&mut s, &p.x);
        let _ = writeln!(s, " {} {}", branch_cell(p.branch), fmt_f64(p.speed));
    }
    s
}

pub fn format_jumps(meta: &str, jumps: &[JumpEvent]) -> String {
    let mut s = header(meta, JUMP_COLUMNS);
    for j in jumps {
        s.push_str(&fmt_f64(j.t));
        push_vec(&mut s, &j.x);
        let _ = writeln!(s, " {} {}", j.from, j.to);
    }
    s
}

pub fn format_h_curve(meta: &str, curve: &HCurve) -> String {
    let mut s = header(meta, H_COLUMNS);
    for p in &curve.points {
        let _ = writeln!(s, "{} {}", fmt_f64(p.t), fmt_f64(p.h.corrected));
    }
    s
}

pub fn format_frame(meta: &str, frame: &EnsembleFrame) -> String {
    let mut s = header(meta, FRAME_COLUMNS);
    for (i, x) in frame.positions.iter().enumerate() {
        let b = frame.branches.as_ref().map(|b| b[i]);
        let _ = write!(s, "{} {} {}", fmt_f64(x.x), fmt_f64(x.y), fmt_f64(x.z));
        let _ = writeln!(s, " {}", branch_cell(b));
    }
    s
}

/// Free-form numeric table with the same header convention.
pub fn format_table(meta: &str, columns: &str, rows: &[Vec<f64>]) -> String {
    let mut s = header(meta, columns);
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

/// Header lines (without `# `) and the whitespace-split records.
pub fn read_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io { path: path.display().to_string(), source })?;
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(h) = line.strip_prefix('#') {
            header.push(h.strip_prefix(' ').unwrap_or(h).to_string());
        } else if !line.trim().is_empty() {
            rows.push(line.split_whitespace().map(str::to_string).collect());
        }
    }
    Ok((header, rows))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { path: path.display().to_string(), line, message: message.into() }
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectorySample>, IoError> {
    let (_, rows) = read_columns(path)?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != 6 {
                return Err(parse_err(path, i + 1, format!("expected 6 columns, found {}", r.len())));
            }
            let num = |k: usize| r[k].parse::<f64>().map_err(|e| parse_err(path, i + 1, e.to_string()));
            let branch = match r[4].as_str() {
                "-" => None,
                b => Some(b.parse::<Branch>().map_err(|e| parse_err(path, i + 1, e))?),
            };
            Ok(TrajectorySample { t: num(0)?, x: Vec3::new(num(1)?, num(2)?, num(3)?), branch, speed: num(5)? })
        })
        .collect()
}

pub fn read_jumps(path: &Path) -> Result<Vec<JumpEvent>, IoError> {
    let (_, rows) = read_columns(path)?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != 6 {
                return Err(parse_err(path, i + 1, format!("expected 6 columns, found {}", r.len())));
            }
            let num = |k: usize| r[k].parse::<f64>().map_err(|e| parse_err(path, i + 1, e.to_string()));
            let br = |k: usize| r[k].parse::<Branch>().map_err(|e| parse_err(path, i + 1, e));
            Ok(JumpEvent { t: num(0)?, x: Vec3::new(num(1)?, num(2)?, num(3)?), from: br(4)?, to: br(5)? })
        })
        .collect()
}
