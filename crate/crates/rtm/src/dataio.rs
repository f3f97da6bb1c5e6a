//! Text formats for datasets, indicator fields and check reports, plus the
//! binary PGM image writer.
//!
//! Dataset file:
//!
//! ```text
//! # rtm-dataset 1
//! # ns <int> nr <int> R <real> kappa1 <real> kappa2 <real> tau <real> seed <int>
//! r s Re(V) Im(V)        (N_r * N_s lines, r outer, 0-based)
//! ```
//!
//! Indicator file: a first line `nx ny x0 x1 y0 y1`, then `ny` lines of `nx`
//! reals, the line for `y0` first.
//!
//! Reals are written with 17 significant digits, so reading a file back
//! reproduces the values exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rtm_core::forward::ScatteringDataset;
use rtm_core::geometry::{Acquisition, SamplingGrid};
use rtm_core::linalg::Matrix;
use rtm_core::rtm::IndicatorField;
use rtm_core::{c64, MediumConfig};

use crate::error::{Error, Result};

pub const DATASET_MAGIC: &str = "# rtm-dataset";
pub const DATASET_VERSION: u32 = 1;

fn write_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

fn read_err(e: std::io::Error) -> Error {
    Error::io("<input>", e)
}

pub fn write_dataset(mut w: impl Write, dataset: &ScatteringDataset) -> Result<()> {
    let acq = &dataset.acquisition;
    let m = &dataset.medium;
    writeln!(w, "{DATASET_MAGIC} {DATASET_VERSION}").map_err(write_err)?;
    writeln!(
        w,
        "# ns {} nr {} R {:.16e} kappa1 {:.16e} kappa2 {:.16e} tau {:.16e} seed {}",
        acq.n_sources(),
        acq.n_receivers(),
        acq.radius,
        m.kappa1(),
        m.kappa2(),
        dataset.noise_tau,
        dataset.seed
    )
    .map_err(write_err)?;
    for r in 0..acq.n_receivers() {
        for s in 0..acq.n_sources() {
            let v = dataset.value(r, s);
            writeln!(w, "{r} {s} {:.16e} {:.16e}", v.re, v.im).map_err(write_err)?;
        }
    }
    w.flush().map_err(write_err)
}

fn header_value<'a>(fields: &[&'a str], name: &str) -> Result<&'a str> {
    fields
        .chunks_exact(2)
        .find(|p| p[0] == name)
        .map(|p| p[1])
        .ok_or_else(|| Error::Format(format!("dataset header lacks '{name}'")))
}

fn number<T: std::str::FromStr>(text: &str, what: &str, line: usize) -> Result<T> {
    text.parse().map_err(|_| Error::Format(format!("line {line}: bad {what} '{text}'")))
}

pub fn read_dataset(r: impl BufRead) -> Result<ScatteringDataset> {
    let mut lines = r.lines().enumerate().map(|(k, l)| l.map(|l| (k + 1, l)).map_err(read_err));
    let mut next = |what: &str| -> Result<(usize, String)> {
        lines.next().unwrap_or_else(|| Err(Error::Format(format!("file ends before {what}"))))
    };
    let (_, magic) = next("the version line")?;
    let version = magic
        .strip_prefix(DATASET_MAGIC)
        .ok_or_else(|| Error::Format(format!("not a dataset file (first line '{magic}')")))?;
    if version.trim() != DATASET_VERSION.to_string() {
        return Err(Error::Format(format!("unsupported dataset version '{}'", version.trim())));
    }
    let (hl, header) = next("the header")?;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Format("missing dataset header".into()))?
        .split_whitespace()
        .collect();
    let ns: usize = number(header_value(&fields, "ns")?, "ns", hl)?;
    let nr: usize = number(header_value(&fields, "nr")?, "nr", hl)?;
    let radius: f64 = number(header_value(&fields, "R")?, "R", hl)?;
    let k1: f64 = number(header_value(&fields, "kappa1")?, "kappa1", hl)?;
    let k2: f64 = number(header_value(&fields, "kappa2")?, "kappa2", hl)?;
    let tau: f64 = number(header_value(&fields, "tau")?, "tau", hl)?;
    let seed: u64 = number(header_value(&fields, "seed")?, "seed", hl)?;
    let acquisition = Acquisition::new(radius, ns, nr)?;
    let medium = MediumConfig::new(k1, k2)?;

    let mut values = Matrix::zeros(nr, ns);
    for r in 0..nr {
        for s in 0..ns {
            let (line, text) = next("all data lines are read")?;
            let parts: Vec<&str> = text.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(Error::Format(format!("line {line}: expected 'r s re im'")));
            }
            let (ri, si): (usize, usize) = (number(parts[0], "index", line)?, number(parts[1], "index", line)?);
            if (ri, si) != (r, s) {
                return Err(Error::Format(format!("line {line}: expected entry ({r}, {s}), found ({ri}, {si})")));
            }
            values[(r, s)] = c64::new(number(parts[2], "real", line)?, number(parts[3], "real", line)?);
        }
    }
    if let Some(extra) = lines.next() {
        let (line, _) = extra?;
        return Err(Error::Format(format!("line {line}: data beyond {nr} x {ns} entries")));
    }
    let mut dataset = ScatteringDataset::new(values, acquisition, medium)?;
    dataset.noise_tau = tau;
    dataset.seed = seed;
    Ok(dataset)
}

pub fn write_indicator(mut w: impl Write, field: &IndicatorField) -> Result<()> {
    let g = &field.grid;
    writeln!(w, "{} {} {:.16e} {:.16e} {:.16e} {:.16e}", g.nx, g.ny, g.x0, g.x1, g.y0, g.y1).map_err(write_err)?;
    for j in 0..g.ny {
        let row: Vec<String> = (0..g.nx).map(|i| format!("{:.16e}", field.at(i, j))).collect();
        writeln!(w, "{}", row.join(" ")).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

pub fn read_indicator(r: impl BufRead) -> Result<IndicatorField> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::Format("empty indicator file".into()))?.map_err(read_err)?;
    let head: Vec<&str> = first.split_whitespace().collect();
    if head.len() != 6 {
        return Err(Error::Format("indicator header must read 'nx ny x0 x1 y0 y1'".into()));
    }
    let nx: usize = number(head[0], "nx", 1)?;
    let ny: usize = number(head[1], "ny", 1)?;
    let bounds: Vec<f64> = head[2..].iter().map(|t| number(t, "bound", 1)).collect::<Result<_>>()?;
    let grid = SamplingGrid::new(bounds[0], bounds[1], bounds[2], bounds[3], nx, ny)?;
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format(format!("indicator file has {j} rows, expected {ny}")))?
            .map_err(read_err)?;
        let row: Vec<f64> = line.split_whitespace().map(|t| number(t, "real", j + 2)).collect::<Result<_>>()?;
        if row.len() != nx {
            return Err(Error::Format(format!("line {}: {} values, expected {nx}", j + 2, row.len())));
        }
        values.extend(row);
    }
    if lines.any(|l| l.is_ok_and(|l| !l.trim().is_empty())) {
        return Err(Error::Format(format!("indicator file has more than {ny} rows")));
    }
    Ok(IndicatorField::new(grid, values)?)
}

/// 8-bit binary PGM: `min -> 0`, `max -> 255`, first image row at `y1`.
/// A constant field has no range to map and is rejected.
pub fn write_pgm(mut w: impl Write, field: &IndicatorField) -> Result<()> {
    let normalized = rtm_core::rtm::normalize(field)
        .map_err(|_| Error::Format("degenerate range: the field is constant".into()))?;
    let g = &field.grid;
    let mut bytes = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    for j in (0..g.ny).rev() {
        bytes.extend((0..g.nx).map(|i| (normalized.at(i, j) * 255.0).round() as u8));
    }
    w.write_all(&bytes).map_err(write_err)?;
    w.flush().map_err(write_err)
}

/// `|Ind|` as a field, for the magnitude image.
pub fn magnitude(field: &IndicatorField) -> IndicatorField {
    IndicatorField { grid: field.grid, values: field.values.iter().map(|v| v.abs()).collect() }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub params: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRow {
    /// A row that passes when `residual <= threshold`.
    pub fn at_most(check: &str, params: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self { check: check.into(), params: params.into(), residual, threshold, pass: residual <= threshold }
    }
}

/// `check | params | residual | threshold | pass` table.
pub fn format_report(rows: &[CheckRow]) -> String {
    let header = ["check", "params", "residual", "threshold", "pass"];
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.check.clone(),
                r.params.clone(),
                format!("{:.3e}", r.residual),
                format!("{:.3e}", r.threshold),
                if r.pass { "yes" } else { "NO" }.to_string(),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |row: [&str; 5]| {
        let parts: Vec<String> = row.iter().zip(width).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", parts.join(" | ").trim_end())
    };
    let mut out = line(header);
    out.push_str(&format!("{}\n", width.map(|w| "-".repeat(w)).join("-|-")));
    for row in &cells {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3], &row[4]]));
    }
    out
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn with_path<T>(path: &Path, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn save_dataset(path: &Path, dataset: &ScatteringDataset) -> Result<()> {
    with_path(path, write_dataset(create(path)?, dataset))
}

pub fn load_dataset(path: &Path) -> Result<ScatteringDataset> {
    with_path(path, read_dataset(open(path)?))
}

pub fn save_indicator(path: &Path, field: &IndicatorField) -> Result<()> {
    with_path(path, write_indicator(create(path)?, field))
}

pub fn load_indicator(path: &Path) -> Result<IndicatorField> {
    with_path(path, read_indicator(open(path)?))
}

/// Writes the PGM only when the field has a range; nothing is created otherwise.
pub fn save_pgm(path: &Path, field: &IndicatorField) -> Result<()> {
    let mut bytes = Vec::new();
    write_pgm(&mut bytes, field)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
