//! File formats for grids: CSV, plain PGM, and a JSON stats summary.
//!
//! Both grid formats walk rows `c2 = 0, 1, ...` and, inside a row, `c1 = 0, 1, ...`.

use std::io::{self, Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::grid::{DistStats, GridError, HeightGrid};
use crate::scalar::Scalar;

/// Longest line allowed in a plain PGM file.
const PGM_LINE_LIMIT: usize = 70;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed grid file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Decimal text with 17 significant digits, enough to round-trip an `f64`.
pub fn format_height<T: Scalar>(h: T) -> String {
    format!("{:.16e}", h.to_f64_lossy())
}

/// Header `c1,c2,height`, then one row per nontrivial cell.
pub fn write_grid_csv<T: Scalar, W: Write>(grid: &HeightGrid<T>, out: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["c1", "c2", "height"])?;
    for ((c1, c2), h) in grid.cells() {
        w.write_record([c1.to_string(), c2.to_string(), format_height(h)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_grid_csv`]. The modulus is the largest
/// residue plus one; every nontrivial cell must appear exactly once.
pub fn read_grid_csv<R: Read>(input: R) -> Result<HeightGrid<f64>, ExportError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["c1", "c2", "height"] {
        return Err(ExportError::Malformed(format!("unexpected header {headers:?}")));
    }
    let mut cells = Vec::new();
    for record in r.records() {
        let record = record?;
        let field = |i: usize| record.get(i).ok_or_else(|| ExportError::Malformed(format!("short row {record:?}")));
        let bad = |e: &dyn std::fmt::Display| ExportError::Malformed(format!("{e} in row {record:?}"));
        let c1: u64 = field(0)?.parse().map_err(|e| bad(&e))?;
        let c2: u64 = field(1)?.parse().map_err(|e| bad(&e))?;
        let h: f64 = field(2)?.parse().map_err(|e| bad(&e))?;
        cells.push(((c1, c2), h));
    }
    let d = cells.iter().map(|&((a, b), _)| a.max(b)).max().unwrap_or(0) + 1;
    if (cells.len() as u64) != d * d - 1 {
        return Err(ExportError::Malformed(format!("{} rows for modulus {d}", cells.len())));
    }
    let mut seen = vec![false; (d * d) as usize];
    for &((c1, c2), _) in &cells {
        let i = (c2 * d + c1) as usize;
        if i == 0 || seen[i] {
            return Err(ExportError::Malformed(format!("cell ({c1}, {c2}) repeated or trivial")));
        }
        seen[i] = true;
    }
    Ok(HeightGrid::from_cells(d, cells)?)
}

/// Gray level `round(255 h / log 2)`, clamped to `[0, 255]`.
pub fn gray_level<T: Scalar>(h: T) -> u8 {
    let v = (T::of(255.0) * h / T::LN_2()).round();
    v.max(T::zero()).min(T::of(255.0)).to_u8().unwrap_or(0)
}

/// Plain `P2` image, `d × d`, row `c2 = 0` on top, trivial cell black.
pub fn write_grid_pgm<T: Scalar, W: Write>(grid: &HeightGrid<T>, mut out: W) -> Result<(), ExportError> {
    let d = grid.modulus();
    writeln!(out, "P2")?;
    writeln!(out, "{d} {d}")?;
    writeln!(out, "255")?;
    for c2 in 0..d {
        let mut line = String::new();
        for c1 in 0..d {
            let px = grid.get(c1, c2).map_or(0, gray_level).to_string();
            if !line.is_empty() && line.len() + 1 + px.len() > PGM_LINE_LIMIT {
                writeln!(out, "{line}")?;
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&px);
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Pixel values of a plain PGM, row by row.
pub fn read_pgm<R: Read>(mut input: R) -> Result<(usize, usize, Vec<u16>), ExportError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    if tokens.next() != Some("P2") {
        return Err(ExportError::Malformed("missing P2 magic".into()));
    }
    let mut num = || -> Result<usize, ExportError> {
        tokens
            .next()
            .ok_or_else(|| ExportError::Malformed("truncated".into()))?
            .parse()
            .map_err(|e| ExportError::Malformed(format!("{e}")))
    };
    let (w, h, _max) = (num()?, num()?, num()?);
    let px = (0..w * h).map(|_| num().map(|v| v as u16)).collect::<Result<_, _>>()?;
    Ok((w, h, px))
}

#[derive(Debug, Clone, Serialize)]
struct StatsSummary<'a, T> {
    #[serde(flatten)]
    stats: &'a DistStats<T>,
    ratio_near_eta: T,
    ratio_near_theta: T,
}

pub fn write_stats_json<T: Scalar + Serialize, W: Write>(stats: &DistStats<T>, mut out: W) -> Result<(), ExportError> {
    let summary = StatsSummary {
        stats,
        ratio_near_eta: stats.ratio_near_eta(),
        ratio_near_theta: stats.ratio_near_theta(),
    };
    serde_json::to_writer_pretty(&mut out, &summary).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}
