//! Flat-file formats.
//!
//! Wigner grids: a `D,<D>` header line, then one `s,r,value` row per cell in
//! `s`-major order. Representative grids use `a,b,value`. Values are written
//! with 17 significant digits so that reparsing gives back the same doubles.
//! Revival scans are `j,autocorrelation`. Graymaps are plain PGM (`P2`) with
//! `maxval` 65535 and a sidecar recording the affine map back to values.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::evolution::RevivalScan;
use crate::rotor::RotorState;
use crate::wigner::{RepresentativeGrid, WignerGrid};

/// Scientific notation with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn wigner_csv(grid: &WignerGrid) -> String {
    let mut out = format!("D,{}\n", grid.dim());
    for (s, r, v) in grid.cells() {
        let _ = writeln!(out, "{s},{r},{}", format_value(v));
    }
    out
}

pub fn representative_csv(rep: &RepresentativeGrid) -> String {
    let mut out = format!("D,{}\n", rep.dim());
    for (a, b, v) in rep.cells() {
        let _ = writeln!(out, "{a},{b},{}", format_value(v));
    }
    out
}

pub fn revival_csv(scan: &RevivalScan) -> String {
    let mut out = String::from("j,autocorrelation\n");
    for (j, a) in &scan.points {
        let _ = writeln!(out, "{j},{}", format_value(*a));
    }
    out
}

/// `m,re,im` rows in momentum order.
pub fn state_csv(state: &RotorState) -> String {
    let mut out = format!("D,{}\n", state.dim());
    for (m, c) in state.momenta() {
        let _ = writeln!(out, "{m},{},{}", format_value(c.re), format_value(c.im));
    }
    out
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Domain(format!("line {line}: {msg}"))
}

type Cell = (i64, i64, f64);

/// Header plus `(i, j, value)` triples.
fn parse_triples(text: &str) -> Result<(usize, Vec<Cell>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let dim = header
        .strip_prefix("D,")
        .and_then(|d| d.trim().parse::<usize>().ok())
        .ok_or_else(|| parse_err(1, format!("expected `D,<D>`, got {header:?}")))?;
    let mut rows = Vec::new();
    for (i, line) in lines {
        let mut fields = line.split(',').map(str::trim);
        let mut next = |name: &str| fields.next().ok_or_else(|| parse_err(i + 1, format!("missing {name}")));
        let a = next("first index")?.parse::<i64>().map_err(|e| parse_err(i + 1, e))?;
        let b = next("second index")?.parse::<i64>().map_err(|e| parse_err(i + 1, e))?;
        let v = next("value")?.parse::<f64>().map_err(|e| parse_err(i + 1, e))?;
        rows.push((a, b, v));
    }
    Ok((dim, rows))
}

pub fn parse_wigner_csv(text: &str) -> Result<WignerGrid> {
    let (dim, rows) = parse_triples(text)?;
    let side = 2 * dim;
    let mut values = vec![f64::NAN; side * side];
    let r_min = -(2 * (dim as i64 / 2));
    for (s, r, v) in rows {
        let (si, ri) = (s, r - r_min);
        if !(0..side as i64).contains(&si) || !(0..side as i64).contains(&ri) {
            return Err(Error::Domain(format!("cell ({s}, {r}) outside the D = {dim} lattice")));
        }
        values[si as usize * side + ri as usize] = v;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("Wigner CSV does not cover every lattice cell".into()));
    }
    WignerGrid::from_values(dim, values)
}

pub fn parse_representative_csv(text: &str) -> Result<RepresentativeGrid> {
    let (dim, rows) = parse_triples(text)?;
    let mut values = vec![f64::NAN; dim * dim];
    for (a, b, v) in rows {
        if !(0..dim as i64).contains(&a) || !(0..dim as i64).contains(&b) {
            return Err(Error::Domain(format!("cell ({a}, {b}) outside the D = {dim} grid")));
        }
        values[a as usize * dim + b as usize] = v;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("representative CSV does not cover every cell".into()));
    }
    RepresentativeGrid::from_values(dim, values)
}

/// Plain PGM image and its sidecar text.
///
/// Rows are `r` from top (largest) to bottom, columns are `s`. Gray level
/// `g` maps back to `value = offset + scale * g`.
pub fn wigner_pgm(grid: &WignerGrid) -> (String, String) {
    const MAXVAL: f64 = 65535.0;
    let lo = grid.values().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = if hi > lo { (hi - lo) / MAXVAL } else { 1.0 };
    let side = 2 * grid.dim();
    let mut pgm = format!("P2\n{side} {side}\n65535\n");
    for r in grid.r_range().rev() {
        let row: Vec<String> = (0..side as i64)
            .map(|s| (((grid.get(s, r) - lo) / scale).round().clamp(0.0, MAXVAL) as u32).to_string())
            .collect();
        pgm.push_str(&row.join(" "));
        pgm.push('\n');
    }
    let sidecar = format!(
        "# value = offset + scale * gray\noffset = {}\nscale = {}\nmaxval = 65535\nrows = \"r descending from {} to {}\"\ncolumns = \"s ascending from 0 to {}\"\n",
        format_value(lo),
        format_value(scale),
        grid.r_range().end(),
        grid.r_range().start(),
        side - 1
    );
    (pgm, sidecar)
}
