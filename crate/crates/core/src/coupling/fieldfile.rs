//! Plain-text field-grid files.
//!
//! ```text
//! # comments and blank lines are ignored
//! format eo-field-grid 1
//! shape 4 4 2
//! voxel_volume 1.0e-18
//! # i j k  ex_re ex_im ey_re ey_im ez_re ez_im  e11 e12 e13 e21 e22 e23 e31 e32 e33  mask
//! 0 0 0  0 0 0 0 1 0  4.6 0 0 0 4.6 0 0 0 4.6  1
//! ...
//! ```
//!
//! Every row has 19 whitespace-separated columns. The mask column is 0 or 1.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::{FieldGrid, Voxel};
use crate::error::{Error, Result};

pub const FIELD_FORMAT_TAG: &str = "eo-field-grid 1";

const COLUMNS: usize = 19;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("line {line}"),
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("{what}: cannot parse `{tok}`")))
}

/// Parse a field grid from text.
pub fn parse_field_grid(text: &str) -> Result<FieldGrid> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut header = |key: &str| -> Result<(usize, Vec<&str>)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("missing `{key}` header")))?;
        let mut toks = l.split_whitespace();
        if toks.next() != Some(key) {
            return Err(parse_err(n, format!("expected `{key}` header")));
        }
        Ok((n, toks.collect()))
    };

    let (n, fmt) = header("format")?;
    if fmt.join(" ") != FIELD_FORMAT_TAG {
        return Err(parse_err(n, format!("unsupported format `{}`", fmt.join(" "))));
    }
    let (n, dims) = header("shape")?;
    if dims.len() != 3 {
        return Err(parse_err(n, "shape needs three integers"));
    }
    let shape = [
        num(dims[0], n, "shape")?,
        num(dims[1], n, "shape")?,
        num(dims[2], n, "shape")?,
    ];
    let (n, vol) = header("voxel_volume")?;
    if vol.len() != 1 {
        return Err(parse_err(n, "voxel_volume needs one number"));
    }
    let voxel_volume: f64 = num(vol[0], n, "voxel_volume")?;

    let mut voxels = Vec::new();
    for (n, l) in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != COLUMNS {
            return Err(parse_err(n, format!("expected {COLUMNS} columns, found {}", t.len())));
        }
        let index = [num(t[0], n, "i")?, num(t[1], n, "j")?, num(t[2], n, "k")?];
        let mut f = [0.0; 6];
        for (x, tok) in f.iter_mut().zip(&t[3..9]) {
            *x = num(tok, n, "field")?;
        }
        let mut permittivity = [[0.0; 3]; 3];
        for (m, tok) in t[9..18].iter().enumerate() {
            permittivity[m / 3][m % 3] = num(tok, n, "permittivity")?;
        }
        let in_eo_region = match t[18] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(n, format!("mask must be 0 or 1, got `{other}`"))),
        };
        voxels.push(Voxel {
            index,
            field: [
                Complex64::new(f[0], f[1]),
                Complex64::new(f[2], f[3]),
                Complex64::new(f[4], f[5]),
            ],
            permittivity,
            in_eo_region,
        });
    }
    FieldGrid::new(shape, voxel_volume, voxels)
}

/// Read a field grid from disk.
pub fn read_field_grid(path: &Path) -> Result<FieldGrid> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_field_grid(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}:{location}", path.display()),
            message,
        },
        other => other,
    })
}

/// Write a grid in the text format, floats with 17 significant digits.
pub fn write_field_grid(grid: &FieldGrid, mut w: impl Write) -> std::io::Result<()> {
    let s = grid.shape();
    writeln!(w, "format {FIELD_FORMAT_TAG}")?;
    writeln!(w, "shape {} {} {}", s[0], s[1], s[2])?;
    writeln!(w, "voxel_volume {:.16e}", grid.voxel_volume())?;
    for v in grid.voxels() {
        write!(w, "{} {} {}", v.index[0], v.index[1], v.index[2])?;
        for e in &v.field {
            write!(w, " {:.16e} {:.16e}", e.re, e.im)?;
        }
        for x in v.permittivity.iter().flatten() {
            write!(w, " {x:.16e}")?;
        }
        writeln!(w, " {}", u8::from(v.in_eo_region))?;
    }
    Ok(())
}
