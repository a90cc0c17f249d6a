//! Matrix interchange format:
//!
//! ```text
//! {"n": 2, "entries": [
//!   [[1.0e0, 0.0e0], [0.0e0, 0.0e0]],
//!   [[0.0e0, 0.0e0], [-1.0e0, 0.0e0]]
//! ]}
//! ```
//!
//! Entries are `[re, im]` pairs, row-major, written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use expfix_core::{CMatrix, Complex64};
use serde::Deserialize;

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrixFile {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

pub fn parse_matrix(text: &str, origin: &str) -> Result<CMatrix, CliError> {
    let raw: RawMatrixFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        file: origin.to_string(),
        position: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let shape_err = |position: String, message: String| CliError::Parse {
        file: origin.to_string(),
        position,
        message,
    };
    if raw.n == 0 {
        return Err(shape_err("header".into(), "n must be positive".into()));
    }
    if raw.entries.len() != raw.n {
        return Err(shape_err(
            format!("row {}", raw.entries.len().min(raw.n)),
            format!("expected {} rows, found {}", raw.n, raw.entries.len()),
        ));
    }
    let mut data = Vec::with_capacity(raw.n * raw.n);
    for (r, row) in raw.entries.iter().enumerate() {
        if row.len() != raw.n {
            return Err(shape_err(
                format!("row {r}, column {}", row.len().min(raw.n)),
                format!("expected {} entries, found {}", raw.n, row.len()),
            ));
        }
        data.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
    }
    CMatrix::from_vec(raw.n, raw.n, data).map_err(CliError::from)
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_matrix(&text, &path.display().to_string())
}

pub fn serialize_matrix(a: &CMatrix) -> String {
    let n = a.nrows();
    let mut s = format!("{{\"n\": {n}, \"entries\": [\n");
    for r in 0..n {
        s.push_str("  [");
        for (c, v) in a.row(r).iter().enumerate() {
            if c > 0 {
                s.push_str(", ");
            }
            write!(s, "[{:.16e}, {:.16e}]", v.re, v.im).expect("write to String");
        }
        s.push_str(if r + 1 < n { "],\n" } else { "]\n" });
    }
    s.push_str("]}\n");
    s
}

pub fn write_matrix(path: &Path, a: &CMatrix) -> Result<(), CliError> {
    std::fs::write(path, serialize_matrix(a)).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}
