//! JSON and CSV serialization helpers shared by the command-line tool.
//!
//! Floats in CSV use 17 significant digits (`{:.16e}`), which round-trips
//! every `f64`; JSON relies on serde_json's shortest round-trip form.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::states::{ProductBasis, ProductKind};
use crate::Result;

/// Row-major `[re, im]` entries.
pub fn matrix_entries(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberExport {
    pub index: usize,
    pub label: Option<String>,
    pub factors: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisExport {
    pub kind: ProductKind,
    pub dim: usize,
    pub members: Vec<MemberExport>,
}

pub fn basis_export(basis: &ProductBasis) -> BasisExport {
    BasisExport {
        kind: basis.kind,
        dim: basis.dim(),
        members: basis
            .members
            .iter()
            .zip(&basis.factors)
            .enumerate()
            .map(|(index, (m, f))| MemberExport {
                index,
                label: m.label().map(str::to_owned),
                factors: f.clone(),
                matrix: matrix_entries(m.matrix()),
            })
            .collect(),
    }
}

/// Fixed-width float rendering for CSV cells.
pub fn csv_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_owned()
    } else {
        format!("{x:.16e}")
    }
}

/// Writes a header line and numeric rows.
pub fn write_csv<W: Write>(mut out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| csv_float(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), header, rows)
}
