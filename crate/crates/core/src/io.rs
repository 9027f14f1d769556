//! JSON matrix files and report envelopes.
//!
//! A matrix file is `{"rows": R, "cols": C, "data": [[re, im], ...]}` with
//! `data` in row-major order. Floats are written with shortest round-trip
//! formatting, so write-then-read is bit exact.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, WaxError};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(WaxError::Parse(format!(
                "matrix file declares {}x{} but holds {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(WaxError::Parse(
                "matrix file contains non-finite values".into(),
            ));
        }
        let data = self
            .data
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(self.rows, self.cols, data)
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str::<MatrixFile>(text)?.into_matrix()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let mut s = serde_json::to_string(&MatrixFile::from_matrix(m)).expect("matrix serializes");
    s.push('\n');
    s
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    if !m.is_finite() {
        return Err(WaxError::InvalidArgument(
            "refusing to write non-finite matrix".into(),
        ));
    }
    fs::write(path, matrix_to_json(m))?;
    Ok(())
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_file(path: &Path) -> Result<Self> {
        Ok(Self {
            path: path.display().to_string(),
            sha256: sha256_hex(&fs::read(path)?),
        })
    }
}

/// Envelope written by every CLI command that produces a report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile<T: Serialize> {
    pub command: String,
    pub args: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub seeds: Vec<u64>,
    pub version: &'static str,
    pub results: T,
}

impl<T: Serialize> ReportFile<T> {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
