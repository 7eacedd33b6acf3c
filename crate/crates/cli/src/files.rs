//! JSON encodings for states and unitary ensembles. Complex entries are
//! `[re, im]` pairs, matrices are row-major nested arrays.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use resq::linalg::{ComplexMatrix, DensityMatrix};
use resq::sets::FreeSet;
use resq::twirl::UnitaryEnsemble;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn decode_matrix(rows: &MatrixJson) -> Result<ComplexMatrix, CliError> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::Parse("matrix has no rows".into()));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Parse("matrix rows have different lengths".into()));
    }
    Ok(ComplexMatrix::from_fn(n, cols, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: MatrixJson,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix, dims: &[usize]) -> Result<Self, CliError> {
        if dims.iter().product::<usize>() != rho.dim() {
            return Err(CliError::Parse(format!("dims {dims:?} do not multiply to {}", rho.dim())));
        }
        Ok(Self {
            dims: dims.to_vec(),
            matrix: encode_matrix(rho.matrix()),
        })
    }

    pub fn to_state(&self) -> Result<DensityMatrix, CliError> {
        let m = decode_matrix(&self.matrix)?;
        if m.nrows() != m.ncols() {
            return Err(CliError::Parse("state matrix is not square".into()));
        }
        if self.dims.is_empty() || self.dims.iter().product::<usize>() != m.nrows() {
            return Err(CliError::Parse(format!(
                "dims {:?} do not match matrix dimension {}",
                self.dims,
                m.nrows()
            )));
        }
        DensityMatrix::new(m).map_err(|e| CliError::Parse(format!("not a density matrix: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.to_json())
    }
}

/// Vertices of a hull as state files, in vertex order. Empty for cone sets.
pub fn export_vertices(set: &FreeSet, dims: &[usize]) -> Result<Vec<StateFile>, CliError> {
    set.vertices()
        .unwrap_or(&[])
        .iter()
        .map(|v| StateFile::from_state(v, dims))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub unitaries: Vec<MatrixJson>,
    pub weights: Vec<f64>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &UnitaryEnsemble) -> Self {
        Self {
            unitaries: e.unitaries.iter().map(encode_matrix).collect(),
            weights: e.weights.clone(),
        }
    }

    pub fn to_ensemble(&self) -> Result<UnitaryEnsemble, CliError> {
        let us = self.unitaries.iter().map(decode_matrix).collect::<Result<Vec<_>, _>>()?;
        UnitaryEnsemble::new(us, self.weights.clone()).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.to_json())
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Unwritable(format!("{}: {e}", path.display())))
}
