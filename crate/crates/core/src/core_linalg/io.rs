use serde::{Deserialize, Serialize};

use super::matrix::{c, ComplexMatrix};
use crate::error::{LabError, Result};

/// On-disk matrix: {"rows", "cols", "re": [[..]], "im": [[..]]}.
///
/// serde_json writes the shortest decimal that parses back to the same
/// binary64, so a write/read cycle is bit-exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        let (rows, cols) = m.shape();
        let re = (0..rows).map(|i| (0..cols).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..rows).map(|i| (0..cols).map(|j| m[(i, j)].im).collect()).collect();
        MatrixFile { rows, cols, re, im }
    }
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let shape_ok = |part: &Vec<Vec<f64>>| {
            part.len() == self.rows && part.iter().all(|r| r.len() == self.cols)
        };
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(LabError::InvalidInput(format!(
                "re/im arrays do not match declared shape {}x{}",
                self.rows, self.cols
            )));
        }
        let entries: Vec<_> = self
            .re
            .iter()
            .flatten()
            .zip(self.im.iter().flatten())
            .map(|(&a, &b)| c(a, b))
            .collect();
        ComplexMatrix::from_row_slice(self.rows, self.cols, &entries)
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixFile::from(m)).expect("matrix serializes")
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    let f: MatrixFile =
        serde_json::from_str(s).map_err(|e| LabError::InvalidInput(format!("matrix JSON: {e}")))?;
    f.to_matrix()
}
