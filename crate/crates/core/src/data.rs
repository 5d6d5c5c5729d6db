use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Observations stored one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(DMatrix<f64>);

impl DataMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::InvalidInput("data matrix has no rows or no columns".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos % values.nrows(), pos / values.nrows());
            return Err(Error::InvalidInput(format!(
                "non-finite value at row {r}, column {c}"
            )));
        }
        Ok(Self(values))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
    }

    /// A single-variable data set.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_column_slice(values.len(), 1, values))
    }

    /// Row-major flat buffer of `n * p` values.
    pub fn from_row_major(n: usize, p: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * p {
            return Err(Error::DimensionMismatch {
                expected: n * p,
                actual: values.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, p, values))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.0.row(i).iter().copied().collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nrows() * self.ncols());
        for i in 0..self.nrows() {
            out.extend(self.0.row(i).iter());
        }
        out
    }

    /// New data set made of the given rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        Self::new(self.0.select_rows(idx))
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Self {
        Self(self.0.map(f))
    }
}

impl AsRef<DMatrix<f64>> for DataMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_ragged_rows() {
        assert!(DataMatrix::from_column(&[1.0, f64::NAN]).is_err());
        assert!(DataMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(DataMatrix::from_rows(&[]).is_err());
    }

    #[test]
    fn row_major_layout() {
        let d = DataMatrix::from_row_major(2, 3, &[1., 2., 3., 4., 5., 6.]).unwrap();
        assert_eq!(d.row(1), vec![4., 5., 6.]);
        assert_eq!(d.column(2), vec![3., 6.]);
        assert_eq!(d.to_row_major(), vec![1., 2., 3., 4., 5., 6.]);
    }
}
