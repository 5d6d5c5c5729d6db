//! Kernel sliced inverse regression.
//!
//! Responses are cut into equal-frequency slices; the between-slice covariance
//! of the centered Gram columns is then whitened by `(G_X + ε_X I)^{-1}`.

use nalgebra::{DMatrix, DVector};

use super::{Estimator, Hyper, MethodKind, SpectralProblem};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::kernels::{double_center, gram_matrix};
use crate::linalg::{ridge_inv, sym_eig};

pub struct Ksir;

/// Observation indices of each slice, ordered by response value.
///
/// Sizes differ by at most one. Ties in `y` are broken by observation index.
pub fn slice_indices(y: &[f64], slices: usize) -> Result<Vec<Vec<usize>>> {
    let n = y.len();
    if slices < 2 {
        return Err(Error::InvalidInput(format!("slices must be at least 2, got {slices}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));
    let out: Vec<Vec<usize>> = (0..slices)
        .map(|j| order[j * n / slices..(j + 1) * n / slices].to_vec())
        .collect();
    if let Some(empty) = out.iter().position(Vec::is_empty) {
        return Err(Error::EmptySlice(empty));
    }
    Ok(out)
}

/// `Σ_j (n_j/n) m_j m_jᵀ` where `m_j` is the mean of the `G` columns in slice `j`.
pub fn ksir_matrix(g: &DMatrix<f64>, slices: &[Vec<usize>]) -> DMatrix<f64> {
    let n = g.nrows();
    let mut m = DMatrix::zeros(n, n);
    for idx in slices {
        let mut mean = DVector::zeros(n);
        for &i in idx {
            mean += g.column(i);
        }
        mean /= idx.len() as f64;
        let w = idx.len() as f64 / n as f64;
        m.ger(w, &mean, &mean, 1.0);
    }
    m
}

impl Estimator for Ksir {
    fn kind(&self) -> MethodKind {
        MethodKind::Ksir
    }

    fn check_inputs(&self, _x: &DataMatrix, y: &DataMatrix, hyper: &Hyper) -> Result<()> {
        if y.ncols() != 1 {
            return Err(Error::InvalidInput(format!(
                "ksir needs a univariate response, got {} response columns",
                y.ncols()
            )));
        }
        if y.nrows() < hyper.slices {
            return Err(Error::EmptySlice(0));
        }
        Ok(())
    }

    fn spectral_problem(&self, x: &DataMatrix, y: &DataMatrix, hyper: &Hyper) -> Result<SpectralProblem> {
        let g = double_center(&gram_matrix(x, &hyper.x_kernel()?));
        let gx = sym_eig(&g)?;
        let slices = slice_indices(&y.column(0), hyper.slices)?;
        let between = ksir_matrix(&g, &slices);
        let r = gx.spectral_map(|l| ridge_inv(l, hyper.eps_x, 1.0));
        let mut m = &r * between * &r;
        crate::linalg::symmetrize_in_place(&mut m);
        Ok(SpectralProblem { matrix: m, coord_map: r })
    }
}
