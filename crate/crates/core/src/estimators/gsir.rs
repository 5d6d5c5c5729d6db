//! Generalized sliced inverse regression.

use nalgebra::DMatrix;

use super::{centered_gram_eig, Estimator, Hyper, MethodKind, SpectralProblem};
use crate::data::DataMatrix;
use crate::error::Result;
use crate::linalg::{check_eps, clip_pow, ridge_inv, EigenPair};

pub struct Gsir;

/// `A C A` with `A = (G_X+ε_X I)^{-3/2} G_X^{3/2}` and
/// `C = (G_Y+ε_Y I)^{-1} G_Y² (G_Y+ε_Y I)^{-1}`, from the spectra of `G_X`, `G_Y`.
pub fn gsir_matrix(gx: &EigenPair, gy: &EigenPair, eps_x: f64, eps_y: f64) -> Result<DMatrix<f64>> {
    check_eps(eps_x)?;
    check_eps(eps_y)?;
    let a = gx.spectral_map(|l| clip_pow(l, 1.5) * ridge_inv(l, eps_x, 1.5));
    let c = gy.spectral_map(|l| (clip_pow(l, 1.0) * ridge_inv(l, eps_y, 1.0)).powi(2));
    let mut m = &a * c * &a;
    crate::linalg::symmetrize_in_place(&mut m);
    Ok(m)
}

impl Estimator for Gsir {
    fn kind(&self) -> MethodKind {
        MethodKind::Gsir
    }

    fn spectral_problem(&self, x: &DataMatrix, y: &DataMatrix, hyper: &Hyper) -> Result<SpectralProblem> {
        let gx = centered_gram_eig(x, &hyper.x_kernel()?)?;
        let gy = centered_gram_eig(y, &hyper.y_kernel()?)?;
        Ok(SpectralProblem {
            matrix: gsir_matrix(&gx, &gy, hyper.eps_x, hyper.eps_y)?,
            coord_map: gx.spectral_map(|l| ridge_inv(l, hyper.eps_x, 1.0)),
        })
    }
}
