//! Kernel canonical correlation analysis, expressed in the same coordinates as GSIR.

use nalgebra::DMatrix;

use super::{centered_gram_eig, Estimator, Hyper, MethodKind, SpectralProblem};
use crate::data::DataMatrix;
use crate::error::Result;
use crate::linalg::{check_eps, clip_pow, ridge_inv, EigenPair};

pub struct Kcca;

/// `(G_X+ε_X I)^{-1} G_X G_Y (G_Y+ε_Y I)^{-2} G_Y G_X (G_X+ε_X I)^{-1}`.
pub fn kcca_matrix(gx: &EigenPair, gy: &EigenPair, eps_x: f64, eps_y: f64) -> Result<DMatrix<f64>> {
    check_eps(eps_x)?;
    check_eps(eps_y)?;
    let rx = gx.spectral_map(|l| clip_pow(l, 1.0) * ridge_inv(l, eps_x, 1.0));
    let cy = gy.spectral_map(|l| clip_pow(l, 2.0) * ridge_inv(l, eps_y, 2.0));
    let mut m = &rx * cy * &rx;
    crate::linalg::symmetrize_in_place(&mut m);
    Ok(m)
}

impl Estimator for Kcca {
    fn kind(&self) -> MethodKind {
        MethodKind::Kcca
    }

    fn spectral_problem(&self, x: &DataMatrix, y: &DataMatrix, hyper: &Hyper) -> Result<SpectralProblem> {
        let gx = centered_gram_eig(x, &hyper.x_kernel()?)?;
        let gy = centered_gram_eig(y, &hyper.y_kernel()?)?;
        Ok(SpectralProblem {
            matrix: kcca_matrix(&gx, &gy, hyper.eps_x, hyper.eps_y)?,
            coord_map: gx.spectral_map(|l| ridge_inv(l, hyper.eps_x, 1.0)),
        })
    }
}
