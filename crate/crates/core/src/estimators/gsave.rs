//! Generalized sliced average variance estimation.
//!
//! For each training response `Y_i` the heteroscedastic conditional variance
//! of the X-side functions is represented by `Λ_i = diag(C_i) - C_i C_iᵀ`, where
//! `C_i` are the smoother weights from the Y-side Gram matrix. The estimator
//! averages `(Q/n - Λ_i) Q (Q/n - Λ_i)` over the sample and whitens by
//! `W = (L_X Q L_Xᵀ + ε_X I)^{-1/2}`.

use nalgebra::{DMatrix, DVector};

use super::{Estimator, GsaveExponent, Hyper, MethodKind, SpectralProblem};
use crate::data::DataMatrix;
use crate::error::Result;
use crate::kernels::{centering_matrix, gram_matrix, with_intercept};
use crate::linalg::{check_eps, ridge_inv, sym_eig, symmetrize_in_place};

pub struct Gsave;

/// `C = L_Yᵀ (L_Y L_Yᵀ + ε_Y I)^{-a} L_Y`, with `a` chosen by `exponent`.
pub fn gsave_weights(ly: &DMatrix<f64>, eps_y: f64, exponent: GsaveExponent) -> Result<DMatrix<f64>> {
    check_eps(eps_y)?;
    let a = exponent.power();
    let inner = sym_eig(&(ly * ly.transpose()))?.spectral_map(|l| ridge_inv(l, eps_y, a));
    let mut c = ly.transpose() * inner * ly;
    symmetrize_in_place(&mut c);
    Ok(c)
}

/// Subtracts each row's mean: `A Q`.
fn center_rows(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = a.clone();
    for mut row in out.row_iter_mut() {
        let mean = row.mean();
        row.add_scalar_mut(-mean);
    }
    out
}

/// Whitening matrix `W = (L_X Q L_Xᵀ + ε_X I)^{-1/2}`.
fn whitening(lx: &DMatrix<f64>, eps_x: f64) -> Result<DMatrix<f64>> {
    check_eps(eps_x)?;
    let lq = center_rows(lx);
    Ok(sym_eig(&(&lq * lq.transpose()))?.spectral_map(|l| ridge_inv(l, eps_x, 0.5)))
}

/// The GSAVE matrix `n⁻¹ Σ_i W L_X Q Γ_i Q Γ_i Q L_Xᵀ W` and the whitening `W`.
///
/// The sum over observations is expanded algebraically: with `B = Q L_Xᵀ W`,
/// `s = C 1`, `t = (C ∘ C) 1`, `P = BᵀC` and `E = Bᵀ(C ∘ QC)` it equals
/// `n⁻¹ [BᵀB/n + Bᵀ diag(t - 2s/n) B + P diag(1/n + ‖QC_i‖²) Pᵀ - E Pᵀ - P Eᵀ]`,
/// which costs O(n³) instead of O(n⁴).
pub fn gsave_matrix(lx: &DMatrix<f64>, c: &DMatrix<f64>, eps_x: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = c.nrows();
    let nf = n as f64;
    let w = whitening(lx, eps_x)?;
    let b = center_rows(lx).transpose() * &w;
    let qc = {
        let mut m = c.clone();
        for mut col in m.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        m
    };
    let s = DVector::from_fn(n, |k, _| c.row(k).sum());
    let t = DVector::from_fn(n, |k, _| c.row(k).iter().map(|v| v * v).sum::<f64>());
    let p = b.transpose() * c;
    let e = b.transpose() * c.component_mul(&qc);

    let mut db = b.clone();
    for (k, mut row) in db.row_iter_mut().enumerate() {
        row *= t[k] - 2.0 * s[k] / nf;
    }
    let mut pd = p.clone();
    for (i, mut col) in pd.column_iter_mut().enumerate() {
        col *= 1.0 / nf + qc.column(i).norm_squared();
    }
    let ep = &e * p.transpose();
    let mut m = b.transpose() * &b / nf + b.transpose() * db + pd * p.transpose() - &ep - ep.transpose();
    m /= nf;
    symmetrize_in_place(&mut m);
    Ok((m, w))
}

/// Term-by-term evaluation of the same sum as [`gsave_matrix`]; O(n⁴).
pub fn gsave_matrix_direct(lx: &DMatrix<f64>, c: &DMatrix<f64>, eps_x: f64) -> Result<DMatrix<f64>> {
    let n = c.nrows();
    let nf = n as f64;
    let q = centering_matrix(n);
    let w = whitening(lx, eps_x)?;
    let left = &w * lx * &q;
    let right = left.transpose();
    let mut acc = DMatrix::zeros(lx.nrows(), lx.nrows());
    for i in 0..n {
        let ci = c.column(i);
        let lambda = DMatrix::from_diagonal(&ci.into_owned()) - ci * ci.transpose();
        let gamma = &q / nf - lambda;
        acc += &left * &gamma * &q * &gamma * &right;
    }
    acc /= nf;
    symmetrize_in_place(&mut acc);
    Ok(acc)
}

impl Estimator for Gsave {
    fn kind(&self) -> MethodKind {
        MethodKind::Gsave
    }

    fn spectral_problem(&self, x: &DataMatrix, y: &DataMatrix, hyper: &Hyper) -> Result<SpectralProblem> {
        let ly = with_intercept(&gram_matrix(y, &hyper.y_kernel()?));
        let lx = with_intercept(&gram_matrix(x, &hyper.x_kernel()?));
        let c = gsave_weights(&ly, hyper.eps_y, hyper.gsave_exponent)?;
        let (m, w) = gsave_matrix(&lx, &c, hyper.eps_x)?;
        Ok(SpectralProblem { matrix: m, coord_map: w })
    }
}
