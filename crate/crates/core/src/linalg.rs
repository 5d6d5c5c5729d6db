//! Symmetric spectral decompositions and the matrix functions built on them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100_000;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
///
/// Each eigenvector is sign-normalized so that its largest-magnitude entry is
/// positive (the first such entry on ties).
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenPair {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(λ)) Vᵀ`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.vectors[(i, j)] * f(self.values[j])
        });
        let mut out = scaled * self.vectors.transpose();
        symmetrize_in_place(&mut out);
        out
    }

    /// The leading `d` eigenpairs.
    pub fn leading(&self, d: usize) -> (DVector<f64>, DMatrix<f64>) {
        let d = d.min(self.dim());
        (
            self.values.rows(0, d).into_owned(),
            self.vectors.columns(0, d).into_owned(),
        )
    }
}

pub fn symmetrize_in_place(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in 0..j {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

pub fn sym_eig(a: &DMatrix<f64>) -> Result<EigenPair> {
    if !a.is_square() {
        return Err(Error::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let n = a.nrows();
    let mut sym = a.clone();
    symmetrize_in_place(&mut sym);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));

    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for i in 1..n {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        vectors.column_mut(dst).copy_from(&(v * sign));
    }
    Ok(EigenPair { values, vectors })
}

/// `A^alpha` for symmetric PSD `A`; negative eigenvalues are clipped to zero first.
pub fn psd_power(a: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    Ok(sym_eig(a)?.spectral_map(|l| clip_pow(l, alpha)))
}

/// `(A + eps I)^(-alpha)` for symmetric PSD `A`, with clipping as in [`psd_power`].
pub fn ridge_inv_power(a: &DMatrix<f64>, eps: f64, alpha: f64) -> Result<DMatrix<f64>> {
    check_eps(eps)?;
    Ok(sym_eig(a)?.spectral_map(|l| ridge_inv(l, eps, alpha)))
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("ridge eps must be positive, got {eps}")))
    }
}

#[inline]
pub fn clip_pow(l: f64, alpha: f64) -> f64 {
    let l = l.max(0.0);
    if alpha == 1.0 {
        l
    } else if l == 0.0 {
        0.0
    } else {
        l.powf(alpha)
    }
}

#[inline]
pub fn ridge_inv(l: f64, eps: f64, alpha: f64) -> f64 {
    let s = l.max(0.0) + eps;
    if alpha == 1.0 {
        1.0 / s
    } else {
        s.powf(-alpha)
    }
}

/// Largest absolute entry, used as a cheap matrix scale.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}
