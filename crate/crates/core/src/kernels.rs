//! Gaussian kernels, Gram matrices and the bandwidth heuristic.
//!
//! For a sample `x_1..x_n` the [`GramBundle`] holds three views of the same
//! kernel evaluations:
//!
//! * `k`: the raw Gram matrix `K_ij = κ(x_i, x_j)`,
//! * `g`: the doubly centered `Q K Q` with `Q = I - 11ᵀ/n`,
//! * `l`: the `(n+1) × n` intercept-augmented matrix `(1, K)ᵀ`.

use nalgebra::{DMatrix, DVector};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelFamily {
    #[default]
    Gaussian,
}

/// Kernel family plus its inverse squared length-scale `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub gamma: f64,
}

impl KernelSpec {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "kernel gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(Self {
            family: KernelFamily::Gaussian,
            gamma,
        })
    }

    #[inline]
    fn eval_sq_dist(&self, d2: f64) -> f64 {
        match self.family {
            KernelFamily::Gaussian => (-self.gamma * d2).exp(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GramBundle {
    pub k: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub l: DMatrix<f64>,
}

pub fn kernel_eval(x: &[f64], x2: &[f64], spec: &KernelSpec) -> Result<f64> {
    if x.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: x2.len(),
        });
    }
    let d2: f64 = x.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(spec.eval_sq_dist(d2))
}

/// Squared Euclidean distances between the rows of `a` and the rows of `b`.
fn sq_dists(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), b.nrows());
    for k in 0..a.ncols() {
        let ca = a.column(k);
        let cb = b.column(k);
        for j in 0..b.nrows() {
            let bj = cb[j];
            for i in 0..a.nrows() {
                let t = ca[i] - bj;
                out[(i, j)] += t * t;
            }
        }
    }
    out
}

/// Raw Gram matrix `K` only.
pub fn gram_matrix(data: &DataMatrix, spec: &KernelSpec) -> DMatrix<f64> {
    let n = data.nrows();
    let m = data.matrix();
    let mut k = sq_dists(m, m).map(|d2| spec.eval_sq_dist(d2));
    // Enforce exact symmetry and a unit diagonal.
    for i in 0..n {
        k[(i, i)] = spec.eval_sq_dist(0.0);
        for j in 0..i {
            k[(j, i)] = k[(i, j)];
        }
    }
    k
}

/// `Q A Q` for square `A`, computed by subtracting row and column means.
pub fn double_center(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| a.row(i).sum() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| a.column(j).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    DMatrix::from_fn(n, n, |i, j| a[(i, j)] - row_means[i] - col_means[j] + grand)
}

/// `(1_n, K)ᵀ`.
pub fn with_intercept(k: &DMatrix<f64>) -> DMatrix<f64> {
    let n = k.ncols();
    let mut l = DMatrix::from_element(k.nrows() + 1, n, 1.0);
    l.rows_mut(1, k.nrows()).copy_from(&k.transpose());
    l
}

/// The centering projection `Q = I_n - 1_n 1_nᵀ / n`.
pub fn centering_matrix(n: usize) -> DMatrix<f64> {
    let c = 1.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 - c } else { -c })
}

pub fn build_gram(data: &DataMatrix, spec: &KernelSpec) -> GramBundle {
    let k = gram_matrix(data, spec);
    let g = double_center(&k);
    let l = with_intercept(&k);
    GramBundle { k, g, l }
}

/// Kernel evaluations between a new point and every training point.
///
/// Returns `h` with `h_i = κ(x, X_i)` and `ell = (1, h)`.
pub fn cross_kernel(
    train: &DataMatrix,
    x: &[f64],
    spec: &KernelSpec,
) -> Result<(DVector<f64>, DVector<f64>)> {
    if x.len() != train.ncols() {
        return Err(Error::DimensionMismatch {
            expected: train.ncols(),
            actual: x.len(),
        });
    }
    let n = train.nrows();
    let m = train.matrix();
    let h = DVector::from_fn(n, |i, _| {
        let d2: f64 = (0..m.ncols()).map(|k| (m[(i, k)] - x[k]).powi(2)).sum();
        spec.eval_sq_dist(d2)
    });
    let mut ell = DVector::from_element(n + 1, 1.0);
    ell.rows_mut(1, n).copy_from(&h);
    Ok((h, ell))
}

/// `κ(xnew_j, train_i)` for every pair, as an `m × n` matrix.
pub fn cross_gram(train: &DataMatrix, xnew: &DataMatrix, spec: &KernelSpec) -> Result<DMatrix<f64>> {
    if xnew.ncols() != train.ncols() {
        return Err(Error::DimensionMismatch {
            expected: train.ncols(),
            actual: xnew.ncols(),
        });
    }
    Ok(sq_dists(xnew.matrix(), train.matrix()).map(|d2| spec.eval_sq_dist(d2)))
}

/// Inverse of the mean squared pairwise distance over all `n choose 2` pairs.
pub fn bandwidth_heuristic(data: &DataMatrix) -> Result<f64> {
    let n = data.nrows();
    if n < 2 {
        return Err(Error::InvalidInput(
            "bandwidth heuristic needs at least two observations".into(),
        ));
    }
    let m = data.matrix();
    let mut total = 0.0;
    for j in 1..n {
        for i in 0..j {
            total += (0..m.ncols()).map(|k| (m[(i, k)] - m[(j, k)]).powi(2)).sum::<f64>();
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let mean = total / pairs;
    if mean.is_nan() || mean <= 0.0 {
        return Err(Error::DegenerateData(
            "all observations are identical, mean squared distance is zero".into(),
        ));
    }
    Ok(1.0 / mean)
}
