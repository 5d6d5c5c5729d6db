//! Leave-one-out cross-validation of the kernel bandwidths.
//!
//! For fold `i` the conditional mean operator `E'_{Y|X}` is re-estimated
//! without observation `i`, and used to predict the values at `Y_i` of every
//! remaining Y-side basis function `κ_Y(·, Y_k)` (plus the constant) from
//! `X_i`. The criterion is the total squared prediction error over folds.
//!
//! Only `γ_X` is searched; `ε_X` and `γ_Y` stay at their initial values. The
//! Y-side parameters are chosen the same way with the roles swapped.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::estimators::Hyper;
use crate::kernels::{bandwidth_heuristic, gram_matrix, with_intercept, KernelSpec};
use crate::textfmt::sig6;

/// Fixed ridge for the X side.
pub const EPS_X0: f64 = 0.01;
/// Fixed ridge for the Y side.
pub const EPS_Y0: f64 = 0.001;
/// Number of subintervals of the log-spaced grid; the grid has one more point.
pub const GRID_INTERVALS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CvTrace {
    pub grid: Vec<f64>,
    pub criterion: Vec<f64>,
    pub chosen_gamma: f64,
    pub fixed_eps: f64,
}

impl CvTrace {
    pub fn argmin(&self) -> usize {
        argmin_first(&self.criterion)
    }

    /// `gamma,criterion` CSV with six significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("gamma,criterion\n");
        for (g, c) in self.grid.iter().zip(&self.criterion) {
            s.push_str(&format!("{},{}\n", sig6(*g), sig6(*c)));
        }
        s
    }
}

/// Both halves of a tuning run.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuned {
    pub gamma_x: f64,
    pub eps_x: f64,
    pub gamma_y: f64,
    pub eps_y: f64,
    pub x_trace: CvTrace,
    pub y_trace: CvTrace,
}

impl Tuned {
    pub fn hyper(&self, d: usize) -> Hyper {
        Hyper::new(self.gamma_x, self.eps_x, self.gamma_y, self.eps_y, d)
    }
}

/// `GRID_INTERVALS + 1` points, equally spaced in log scale over `[center/3, 3·center]`.
pub fn log_grid(center: f64) -> Vec<f64> {
    let lo = (center / 3.0).ln();
    let hi = (center * 3.0).ln();
    (0..=GRID_INTERVALS)
        .map(|k| match k {
            0 => center / 3.0,
            GRID_INTERVALS => center * 3.0,
            _ => (lo + (hi - lo) * k as f64 / GRID_INTERVALS as f64).exp(),
        })
        .collect()
}

fn argmin_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &c) in v.iter().enumerate() {
        if c < v[best] {
            best = i;
        }
    }
    best
}

fn check_cv_inputs(x: &DataMatrix, y: &DataMatrix, eps_x: f64) -> Result<()> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            actual: y.nrows(),
        });
    }
    if x.nrows() < 3 {
        return Err(Error::InvalidInput(format!(
            "cross-validation needs at least 3 observations, got {}",
            x.nrows()
        )));
    }
    crate::linalg::check_eps(eps_x)
}

fn intercept_grams(x: &DataMatrix, y: &DataMatrix, gamma_x: f64, gamma_y: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let lx = with_intercept(&gram_matrix(x, &KernelSpec::gaussian(gamma_x)?));
    let ly = with_intercept(&gram_matrix(y, &KernelSpec::gaussian(gamma_y)?));
    Ok((lx, ly))
}

/// Leave-one-out criterion `Σ_i ‖Δ_i‖²`.
///
/// Each fold needs `(AᵀA + εI)^{-1}` for `A = L_X` with one kernel row and one
/// column removed. Writing `N = L̃ᵀL̃ + εI` for the row-deleted matrix, the fold
/// residual is `Δ_i = L̃_Y S e_i / S_ii` with `S = N^{-1}`, and `S e_i` follows
/// from a single inverse of `L_XᵀL_X + εI` by a rank-one downdate. Total cost is
/// O(n³) per call.
pub fn cv_criterion(x: &DataMatrix, y: &DataMatrix, gamma_x: f64, eps_x: f64, gamma_y: f64) -> Result<f64> {
    check_cv_inputs(x, y, eps_x)?;
    let n = x.nrows();
    let (lx, ly) = intercept_grams(x, y, gamma_x, gamma_y)?;
    let mut f = lx.transpose() * &lx;
    for i in 0..n {
        f[(i, i)] += eps_x;
    }
    let p = f
        .cholesky()
        .ok_or_else(|| Error::Numerical("L_XᵀL_X + εI is not positive definite".into()))?
        .inverse();

    let mut total = 0.0;
    for i in 0..n {
        let r = lx.row(i + 1).transpose();
        let u = &p * &r;
        let s = 1.0 - r.dot(&u);
        if s.is_nan() || s <= 0.0 {
            return Err(Error::Numerical(format!("fold {i}: downdate lost positive definiteness")));
        }
        let mut col: DVector<f64> = p.column(i).into_owned();
        col.axpy(u[i] / s, &u, 1.0);
        let pivot = col[i];
        col /= pivot;
        let mut delta = &ly * col;
        // row i+1 of L_Y belongs to the held-out basis function
        delta[i + 1] = 0.0;
        total += delta.norm_squared();
    }
    Ok(total)
}

/// The same criterion computed fold by fold from explicitly deleted matrices,
/// with no reuse between folds. O(n⁴); meant for checking [`cv_criterion`].
pub fn cv_criterion_reference(x: &DataMatrix, y: &DataMatrix, gamma_x: f64, eps_x: f64, gamma_y: f64) -> Result<f64> {
    check_cv_inputs(x, y, eps_x)?;
    let n = x.nrows();
    let (lx, ly) = intercept_grams(x, y, gamma_x, gamma_y)?;
    let keep_rows = |i: usize| (0..=n).filter(move |&r| r != i + 1).collect::<Vec<_>>();
    let keep_cols = |i: usize| (0..n).filter(move |&c| c != i).collect::<Vec<_>>();
    let mut total = 0.0;
    for i in 0..n {
        let rows = keep_rows(i);
        let cols = keep_cols(i);
        let lx_i = lx.select_rows(&rows);
        let ly_i = ly.select_rows(&rows);
        let a = lx_i.select_columns(&cols);
        let b = ly_i.select_columns(&cols);
        let mut gram = &a * a.transpose();
        for k in 0..n {
            gram[(k, k)] += eps_x;
        }
        let e_hat = gram
            .cholesky()
            .ok_or_else(|| Error::Numerical(format!("fold {i}: AAᵀ + εI is not positive definite")))?
            .solve(&(&a * b.transpose()));
        let delta = ly_i.column(i) - e_hat.transpose() * lx_i.column(i);
        total += delta.norm_squared();
    }
    Ok(total)
}

fn sweep(
    x: &DataMatrix,
    y: &DataMatrix,
    center: f64,
    eps: f64,
    gamma_y: f64,
) -> Result<CvTrace> {
    let grid = log_grid(center);
    let criterion = grid
        .par_iter()
        .map(|&g| cv_criterion(x, y, g, eps, gamma_y))
        .collect::<Result<Vec<_>>>()?;
    let chosen_gamma = grid[argmin_first(&criterion)];
    Ok(CvTrace {
        grid,
        criterion,
        chosen_gamma,
        fixed_eps: eps,
    })
}

/// Picks `γ_X` on the log grid around the heuristic value, holding
/// `ε_X = 0.01` and `γ_Y` at its heuristic value.
pub fn select_x_params(x: &DataMatrix, y: &DataMatrix) -> Result<(f64, f64, CvTrace)> {
    let gamma_y0 = bandwidth_heuristic(y)?;
    let gamma_x0 = bandwidth_heuristic(x)?;
    let trace = sweep(x, y, gamma_x0, EPS_X0, gamma_y0)?;
    Ok((trace.chosen_gamma, EPS_X0, trace))
}

/// [`select_x_params`] with the roles of X and Y exchanged and `ε_Y = 0.001`.
pub fn select_y_params(x: &DataMatrix, y: &DataMatrix) -> Result<(f64, f64, CvTrace)> {
    let gamma_x0 = bandwidth_heuristic(x)?;
    let gamma_y0 = bandwidth_heuristic(y)?;
    let trace = sweep(y, x, gamma_y0, EPS_Y0, gamma_x0)?;
    Ok((trace.chosen_gamma, EPS_Y0, trace))
}

pub fn tune(x: &DataMatrix, y: &DataMatrix) -> Result<Tuned> {
    let (gamma_x, eps_x, x_trace) = select_x_params(x, y)?;
    let (gamma_y, eps_y, y_trace) = select_y_params(x, y)?;
    Ok(Tuned {
        gamma_x,
        eps_x,
        gamma_y,
        eps_y,
        x_trace,
        y_trace,
    })
}
