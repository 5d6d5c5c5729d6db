//! Independent fold-by-fold leave-one-out oracle.
//!
//! Rebuilds every matrix from scratch with plain loops and solves the
//! regularized normal equations by Gaussian elimination, sharing no code with
//! the library.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn gauss(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// `(n+1) × n` matrix with a row of ones on top of the Gram matrix.
fn intercept_gram(rows: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut l = vec![vec![1.0; n]];
    for i in 0..n {
        l.push((0..n).map(|j| gauss(&rows[i], &rows[j], gamma)).collect());
    }
    l
}

/// Solves `a x = b` for several right-hand sides with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            for c in 0..m {
                b[r][c] -= f * b[col][c];
            }
        }
    }
    let mut x = vec![vec![0.0; m]; n];
    for r in (0..n).rev() {
        for c in 0..m {
            let mut s = b[r][c];
            for k in r + 1..n {
                s -= a[r][k] * x[k][c];
            }
            x[r][c] = s / a[r][r];
        }
    }
    x
}

pub fn oracle(x: &[Vec<f64>], y: &[Vec<f64>], gamma_x: f64, eps: f64, gamma_y: f64) -> f64 {
    let n = x.len();
    let lx = intercept_gram(x, gamma_x);
    let ly = intercept_gram(y, gamma_y);
    let mut total = 0.0;
    for i in 0..n {
        let rows: Vec<usize> = (0..=n).filter(|&r| r != i + 1).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        let a: Vec<Vec<f64>> = rows.iter().map(|&r| cols.iter().map(|&c| lx[r][c]).collect()).collect();
        let b: Vec<Vec<f64>> = rows.iter().map(|&r| cols.iter().map(|&c| ly[r][c]).collect()).collect();
        let k = rows.len();
        // AAᵀ + εI and ABᵀ
        let mut lhs = vec![vec![0.0; k]; k];
        let mut rhs = vec![vec![0.0; k]; k];
        for r in 0..k {
            for s in 0..k {
                for c in 0..cols.len() {
                    lhs[r][s] += a[r][c] * a[s][c];
                    rhs[r][s] += a[r][c] * b[s][c];
                }
            }
            lhs[r][r] += eps;
        }
        let e_hat = solve(lhs, rhs);
        for s in 0..k {
            let mut pred = 0.0;
            for r in 0..k {
                pred += e_hat[r][s] * lx[rows[r]][i];
            }
            let d = ly[rows[s]][i] - pred;
            total += d * d;
        }
    }
    total
}

pub fn random_data(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let p = rng.random_range(1..=3);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let y: Vec<Vec<f64>> = x
        .iter()
        .map(|r| vec![r.iter().map(|v| v.sin()).sum::<f64>() + 0.3 * rng.random_range(-1.0..1.0)])
        .collect();
    (x, y)
}
