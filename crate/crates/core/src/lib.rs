//! Nonlinear sufficient dimension reduction with reproducing kernels.
//!
//! The crate estimates a handful of nonlinear predictor functions `f_1(X), ..., f_d(X)`
//! that carry the information in `X` about a response `Y`. Four estimators are
//! provided behind the [`estimators::Estimator`] trait and can be selected by name
//! through [`estimators::Registry`]:
//!
//! | name    | targets                                                   |
//! |---------|-----------------------------------------------------------|
//! | `gsir`  | predictors entering the conditional mean                  |
//! | `gsave` | predictors entering the conditional variance              |
//! | `kcca`  | kernel canonical correlation baseline                     |
//! | `ksir`  | kernel sliced inverse regression baseline (univariate Y)  |
//!
//! Kernel bandwidths are picked by leave-one-out cross-validation in [`tuning`],
//! and [`simbench`] contains the simulation models plus a Monte Carlo harness
//! that scores estimated predictors by absolute Spearman correlation.
//!
//! ```
//! use nlsdr_core::{estimators::{Hyper, Registry}, DataMatrix};
//!
//! let x = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
//! let y = DataMatrix::from_column(&[0.1, 0.9, 4.2, 8.8]).unwrap();
//! let hyper = Hyper::new(0.5, 0.01, 0.5, 0.001, 1);
//! let model = Registry::builtin().fit("gsir", &x, &y, &hyper).unwrap();
//! let preds = model.predict(&x).unwrap();
//! assert_eq!(preds.shape(), (4, 1));
//! ```

pub mod data;
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod linalg;
pub mod simbench;
pub mod textfmt;
pub mod tuning;

pub use data::DataMatrix;
pub use error::{Error, Result};
