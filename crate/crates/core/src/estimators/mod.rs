//! The four nonlinear SDR estimators and the runtime registry that selects them.
//!
//! Every estimator produces `d` predictor functions of the form
//! `x ↦ basis(x)ᵀ coeffs_i`, where `basis(x)` is the vector of kernel
//! evaluations against the training points (`h`, length `n`) or its
//! intercept-augmented version (`ℓ`, length `n + 1`, GSAVE only).

mod gsave;
mod gsir;
mod kcca;
mod ksir;
mod persist;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::kernels::{cross_gram, KernelSpec};
use crate::linalg::{sym_eig, EigenPair};

pub use gsave::{gsave_matrix, gsave_matrix_direct, gsave_weights, Gsave};
pub use gsir::{gsir_matrix, Gsir};
pub use kcca::{kcca_matrix, Kcca};
pub use ksir::{ksir_matrix, slice_indices, Ksir};
pub use persist::FORMAT_VERSION;

/// Power applied to the regularized `L_Y L_Yᵀ` when forming GSAVE weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GsaveExponent {
    /// Full inverse, consistent with the conditional-mean representation.
    #[default]
    Derivation,
    /// Inverse square root.
    Printed,
}

impl GsaveExponent {
    pub fn power(self) -> f64 {
        match self {
            GsaveExponent::Derivation => 1.0,
            GsaveExponent::Printed => 0.5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GsaveExponent::Derivation => "derivation",
            GsaveExponent::Printed => "printed",
        }
    }
}

impl FromStr for GsaveExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derivation" => Ok(Self::Derivation),
            "printed" => Ok(Self::Printed),
            other => Err(Error::InvalidInput(format!(
                "unknown GSAVE exponent `{other}` (expected `derivation` or `printed`)"
            ))),
        }
    }
}

/// Hyperparameters shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub gamma_x: f64,
    pub eps_x: f64,
    pub gamma_y: f64,
    pub eps_y: f64,
    /// Number of predictor functions to extract.
    pub d: usize,
    /// KSIR slice count.
    pub slices: usize,
    pub gsave_exponent: GsaveExponent,
}

impl Hyper {
    pub fn new(gamma_x: f64, eps_x: f64, gamma_y: f64, eps_y: f64, d: usize) -> Self {
        Self {
            gamma_x,
            eps_x,
            gamma_y,
            eps_y,
            d,
            slices: 10,
            gsave_exponent: GsaveExponent::Derivation,
        }
    }

    pub fn with_slices(mut self, slices: usize) -> Self {
        self.slices = slices;
        self
    }

    pub fn with_gsave_exponent(mut self, e: GsaveExponent) -> Self {
        self.gsave_exponent = e;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_x", self.gamma_x),
            ("eps_x", self.eps_x),
            ("gamma_y", self.gamma_y),
            ("eps_y", self.eps_y),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.d == 0 {
            return Err(Error::InvalidInput("d must be at least 1".into()));
        }
        if self.slices < 2 {
            return Err(Error::InvalidInput(format!(
                "slices must be at least 2, got {}",
                self.slices
            )));
        }
        Ok(())
    }

    pub fn x_kernel(&self) -> Result<KernelSpec> {
        KernelSpec::gaussian(self.gamma_x)
    }

    pub fn y_kernel(&self) -> Result<KernelSpec> {
        KernelSpec::gaussian(self.gamma_y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    Gsir,
    Gsave,
    Kcca,
    Ksir,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] = [Self::Gsir, Self::Gsave, Self::Kcca, Self::Ksir];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Gsir => "gsir",
            Self::Gsave => "gsave",
            Self::Kcca => "kcca",
            Self::Ksir => "ksir",
        }
    }

    /// Whether predictors are expanded in `(1, h(x))` rather than `h(x)`.
    pub fn uses_intercept(self) -> bool {
        matches!(self, Self::Gsave)
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// A fitted set of predictor functions.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub kind: MethodKind,
    pub hyper: Hyper,
    pub train_x: DataMatrix,
    /// Column `i` holds the coordinates of predictor `i`.
    pub coeffs: DMatrix<f64>,
    pub eigvals: DVector<f64>,
}

impl FittedModel {
    pub fn d(&self) -> usize {
        self.coeffs.ncols()
    }

    /// Predictor values, one row per row of `xnew` and one column per predictor.
    pub fn predict(&self, xnew: &DataMatrix) -> Result<DMatrix<f64>> {
        let spec = self.hyper.x_kernel()?;
        let h = cross_gram(&self.train_x, xnew, &spec)?;
        if self.kind.uses_intercept() {
            let c = &self.coeffs;
            let n = self.train_x.nrows();
            let mut out = &h * c.rows(1, n);
            for mut row in out.row_iter_mut() {
                row += c.row(0);
            }
            Ok(out)
        } else {
            Ok(h * &self.coeffs)
        }
    }
}

/// A nonlinear SDR estimator selectable at runtime.
pub trait Estimator: Send + Sync {
    fn kind(&self) -> MethodKind;

    fn name(&self) -> &'static str {
        self.kind().as_str()
    }

    /// Reject inputs this estimator cannot handle, before any work is done.
    fn check_inputs(&self, _x: &DataMatrix, _y: &DataMatrix, _hyper: &Hyper) -> Result<()> {
        Ok(())
    }

    /// The symmetric matrix whose leading eigenvectors define the predictors,
    /// plus the map taking an eigenvector to predictor coordinates.
    fn spectral_problem(&self, x: &DataMatrix, y: &DataMatrix, hyper: &Hyper)
        -> Result<SpectralProblem>;

    fn fit(&self, x: &DataMatrix, y: &DataMatrix, hyper: &Hyper) -> Result<FittedModel> {
        check_common(x, y, hyper)?;
        self.check_inputs(x, y, hyper)?;
        let problem = self.spectral_problem(x, y, hyper)?;
        let eig = sym_eig(&problem.matrix)?;
        let (eigvals, phi) = eig.leading(hyper.d);
        let coeffs = &problem.coord_map * phi;
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("{} produced non-finite coefficients", self.name())));
        }
        Ok(FittedModel {
            kind: self.kind(),
            hyper: *hyper,
            train_x: x.clone(),
            coeffs,
            eigvals,
        })
    }
}

/// Output of [`Estimator::spectral_problem`].
pub struct SpectralProblem {
    pub matrix: DMatrix<f64>,
    pub coord_map: DMatrix<f64>,
}

fn check_common(x: &DataMatrix, y: &DataMatrix, hyper: &Hyper) -> Result<()> {
    hyper.validate()?;
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            actual: y.nrows(),
        });
    }
    if x.nrows() < 2 {
        return Err(Error::InvalidInput("need at least two observations".into()));
    }
    if hyper.d > x.nrows() {
        return Err(Error::InvalidInput(format!(
            "d = {} exceeds the number of observations {}",
            hyper.d,
            x.nrows()
        )));
    }
    Ok(())
}

/// Name-keyed collection of estimators.
pub struct Registry {
    entries: Vec<Box<dyn Estimator>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// GSIR, GSAVE, KCCA and KSIR.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Gsir));
        r.register(Box::new(Gsave));
        r.register(Box::new(Kcca));
        r.register(Box::new(Ksir));
        r
    }

    /// Adds an estimator, replacing any existing one with the same name.
    pub fn register(&mut self, est: Box<dyn Estimator>) {
        self.entries.retain(|e| e.name() != est.name());
        self.entries.push(est);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Estimator> {
        let key = name.to_ascii_lowercase();
        self.entries
            .iter()
            .find(|e| e.name() == key)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn fit(&self, name: &str, x: &DataMatrix, y: &DataMatrix, hyper: &Hyper) -> Result<FittedModel> {
        self.get(name)?.fit(x, y, hyper)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Eigendecomposition of a centered Gram matrix, shared by the `G`-based estimators.
pub(crate) fn centered_gram_eig(data: &DataMatrix, spec: &KernelSpec) -> Result<EigenPair> {
    let k = crate::kernels::gram_matrix(data, spec);
    sym_eig(&crate::kernels::double_center(&k))
}
