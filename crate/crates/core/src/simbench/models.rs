//! Predictor scenarios A–C and regression models I–VI.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Standard deviation of the additive or multiplicative noise (variance 0.25).
pub const NOISE_SD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Independent standard normals.
    A,
    /// Per row, all coordinates shifted by a common ±1 (fair coin), plus N(0, I).
    B,
    /// Equicorrelated normals, covariance `0.6 I + 0.4 11ᵀ`.
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Self::A, Self::B, Self::C];
}

impl Model {
    pub const ALL: [Model; 6] = [Self::I, Self::II, Self::III, Self::IV, Self::V, Self::VI];

    /// Models I–III carry the signal in the conditional mean, IV–VI in the variance.
    pub fn is_mean_model(self) -> bool {
        matches!(self, Self::I | Self::II | Self::III)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
            Self::V => "V",
            Self::VI => "VI",
        }
    }

    /// The true sufficient predictor `g(x)`.
    pub fn truth(self, x1: f64, x2: f64) -> f64 {
        match self {
            Self::I => {
                let r = (x1 * x1 + x2 * x2).sqrt();
                if r == 0.0 {
                    0.0
                } else {
                    r * r.ln()
                }
            }
            Self::II | Self::VI => x1 / (1.0 + x2.exp()),
            Self::III => (std::f64::consts::PI * (x1 + x2) / 10.0).sin(),
            Self::IV => x1,
            Self::V => (x1.powi(3) + x2.powi(3)) / 50.0,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
        })
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            _ => Err(Error::InvalidInput(format!("unknown scenario `{s}` (expected A, B or C)"))),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == up)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model `{s}` (expected I..VI)")))
    }
}

pub fn gen_scenario<R: Rng + ?Sized>(scenario: Scenario, n: usize, p: usize, rng: &mut R) -> DataMatrix {
    let mut m = DMatrix::zeros(n, p);
    let (w_own, w_shared) = (0.6f64.sqrt(), 0.4f64.sqrt());
    for i in 0..n {
        match scenario {
            Scenario::A => {
                for j in 0..p {
                    m[(i, j)] = StandardNormal.sample(rng);
                }
            }
            Scenario::B => {
                let shift = if rng.random::<bool>() { 1.0 } else { -1.0 };
                for j in 0..p {
                    let z: f64 = StandardNormal.sample(rng);
                    m[(i, j)] = shift + z;
                }
            }
            Scenario::C => {
                // X = √0.6 Z + √0.4 W 1, a factorization of 0.6 I + 0.4 11ᵀ
                let shared: f64 = StandardNormal.sample(rng);
                for j in 0..p {
                    let z: f64 = StandardNormal.sample(rng);
                    m[(i, j)] = w_own * z + w_shared * shared;
                }
            }
        }
    }
    DataMatrix::new(m).expect("normal draws are finite")
}

/// Draws `Y` given `X`; returns `(Y, g(X))`.
pub fn gen_response<R: Rng + ?Sized>(model: Model, x: &DataMatrix, rng: &mut R) -> Result<(DataMatrix, Vec<f64>)> {
    if x.ncols() < 2 {
        return Err(Error::InvalidInput(format!(
            "models need at least two predictors, got {}",
            x.ncols()
        )));
    }
    let m = x.matrix();
    let truth: Vec<f64> = (0..x.nrows()).map(|i| model.truth(m[(i, 0)], m[(i, 1)])).collect();
    let y: Vec<f64> = truth
        .iter()
        .map(|&g| {
            let z: f64 = StandardNormal.sample(rng);
            let e = NOISE_SD * z;
            if model.is_mean_model() {
                g + e
            } else {
                g * e
            }
        })
        .collect();
    Ok((DataMatrix::from_column(&y)?, truth))
}
