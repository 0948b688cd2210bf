//! Analytic kernels for the classical baselines.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicalKind {
    Linear,
    Poly,
    Rbf,
    Sigmoid,
}

impl ClassicalKind {
    pub const ALL: [ClassicalKind; 4] = [
        ClassicalKind::Linear,
        ClassicalKind::Poly,
        ClassicalKind::Rbf,
        ClassicalKind::Sigmoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassicalKind::Linear => "linear",
            ClassicalKind::Poly => "poly",
            ClassicalKind::Rbf => "rbf",
            ClassicalKind::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for ClassicalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassicalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(ClassicalKind::Linear),
            "poly" | "polynomial" => Ok(ClassicalKind::Poly),
            "rbf" => Ok(ClassicalKind::Rbf),
            "sigmoid" => Ok(ClassicalKind::Sigmoid),
            _ => Err(arg_err!("unknown classical kernel '{s}'")),
        }
    }
}

/// `Linear: x.z`, `Poly: (gamma x.z + coef0)^degree`,
/// `RBF: exp(-gamma |x - z|^2)`, `Sigmoid: tanh(gamma x.z + coef0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalKernel {
    pub kind: ClassicalKind,
    pub gamma: f64,
    pub degree: u32,
    pub coef0: f64,
}

impl ClassicalKernel {
    pub fn new(kind: ClassicalKind, gamma: f64) -> Self {
        Self {
            kind,
            gamma,
            degree: 3,
            coef0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || !self.coef0.is_finite() {
            return Err(arg_err!("kernel parameters must be finite"));
        }
        if self.kind == ClassicalKind::Rbf && self.gamma <= 0.0 {
            return Err(arg_err!("rbf kernel needs gamma > 0, got {}", self.gamma));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        let dot = || x.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        match self.kind {
            ClassicalKind::Linear => dot(),
            ClassicalKind::Poly => libm::pow(self.gamma * dot() + self.coef0, self.degree as f64),
            ClassicalKind::Rbf => {
                let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::exp(-self.gamma * d2)
            }
            ClassicalKind::Sigmoid => libm::tanh(self.gamma * dot() + self.coef0),
        }
    }

    /// Gram matrix of `train`, or `K(test_i, train_j)` when `test` is given.
    pub fn matrix<R: AsRef<[f64]>>(&self, train: &[R], test: Option<&[R]>) -> Result<Matrix> {
        self.validate()?;
        let rows = test.unwrap_or(train);
        let dim = train.first().map(|r| r.as_ref().len());
        if rows
            .iter()
            .chain(train)
            .any(|r| Some(r.as_ref().len()) != dim)
        {
            return Err(arg_err!("feature vectors have inconsistent lengths"));
        }
        let data: Vec<f64> = rows
            .iter()
            .flat_map(|x| train.iter().map(move |z| self.eval(x.as_ref(), z.as_ref())))
            .collect();
        Matrix::from_vec(rows.len(), train.len(), data)
    }
}

/// `1 / (n_features * var(X))` over all training entries; 1.0 when the data
/// has zero variance.
pub fn gamma_scale<R: AsRef<[f64]>>(train: &[R]) -> f64 {
    let values: Vec<f64> = train
        .iter()
        .flat_map(|r| r.as_ref().iter().copied())
        .collect();
    let n_features = train.first().map_or(0, |r| r.as_ref().len());
    if values.is_empty() || n_features == 0 {
        return 1.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    if var > 0.0 {
        1.0 / (n_features as f64 * var)
    } else {
        1.0
    }
}

/// Free-function form of [`ClassicalKernel::eval`].
pub fn classical_kernel(x: &[f64], z: &[f64], spec: &ClassicalKernel) -> f64 {
    spec.eval(x, z)
}
