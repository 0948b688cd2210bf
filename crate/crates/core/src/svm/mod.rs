//! Kernel SVM: training on precomputed kernels, prediction, and evaluation
//! metrics.

mod kernel;
mod metrics;
mod smo;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::qkernel::KernelMeta;

pub use kernel::{classical_kernel, gamma_scale, ClassicalKernel, ClassicalKind};
pub use metrics::{evaluate, ClassMetrics, Metrics, Scores};
pub use smo::{dual_objective, train_smo, train_smo_traced};

/// Multipliers at or below this count as zero.
pub const SUPPORT_EPS: f64 = 1e-8;

/// Binary class. Defects are the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Good,
    Defect,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Good => -1.0,
            Label::Defect => 1.0,
        }
    }

    pub fn from_decision(f: f64) -> Self {
        if f >= 0.0 {
            Label::Defect
        } else {
            Label::Good
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Good => "good",
            Label::Defect => "defect",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Good => Label::Defect,
            Label::Defect => Label::Good,
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        match l {
            Label::Good => -1,
            Label::Defect => 1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            -1 => Ok(Label::Good),
            1 => Ok(Label::Defect),
            _ => Err(arg_err!("label must be -1 or +1, got {v}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "good" | "-1" => Ok(Label::Good),
            "defect" | "1" | "+1" => Ok(Label::Defect),
            _ => Err(arg_err!("unknown label '{s}' (expected good or defect)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_passes: 50,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(arg_err!(
                "C must be a positive finite number, got {}",
                self.c
            ));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(arg_err!("tol must be positive, got {}", self.tol));
        }
        if self.max_passes == 0 {
            return Err(arg_err!("max_passes must be >= 1"));
        }
        Ok(())
    }
}

/// The kernel a model was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSource {
    Quantum(KernelMeta),
    Classical(ClassicalKernel),
}

/// Trained dual SVM. The decision value for a point `s` is
/// `sum_i y_i a_i K(x_i, s) + b`, and its label is the sign (0 maps to
/// [`Label::Defect`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub alphas: Vec<f64>,
    pub labels: Vec<Label>,
    pub bias: f64,
    pub c: f64,
    pub support_indices: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub kernel: Option<KernelSource>,
    /// Identifies the training features (e.g. a file path or digest).
    pub train_ref: Option<String>,
}

impl SvmModel {
    fn degenerate(labels: Vec<Label>, bias: f64, params: &SvmParams) -> Self {
        let n = labels.len();
        Self {
            alphas: alloc::vec![0.0; n],
            labels,
            bias,
            c: params.c,
            support_indices: Vec::new(),
            iterations: 0,
            converged: true,
            kernel: None,
            train_ref: None,
        }
    }

    pub fn n_train(&self) -> usize {
        self.alphas.len()
    }

    /// Decision value from kernel values `K(x_i, s)` against every training
    /// point.
    pub fn decision(&self, k_row: &[f64]) -> Result<f64> {
        if k_row.len() != self.alphas.len() {
            return Err(arg_err!(
                "kernel row has {} entries, model was trained on {}",
                k_row.len(),
                self.alphas.len()
            ));
        }
        let sum: f64 = self
            .alphas
            .iter()
            .zip(&self.labels)
            .zip(k_row)
            .map(|((a, y), k)| a * y.sign() * k)
            .sum();
        Ok(sum + self.bias)
    }

    pub fn dual_objective(&self, k: &crate::linalg::Matrix) -> f64 {
        dual_objective(k, &self.labels, &self.alphas)
    }
}

/// Label and decision value for one test point.
pub fn predict(model: &SvmModel, k_row: &[f64]) -> Result<(Label, f64)> {
    let f = model.decision(k_row)?;
    Ok((Label::from_decision(f), f))
}

/// Predicts every row of a `test x train` kernel matrix.
pub fn predict_rows(model: &SvmModel, k: &crate::linalg::Matrix) -> Result<Vec<(Label, f64)>> {
    k.row_iter().map(|row| predict(model, row)).collect()
}
