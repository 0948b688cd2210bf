//! Data-encoding feature maps and the kernel overlap circuit.
//!
//! Angle encoding puts `RX(x_i)` on qubit `i` (a product state). IQP encoding
//! repeats `depth` layers of
//!
//! ```text
//! H on every qubit; RZ(2 x_i) on qubit i; exp(-i x_i x_j Z_i Z_j) for each pair (i, j)
//! ```
//!
//! with the ZZ phase built either as `CNOT(i,j) RZ_j(2 x_i x_j) CNOT(i,j)` or,
//! equivalently up to global phase, as `CPHASE(-4 phi) RZ_i(2 phi) RZ_j(2 phi)`.
//! Features are expected to be pre-scaled to `[0, pi]`; nothing here rescales.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{arg_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Angle,
    Iqp,
}

/// Which qubit pairs get a ZZ interaction in an IQP layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairPattern {
    /// `(i, i + 1)` for consecutive qubits.
    Linear,
    /// Every `(i, j)` with `i < j`.
    All,
}

/// Gate realization of the two-qubit ZZ phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZzGate {
    Cnot,
    Cphase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub kind: EncodingKind,
    pub n_qubits: usize,
    /// IQP layer count; ignored for angle encoding.
    pub iqp_depth: usize,
    pub iqp_pairs: PairPattern,
    pub zz_gate: ZzGate,
}

impl EncodingSpec {
    pub fn angle(n_qubits: usize) -> Self {
        Self {
            kind: EncodingKind::Angle,
            n_qubits,
            iqp_depth: 2,
            iqp_pairs: PairPattern::Linear,
            zz_gate: ZzGate::Cnot,
        }
    }

    pub fn iqp(n_qubits: usize, depth: usize) -> Self {
        Self {
            kind: EncodingKind::Iqp,
            iqp_depth: depth,
            ..Self::angle(n_qubits)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(arg_err!("encoding needs at least one qubit"));
        }
        if self.kind == EncodingKind::Iqp && self.iqp_depth == 0 {
            return Err(arg_err!("iqp_depth must be >= 1"));
        }
        Ok(())
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_qubits;
        match self.iqp_pairs {
            PairPattern::Linear => (1..n).map(|j| (j - 1, j)).collect(),
            PairPattern::All => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
        }
    }

    fn check_features(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_qubits {
            return Err(arg_err!(
                "feature vector has {} entries, encoding expects {}",
                x.len(),
                self.n_qubits
            ));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(arg_err!("feature {i} is not finite"));
        }
        Ok(())
    }

    /// The feature-map circuit `U(x)`.
    pub fn feature_map(&self, x: &[f64]) -> Result<Circuit> {
        self.validate()?;
        match self.kind {
            EncodingKind::Angle => angle_map(x),
            EncodingKind::Iqp => iqp_map(x, self),
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::Angle => "angle",
            EncodingKind::Iqp => "iqp",
        })
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "angle" => Ok(EncodingKind::Angle),
            "iqp" => Ok(EncodingKind::Iqp),
            _ => Err(arg_err!("unknown encoding '{s}' (expected angle or iqp)")),
        }
    }
}

impl fmt::Display for PairPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairPattern::Linear => "linear",
            PairPattern::All => "all",
        })
    }
}

impl FromStr for PairPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(PairPattern::Linear),
            "all" => Ok(PairPattern::All),
            _ => Err(arg_err!(
                "unknown pair pattern '{s}' (expected linear or all)"
            )),
        }
    }
}

impl fmt::Display for ZzGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZzGate::Cnot => "cnot",
            ZzGate::Cphase => "cphase",
        })
    }
}

impl FromStr for ZzGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cnot" => Ok(ZzGate::Cnot),
            "cphase" => Ok(ZzGate::Cphase),
            _ => Err(arg_err!("unknown zz gate '{s}' (expected cnot or cphase)")),
        }
    }
}

/// `RX(x_i)` on every qubit: one moment, no entangling gates.
pub fn angle_map(x: &[f64]) -> Result<Circuit> {
    EncodingSpec::angle(x.len()).check_features(x)?;
    Circuit::from_gates(x.len(), x.iter().enumerate().map(|(q, &t)| Gate::Rx(q, t)))
}

pub fn iqp_map(x: &[f64], spec: &EncodingSpec) -> Result<Circuit> {
    if spec.kind != EncodingKind::Iqp {
        return Err(arg_err!("iqp_map called with a {} spec", spec.kind));
    }
    spec.validate()?;
    spec.check_features(x)?;
    let n = spec.n_qubits;
    let pairs = spec.pairs();
    let mut c = Circuit::new(n)?;
    for _ in 0..spec.iqp_depth {
        for q in 0..n {
            c.push(Gate::H(q))?;
        }
        for (q, &xi) in x.iter().enumerate() {
            c.push(Gate::Rz(q, 2.0 * xi))?;
        }
        for &(i, j) in &pairs {
            let phi = x[i] * x[j];
            match spec.zz_gate {
                ZzGate::Cnot => {
                    c.push(Gate::Cnot(i, j))?;
                    c.push(Gate::Rz(j, 2.0 * phi))?;
                    c.push(Gate::Cnot(i, j))?;
                }
                ZzGate::Cphase => {
                    c.push(Gate::Cphase(i, j, -4.0 * phi))?;
                    c.push(Gate::Rz(i, 2.0 * phi))?;
                    c.push(Gate::Rz(j, 2.0 * phi))?;
                }
            }
        }
    }
    Ok(c)
}

/// `U(x)` followed by `U(z)^dagger`; its all-zeros probability is `K(x, z)`.
pub fn kernel_circuit(x: &[f64], z: &[f64], spec: &EncodingSpec) -> Result<Circuit> {
    let mut c = spec.feature_map(x)?;
    c.append(&spec.feature_map(z)?.inverse())?;
    Ok(c)
}
