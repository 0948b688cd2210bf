//! Fidelity-kernel estimation.
//!
//! `K(x, z) = |<0| U(z)^dagger U(x) |0>|^2`, read out as the all-zeros
//! probability of the overlap circuit. Entries are computed exactly
//! (noiseless state vector) or estimated from shots, where every shot is one
//! noisy trajectory followed by one readout.
//!
//! Seeds: entry `(i, j)` of a matrix with `cols` columns uses
//! `entry_seed(master, i, j, cols)`; shot `t` of an entry with seed `s` uses
//! `derive_seed(s, t)` for both its noise and readout streams. Entries are
//! therefore independent of evaluation order, which lets callers compute them
//! in parallel with bit-identical results.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{insert_dd, simulate, Circuit, DdSequence, NoiseModel};
use crate::encode::{kernel_circuit, EncodingSpec};
use crate::error::{arg_err, Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::rng::{derive_seed, entry_seed, readout_stream};

/// Shot count used when none is given.
pub const DEFAULT_SHOTS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Estimation {
    /// Noiseless all-zeros probability; any noise model is ignored.
    Exact,
    Shots {
        shots: u64,
    },
}

impl fmt::Display for Estimation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimation::Exact => f.write_str("exact"),
            Estimation::Shots { shots } => write!(f, "shots{shots}"),
        }
    }
}

/// When to run [`psd_project`] on a square training kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsdPolicy {
    /// On for shot estimates, off for exact kernels.
    #[default]
    Auto,
    On,
    Off,
}

impl PsdPolicy {
    pub fn applies_to(self, estimation: Estimation) -> bool {
        match self {
            PsdPolicy::Auto => matches!(estimation, Estimation::Shots { .. }),
            PsdPolicy::On => true,
            PsdPolicy::Off => false,
        }
    }
}

impl FromStr for PsdPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(PsdPolicy::Auto),
            "on" | "true" => Ok(PsdPolicy::On),
            "off" | "false" => Ok(PsdPolicy::Off),
            _ => Err(arg_err!(
                "unknown psd policy '{s}' (expected auto, on or off)"
            )),
        }
    }
}

/// Everything that determines a kernel estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub encoding: EncodingSpec,
    pub estimation: Estimation,
    pub noise: Option<NoiseModel>,
    pub dd: Option<DdSequence>,
    pub master_seed: u64,
}

impl KernelConfig {
    pub fn exact(encoding: EncodingSpec) -> Self {
        Self {
            encoding,
            estimation: Estimation::Exact,
            noise: None,
            dd: None,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.encoding.validate()?;
        if let Estimation::Shots { shots: 0 } = self.estimation {
            return Err(arg_err!("shots must be >= 1"));
        }
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        Ok(())
    }

    /// The overlap circuit for `(x, z)`, with decoupling pulses if configured.
    pub fn circuit(&self, x: &[f64], z: &[f64]) -> Result<Circuit> {
        let c = kernel_circuit(x, z, &self.encoding)?;
        Ok(match self.dd {
            Some(seq) => insert_dd(&c, seq),
            None => c,
        })
    }

    /// One kernel value under this configuration, using `seed` for shots.
    pub fn entry(&self, x: &[f64], z: &[f64], seed: u64) -> Result<f64> {
        let circuit = self.circuit(x, z)?;
        match self.estimation {
            Estimation::Exact => Ok(simulate(&circuit, None, 0)?.prob_all_zeros()),
            Estimation::Shots { shots } => {
                estimate_shots(&circuit, shots, self.noise.as_ref(), seed)
            }
        }
    }
}

/// Noiseless `K(x, z)`.
pub fn kernel_entry_exact(x: &[f64], z: &[f64], spec: &EncodingSpec) -> Result<f64> {
    KernelConfig::exact(*spec).entry(x, z, 0)
}

/// Shot estimate of `K(x, z)`: the all-zeros frequency over `shots`
/// trajectories of the (optionally DD-padded) overlap circuit.
pub fn kernel_entry_shots(
    x: &[f64],
    z: &[f64],
    spec: &EncodingSpec,
    shots: u64,
    noise: Option<&NoiseModel>,
    dd: Option<DdSequence>,
    seed: u64,
) -> Result<f64> {
    let cfg = KernelConfig {
        encoding: *spec,
        estimation: Estimation::Shots { shots },
        noise: noise.copied(),
        dd,
        master_seed: 0,
    };
    cfg.validate()?;
    cfg.entry(x, z, seed)
}

fn estimate_shots(
    circuit: &Circuit,
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
) -> Result<f64> {
    if shots == 0 {
        return Err(arg_err!("shots must be >= 1"));
    }
    let stochastic = noise.is_some_and(NoiseModel::is_stochastic);
    // Without Pauli draws every trajectory is the same state.
    let fixed = if stochastic {
        None
    } else {
        Some(simulate(circuit, noise, 0)?.prob_all_zeros())
    };
    let mut hits = 0u64;
    for t in 0..shots {
        let shot_seed = derive_seed(seed, t);
        let p = match fixed {
            Some(p) => p,
            None => simulate(circuit, noise, shot_seed)?.prob_all_zeros(),
        };
        if readout_stream(shot_seed).random::<f64>() < p {
            hits += 1;
        }
    }
    Ok(hits as f64 / shots as f64)
}

/// Provenance attached to every kernel matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMeta {
    #[serde(flatten)]
    pub config: KernelConfig,
    pub psd_projected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    pub meta: KernelMeta,
    pub entries: Matrix,
}

impl KernelMatrix {
    pub fn rows(&self) -> usize {
        self.entries.rows()
    }

    pub fn cols(&self) -> usize {
        self.entries.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.entries.row(i)
    }
}

/// The set of entries a kernel matrix needs.
///
/// With no second set the matrix is the square Gram matrix of `train`, and
/// only the upper triangle is estimated. Otherwise row `i`, column `j` is
/// `K(test_i, train_j)`.
#[derive(Debug, Clone, Copy)]
pub struct KernelPlan<'a, R> {
    config: &'a KernelConfig,
    train: &'a [R],
    test: Option<&'a [R]>,
}

impl<'a, R: AsRef<[f64]>> KernelPlan<'a, R> {
    pub fn new(config: &'a KernelConfig, train: &'a [R], test: Option<&'a [R]>) -> Result<Self> {
        config.validate()?;
        if train.is_empty() {
            return Err(arg_err!("kernel matrix needs at least one training vector"));
        }
        let n = config.encoding.n_qubits;
        let all = train.iter().chain(test.unwrap_or(&[]));
        if let Some(bad) = all.map(|v| v.as_ref().len()).find(|&len| len != n) {
            return Err(arg_err!(
                "feature vector of length {bad} for a {n}-qubit encoding"
            ));
        }
        Ok(Self {
            config,
            train,
            test,
        })
    }

    pub fn rows(&self) -> usize {
        self.test.map_or(self.train.len(), <[R]>::len)
    }

    pub fn cols(&self) -> usize {
        self.train.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.test.is_none()
    }

    /// Entries to compute, in row-major order.
    pub fn jobs(&self) -> Vec<(usize, usize)> {
        let (rows, cols) = (self.rows(), self.cols());
        if self.is_symmetric() {
            (0..rows)
                .flat_map(|i| (i..cols).map(move |j| (i, j)))
                .collect()
        } else {
            (0..rows)
                .flat_map(|i| (0..cols).map(move |j| (i, j)))
                .collect()
        }
    }

    pub fn seed_for(&self, i: usize, j: usize) -> u64 {
        entry_seed(self.config.master_seed, i, j, self.cols())
    }

    /// Computes entry `(i, j)`; pure in its arguments.
    pub fn compute(&self, i: usize, j: usize) -> Result<f64> {
        let x = match self.test {
            Some(test) => test[i].as_ref(),
            None => self.train[i].as_ref(),
        };
        self.config
            .entry(x, self.train[j].as_ref(), self.seed_for(i, j))
    }

    /// Places computed values (aligned with [`jobs`](Self::jobs)) into a
    /// matrix, mirroring the upper triangle for square plans.
    pub fn assemble(&self, values: &[f64]) -> Result<KernelMatrix> {
        let jobs = self.jobs();
        if values.len() != jobs.len() {
            return Err(arg_err!(
                "{} values for {} kernel entries",
                values.len(),
                jobs.len()
            ));
        }
        let mut m = Matrix::zeros(self.rows(), self.cols());
        for (&(i, j), &v) in jobs.iter().zip(values) {
            m[(i, j)] = v;
            if self.is_symmetric() {
                m[(j, i)] = v;
            }
        }
        Ok(KernelMatrix {
            meta: KernelMeta {
                config: *self.config,
                psd_projected: false,
            },
            entries: m,
        })
    }
}

/// Sequential kernel-matrix construction; see [`KernelPlan`] for layout.
pub fn kernel_matrix<R: AsRef<[f64]>>(
    train: &[R],
    test: Option<&[R]>,
    config: &KernelConfig,
) -> Result<KernelMatrix> {
    let plan = KernelPlan::new(config, train, test)?;
    let values = plan
        .jobs()
        .into_iter()
        .map(|(i, j)| plan.compute(i, j))
        .collect::<Result<Vec<_>>>()?;
    plan.assemble(&values)
}

/// Nearest PSD matrix in Frobenius norm: symmetrize, clip negative
/// eigenvalues to zero, reconstruct. The diagonal is not renormalized.
pub fn psd_project(k: &KernelMatrix) -> Result<KernelMatrix> {
    let m = &k.entries;
    if !m.is_square() {
        return Err(arg_err!(
            "psd_project needs a square kernel, got {}x{}",
            m.rows(),
            m.cols()
        ));
    }
    let n = m.rows();
    let eig = symmetric_eigen(m)?;
    let mut out = Matrix::zeros(n, n);
    for (c, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = lambda * eig.vectors[(i, c)];
            for j in 0..n {
                out[(i, j)] += vi * eig.vectors[(j, c)];
            }
        }
    }
    // exact symmetry after floating-point reconstruction
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    Ok(KernelMatrix {
        meta: KernelMeta {
            psd_projected: true,
            ..k.meta
        },
        entries: out,
    })
}
