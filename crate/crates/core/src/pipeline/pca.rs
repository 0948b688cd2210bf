//! Principal component analysis by eigendecomposition.
//!
//! With fewer samples than features (the usual image case) the `n x n` Gram
//! matrix of the centered data is decomposed and its eigenvectors are mapped
//! back to feature space; otherwise the `D x D` covariance is decomposed.
//! Each component is sign-normalized so its largest-magnitude entry is
//! positive.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::linalg::{symmetric_eigen, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k x D`, orthonormal rows ordered by decreasing variance.
    pub components: Matrix,
    pub explained_variance: Vec<f64>,
    /// Sum of the per-feature sample variances of the fitted data.
    pub total_variance: f64,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.rows()
    }

    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|v| {
                if self.total_variance > 0.0 {
                    v / self.total_variance
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// `(X - mean) * components^T`.
    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.n_features() {
            return Err(arg_err!(
                "data has {} columns, model expects {}",
                x.cols(),
                self.n_features()
            ));
        }
        center(x, &self.mean).matmul(&self.components.transpose())
    }

    /// `Y * components + mean`.
    pub fn inverse_transform(&self, y: &Matrix) -> Result<Matrix> {
        if y.cols() != self.n_components() {
            return Err(arg_err!(
                "data has {} columns, model has {} components",
                y.cols(),
                self.n_components()
            ));
        }
        let mut out = y.matmul(&self.components)?;
        for i in 0..out.rows() {
            for (j, m) in self.mean.iter().enumerate() {
                out[(i, j)] += m;
            }
        }
        Ok(out)
    }
}

fn center(x: &Matrix, mean: &[f64]) -> Matrix {
    let mut c = x.clone();
    for i in 0..c.rows() {
        for (j, m) in mean.iter().enumerate() {
            c[(i, j)] -= m;
        }
    }
    c
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = libm::sqrt(v.iter().map(|a| a * a).sum::<f64>());
    if norm > 0.0 {
        v.iter_mut().for_each(|a| *a /= norm);
    }
    norm
}

/// Completes `basis` with unit vectors orthogonal to every existing row, by
/// Gram-Schmidt over the standard basis.
fn complete_basis(basis: &mut Vec<Vec<f64>>, dim: usize, want: usize) {
    let mut e = 0;
    while basis.len() < want && e < dim {
        let mut v = alloc::vec![0.0; dim];
        v[e] = 1.0;
        for _ in 0..2 {
            for b in basis.iter() {
                let d: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(b).for_each(|(a, b)| *a -= d * b);
            }
        }
        if normalize(&mut v) > 1e-6 {
            basis.push(v);
        }
        e += 1;
    }
}

pub fn pca_fit(x: &Matrix, k: usize) -> Result<PcaModel> {
    let (n, d) = (x.rows(), x.cols());
    if n < 2 {
        return Err(arg_err!("PCA needs at least two samples, got {n}"));
    }
    if k == 0 || k > (n - 1).min(d) {
        return Err(arg_err!(
            "k = {k} outside 1..={} for {n} samples of {d} features",
            (n - 1).min(d)
        ));
    }
    let mean: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| x[(i, j)]).sum::<f64>() / n as f64)
        .collect();
    let xc = center(x, &mean);
    let dof = (n - 1) as f64;
    let total_variance = xc.as_slice().iter().map(|v| v * v).sum::<f64>() / dof;

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    if n <= d {
        let gram = xc.matmul(&xc.transpose())?;
        let eig = symmetric_eigen(&gram)?;
        let floor = eig.values[0].abs().max(1.0) * 1e-12;
        for c in 0..k {
            let lambda = eig.values[c];
            if lambda <= floor {
                break;
            }
            // component = Xc^T u / sqrt(lambda)
            let mut v: Vec<f64> = (0..d)
                .map(|j| {
                    (0..n)
                        .map(|i| xc[(i, j)] * eig.vectors[(i, c)])
                        .sum::<f64>()
                })
                .collect();
            normalize(&mut v);
            rows.push(v);
            variances.push(lambda / dof);
        }
    } else {
        let cov = xc.transpose().matmul(&xc)?;
        let eig = symmetric_eigen(&cov)?;
        for c in 0..k {
            rows.push((0..d).map(|j| eig.vectors[(j, c)]).collect());
            variances.push((eig.values[c] / dof).max(0.0));
        }
    }
    // rank-deficient data: pad with orthonormal zero-variance directions
    complete_basis(&mut rows, d, k);
    variances.resize(k, 0.0);

    for row in rows.iter_mut() {
        let (mut best, mut at) = (0.0f64, 0);
        for (j, v) in row.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                at = j;
            }
        }
        if row[at] < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
        }
    }
    Ok(PcaModel {
        mean,
        components: Matrix::from_rows(&rows)?,
        explained_variance: variances,
        total_variance,
    })
}

pub fn pca_transform(model: &PcaModel, x: &Matrix) -> Result<Matrix> {
    model.transform(x)
}
