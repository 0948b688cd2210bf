//! Image preprocessing, dataset splitting and the synthetic corpus.
//!
//! The feature chain is grayscale, 28x28 box resize, flatten to 784 values,
//! PCA down to one component per qubit, then per-feature scaling to
//! `[0, pi]`. PCA and scaler are fitted on training rows only.

mod image;
mod pca;
mod scaler;
mod split;
mod synth;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use image::{resize_28, resize_box, to_grayscale, ImageSample, TARGET_SIDE};
pub use pca::{pca_fit, pca_transform, PcaModel};
pub use scaler::{scale_apply, scale_fit_transform, ScalerModel};
pub use split::{split, DatasetSplit};
pub use synth::{generate_synthetic_corpus, CANVAS};

use crate::error::{arg_err, Result};
use crate::linalg::Matrix;

/// Grayscale, resize to 28x28 and flatten.
pub fn image_features(img: &ImageSample) -> Result<Vec<f64>> {
    Ok(resize_28(&to_grayscale(img)?)?.to_features())
}

/// Stacks [`image_features`] of every image into an `n x 784` matrix.
pub fn feature_matrix(images: &[ImageSample]) -> Result<Matrix> {
    let rows = images
        .iter()
        .map(image_features)
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

/// Selects the given rows of `x`.
pub fn select_rows(x: &Matrix, indices: &[usize]) -> Result<Matrix> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= x.rows()) {
        return Err(arg_err!(
            "row index {bad} out of range for {} rows",
            x.rows()
        ));
    }
    let mut data = Vec::with_capacity(indices.len() * x.cols());
    for &i in indices {
        data.extend_from_slice(x.row(i));
    }
    Matrix::from_vec(indices.len(), x.cols(), data)
}

/// Fitted PCA plus scaler, mapping raw pixel features to rotation angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub pca: PcaModel,
    pub scaler: ScalerModel,
}

impl Preprocessor {
    pub fn fit(train: &Matrix, n_components: usize) -> Result<Self> {
        let pca = pca_fit(train, n_components)?;
        let projected = pca.transform(train)?;
        let scaler = ScalerModel::fit(&projected)?;
        Ok(Self { pca, scaler })
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        self.scaler.apply(&self.pca.transform(x)?)
    }
}
