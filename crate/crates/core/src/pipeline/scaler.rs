use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::linalg::Matrix;

/// Per-feature affine map of the training range `[min, max]` onto
/// `[0, upper]` (rotation angles, `upper = pi` by default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerModel {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub upper: f64,
}

impl ScalerModel {
    pub fn fit(train: &Matrix) -> Result<Self> {
        if train.rows() == 0 || train.cols() == 0 {
            return Err(arg_err!("cannot fit a scaler on an empty matrix"));
        }
        let d = train.cols();
        let mut min = alloc::vec![f64::INFINITY; d];
        let mut max = alloc::vec![f64::NEG_INFINITY; d];
        for row in train.row_iter() {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self {
            min,
            max,
            upper: PI,
        })
    }

    /// Scales `x`, clamping values outside the training range. Constant
    /// features map to 0.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.min.len() {
            return Err(arg_err!(
                "data has {} columns, scaler expects {}",
                x.cols(),
                self.min.len()
            ));
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for j in 0..out.cols() {
                let span = self.max[j] - self.min[j];
                out[(i, j)] = if span > 0.0 {
                    ((x[(i, j)] - self.min[j]) / span).clamp(0.0, 1.0) * self.upper
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }
}

pub fn scale_fit_transform(train: &Matrix) -> Result<(ScalerModel, Matrix)> {
    let model = ScalerModel::fit(train)?;
    let scaled = model.apply(train)?;
    Ok((model, scaled))
}

pub fn scale_apply(model: &ScalerModel, x: &Matrix) -> Result<Matrix> {
    model.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let train = Matrix::from_rows(&[[0.0, 4.0], [5.0, 4.0], [10.0, 4.0]]).unwrap();
        let (model, s) = scale_fit_transform(&train).unwrap();
        assert_eq!(s.as_slice(), &[0.0, 0.0, PI / 2.0, 0.0, PI, 0.0]);
        let test = Matrix::from_rows(&[[-3.0, 9.0], [12.0, 4.0]]).unwrap();
        let t = scale_apply(&model, &test).unwrap();
        assert_eq!(t.as_slice(), &[0.0, 0.0, PI, 0.0]);
        assert!(model.apply(&Matrix::zeros(1, 3)).is_err());
        assert!(ScalerModel::fit(&Matrix::zeros(0, 2)).is_err());
    }
}
