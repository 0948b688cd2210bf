use qkdefect_core::linalg::Matrix;
use qkdefect_core::pipeline::{image_features, ImageSample};
use qkdefect_core::qkernel::{KernelConfig, KernelMatrix, KernelPlan};
use rayon::prelude::*;

use crate::error::Result;

/// A rayon pool with `threads` workers, or one per core when `None`.
pub fn thread_pool(threads: Option<usize>) -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .expect("rayon pool construction only fails on OS thread limits")
}

/// Kernel matrix with entries spread over the current rayon pool.
///
/// Each entry is seeded from its `(i, j)` position alone, so the result is
/// identical for every thread count.
pub fn kernel_matrix_par<R: AsRef<[f64]> + Sync>(
    train: &[R],
    test: Option<&[R]>,
    config: &KernelConfig,
) -> Result<KernelMatrix> {
    let plan = KernelPlan::new(config, train, test)?;
    let values = plan
        .jobs()
        .into_par_iter()
        .with_max_len(1)
        .map(|(i, j)| plan.compute(i, j))
        .collect::<std::result::Result<Vec<f64>, _>>()?;
    Ok(plan.assemble(&values)?)
}

/// Grayscale, resize and flatten every image in parallel.
pub fn feature_matrix_par(images: &[ImageSample]) -> Result<Matrix> {
    let rows = images
        .par_iter()
        .map(image_features)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(&rows)?)
}
