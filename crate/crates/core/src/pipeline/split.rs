use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::rng;
use crate::svm::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    /// Ascending sample indices.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Seeded train/test split with `round(n * train_frac)` training samples.
///
/// With labels, each class is shuffled separately and gets its proportional
/// share of the training set (largest-remainder rounding), so class balance
/// in both halves stays within one sample of the overall ratio.
pub fn split(
    n: usize,
    train_frac: f64,
    seed: u64,
    labels: Option<&[Label]>,
) -> Result<DatasetSplit> {
    if n < 2 {
        return Err(arg_err!("need at least two samples to split, got {n}"));
    }
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(arg_err!("train_frac must lie in (0, 1), got {train_frac}"));
    }
    let n_train = libm::round(n as f64 * train_frac) as usize;
    if n_train == 0 || n_train == n {
        return Err(arg_err!(
            "train_frac {train_frac} leaves an empty side for {n} samples"
        ));
    }
    let mut rng = rng::noise_stream(seed);
    let groups: Vec<Vec<usize>> = match labels {
        None => alloc::vec![(0..n).collect()],
        Some(labels) => {
            if labels.len() != n {
                return Err(arg_err!("{} labels for {n} samples", labels.len()));
            }
            [Label::Good, Label::Defect]
                .iter()
                .map(|&c| (0..n).filter(|&i| labels[i] == c).collect())
                .collect()
        }
    };
    // largest-remainder allocation of the training quota
    let quotas: Vec<f64> = groups.iter().map(|g| g.len() as f64 * train_frac).collect();
    let mut take: Vec<usize> = quotas.iter().map(|q| libm::floor(*q) as usize).collect();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| (quotas[b] - take[b] as f64).total_cmp(&(quotas[a] - take[a] as f64)));
    let mut missing = n_train - take.iter().sum::<usize>();
    for &g in order.iter().cycle().take(groups.len() * 2) {
        if missing == 0 {
            break;
        }
        if take[g] < groups[g].len() {
            take[g] += 1;
            missing -= 1;
        }
    }
    let mut train = Vec::with_capacity(n_train);
    let mut test = Vec::with_capacity(n - n_train);
    for (mut group, t) in groups.into_iter().zip(take) {
        group.shuffle(&mut rng);
        train.extend_from_slice(&group[..t]);
        test.extend_from_slice(&group[t..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(DatasetSplit { train, test, seed })
}
