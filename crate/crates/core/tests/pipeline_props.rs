mod oracle;

use std::f64::consts::PI;

use proptest::prelude::*;
use qkdefect_core::linalg::Matrix;
use qkdefect_core::pipeline::{
    feature_matrix, generate_synthetic_corpus, pca_fit, scale_apply, scale_fit_transform,
    select_rows, split, Preprocessor, TARGET_SIDE,
};

fn matrix_strategy() -> impl Strategy<Value = Matrix> {
    (2usize..9, 1usize..9).prop_flat_map(|(n, d)| {
        prop::collection::vec(-5.0f64..5.0, n * d)
            .prop_map(move |v| Matrix::from_vec(n, d, v).unwrap())
    })
}

fn covariance(x: &Matrix) -> Vec<Vec<f64>> {
    let (n, d) = (x.rows(), x.cols());
    let mean: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| x[(i, j)]).sum::<f64>() / n as f64)
        .collect();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    (0..n)
                        .map(|i| (x[(i, a)] - mean[a]) * (x[(i, b)] - mean[b]))
                        .sum::<f64>()
                        / (n - 1) as f64
                })
                .collect()
        })
        .collect()
}

proptest! {
    #[test]
    fn pca_invariants(x in matrix_strategy(), pick in 0usize..100) {
        let (n, d) = (x.rows(), x.cols());
        let kmax = (n - 1).min(d);
        let k = 1 + pick % kmax;
        let m = pca_fit(&x, k).unwrap();

        let g = m.components.matmul(&m.components.transpose()).unwrap();
        for i in 0..k {
            for j in 0..k {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g[(i, j)] - want).abs() < 1e-8);
            }
        }
        for w in m.explained_variance.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-10);
        }
        prop_assert!(m.explained_variance.iter().all(|&v| v >= 0.0));
        prop_assert!(m.explained_variance.iter().sum::<f64>() <= m.total_variance + 1e-8);

        // top-k covariance eigenvalues from an independent solver
        let mut ev = oracle::jacobi_eigenvalues(&covariance(&x));
        ev.reverse();
        let scale = ev[0].abs().max(1.0);
        for (got, want) in m.explained_variance.iter().zip(&ev) {
            prop_assert!((got - want.max(0.0)).abs() < 1e-8 * scale, "{} vs {}", got, want);
        }

        let y = m.transform(&x).unwrap();
        for j in 0..k {
            let mean = (0..n).map(|i| y[(i, j)]).sum::<f64>() / n as f64;
            prop_assert!(mean.abs() < 1e-10 * scale.sqrt().max(1.0));
        }
        for row in m.components.row_iter() {
            let big = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let first = row.iter().find(|v| (v.abs() - big).abs() < 1e-12).unwrap();
            prop_assert!(*first > 0.0);
        }
    }

    #[test]
    fn full_rank_pca_reconstructs(x in matrix_strategy()) {
        let (n, d) = (x.rows(), x.cols());
        prop_assume!(n > d);
        let m = pca_fit(&x, d).unwrap();
        let back = m.inverse_transform(&m.transform(&x).unwrap()).unwrap();
        for (a, b) in back.as_slice().iter().zip(x.as_slice()) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn scaled_features_are_angles(x in matrix_strategy(), t in matrix_strategy()) {
        let (model, s) = scale_fit_transform(&x).unwrap();
        prop_assert!(s.as_slice().iter().all(|v| (0.0..=PI).contains(v)));
        prop_assert!(model.min.iter().zip(&model.max).all(|(a, b)| a <= b));
        if t.cols() == x.cols() {
            prop_assert!(scale_apply(&model, &t).unwrap().as_slice().iter().all(|v| (0.0..=PI).contains(v)));
        }
    }

    #[test]
    fn splits_partition(n in 2usize..200, frac in 0.05f64..0.95, seed in any::<u64>()) {
        let n_train = (n as f64 * frac).round() as usize;
        prop_assume!(n_train > 0 && n_train < n);
        let s = split(n, frac, seed, None).unwrap();
        prop_assert_eq!(s.train.len(), n_train);
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }
}

#[test]
fn components_project_onto_unit_coordinates() {
    let x = Matrix::from_rows(&[
        [1.0, 0.0, 2.0],
        [0.0, 3.0, 1.0],
        [4.0, 1.0, 0.0],
        [2.0, 2.0, 2.0],
        [0.5, 0.0, 1.0],
    ])
    .unwrap();
    let m = pca_fit(&x, 3).unwrap();
    let mut shifted = m.components.clone();
    for i in 0..3 {
        for j in 0..3 {
            shifted[(i, j)] += m.mean[j];
        }
    }
    let y = m.transform(&shifted).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((y[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
}

#[test]
fn end_to_end_shape_contract() {
    let corpus = generate_synthetic_corpus(30, 0.5, 8).unwrap();
    let labels: Vec<_> = corpus.iter().map(|s| s.label).collect();
    let x = feature_matrix(&corpus).unwrap();
    assert_eq!(x.cols(), TARGET_SIDE * TARGET_SIDE);
    let s = split(30, 0.7, 8, Some(&labels)).unwrap();
    let train = select_rows(&x, &s.train).unwrap();
    let test = select_rows(&x, &s.test).unwrap();
    let pre = Preprocessor::fit(&train, 6).unwrap();
    let (ft, fs) = (
        pre.transform(&train).unwrap(),
        pre.transform(&test).unwrap(),
    );
    assert_eq!((ft.rows(), ft.cols()), (21, 6));
    assert_eq!((fs.rows(), fs.cols()), (9, 6));
    assert!(ft
        .as_slice()
        .iter()
        .chain(fs.as_slice())
        .all(|v| (0.0..=PI).contains(v)));

    let again = feature_matrix(&generate_synthetic_corpus(30, 0.5, 8).unwrap()).unwrap();
    assert_eq!(again, x);
    let pre2 = Preprocessor::fit(&select_rows(&again, &s.train).unwrap(), 6).unwrap();
    assert_eq!(pre2, pre);
}

#[test]
fn resize_keeps_mean_on_synthetic_images() {
    use qkdefect_core::pipeline::resize_28;
    for img in generate_synthetic_corpus(20, 0.5, 4).unwrap() {
        let small = resize_28(&img).unwrap();
        assert!((small.mean() - img.mean()).abs() <= 1.0);
    }
}
