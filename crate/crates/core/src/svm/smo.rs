//! Sequential minimal optimization on the kernel SVM dual
//!
//! ```text
//! maximize   sum_i a_i - 1/2 sum_ij y_i y_j a_i a_j K_ij
//! subject to 0 <= a_i <= C,  sum_i a_i y_i = 0
//! ```
//!
//! Each step optimizes one pair analytically. The pair is the maximal
//! violating pair under second-order working-set selection, and training stops
//! once the violation gap drops below `tol`.

use alloc::vec;
use alloc::vec::Vec;

use super::{Label, SvmModel, SvmParams, SUPPORT_EPS};
use crate::error::{arg_err, Result};
use crate::linalg::Matrix;

const TAU: f64 = 1e-12;

/// Dual objective of `alphas` under kernel `k` and labels `y`.
pub fn dual_objective(k: &Matrix, y: &[Label], alphas: &[f64]) -> f64 {
    let n = alphas.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += y[i].sign() * y[j].sign() * alphas[i] * alphas[j] * k[(i, j)];
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

fn validate(k: &Matrix, y: &[Label], params: &SvmParams) -> Result<()> {
    if !k.is_square() {
        return Err(arg_err!(
            "training kernel must be square, got {}x{}",
            k.rows(),
            k.cols()
        ));
    }
    if k.rows() != y.len() {
        return Err(arg_err!(
            "kernel has {} rows but there are {} labels",
            k.rows(),
            y.len()
        ));
    }
    if y.is_empty() {
        return Err(arg_err!("no training samples"));
    }
    let asym = k.asymmetry();
    if asym > 1e-8 {
        return Err(arg_err!(
            "training kernel is not symmetric (max |K_ij - K_ji| = {asym:e})"
        ));
    }
    if k.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(arg_err!("training kernel has non-finite entries"));
    }
    params.validate()
}

/// Trains on a precomputed square kernel.
pub fn train_smo(k: &Matrix, y: &[Label], params: &SvmParams) -> Result<SvmModel> {
    solve(k, y, params, None)
}

/// Like [`train_smo`], also returning the dual objective after every
/// accepted pair update (starting from the zero solution).
pub fn train_smo_traced(
    k: &Matrix,
    y: &[Label],
    params: &SvmParams,
) -> Result<(SvmModel, Vec<f64>)> {
    let mut trace = Vec::new();
    let model = solve(k, y, params, Some(&mut trace))?;
    Ok((model, trace))
}

fn solve(
    k: &Matrix,
    y: &[Label],
    params: &SvmParams,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<SvmModel> {
    validate(k, y, params)?;
    let n = y.len();
    let c = params.c;
    let ys: Vec<f64> = y.iter().map(|l| l.sign()).collect();

    if ys.iter().all(|&s| s == ys[0]) {
        return Ok(SvmModel::degenerate(y.to_vec(), ys[0], params));
    }

    let mut alpha = vec![0.0; n];
    // gradient of the minimization form 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
    let mut grad = vec![-1.0; n];
    let q = |i: usize, j: usize| ys[i] * ys[j] * k[(i, j)];
    if let Some(t) = trace.as_deref_mut() {
        t.push(0.0);
    }

    let max_iter = params.max_passes.max(1) * n.max(1) * 100;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // i: maximal violator in I_up
        let mut g_max = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let up = (ys[t] > 0.0 && alpha[t] < c) || (ys[t] < 0.0 && alpha[t] > 0.0);
            if up && -ys[t] * grad[t] >= g_max {
                g_max = -ys[t] * grad[t];
                i_sel = Some(t);
            }
        }
        // j: second-order choice in I_low
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best = f64::INFINITY;
        if let Some(i) = i_sel {
            for t in 0..n {
                let low = (ys[t] > 0.0 && alpha[t] > 0.0) || (ys[t] < 0.0 && alpha[t] < c);
                if !low {
                    continue;
                }
                let v = ys[t] * grad[t];
                g_max2 = g_max2.max(v);
                let diff = g_max + v;
                if diff > 0.0 {
                    let mut quad = k[(i, i)] + k[(t, t)] - 2.0 * k[(i, t)];
                    if quad <= 0.0 {
                        quad = TAU;
                    }
                    let gain = -(diff * diff) / quad;
                    if gain <= best {
                        best = gain;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let (Some(i), Some(j)) = (i_sel, j_sel) else {
            converged = true;
            break;
        };
        if g_max + g_max2 < params.tol {
            converged = true;
            break;
        }

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if ys[i] != ys[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
        iterations += 1;
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(dual_objective(k, y, &alpha));
        }
    }

    let bias = compute_bias(k, &ys, &alpha, c);
    let support_indices = (0..n).filter(|&i| alpha[i] > SUPPORT_EPS).collect();
    Ok(SvmModel {
        alphas: alpha,
        labels: y.to_vec(),
        bias,
        c,
        support_indices,
        iterations,
        converged,
        kernel: None,
        train_ref: None,
    })
}

/// Mean of `y_i - sum_j y_j a_j K_ij` over free vectors; without free vectors,
/// the midpoint of the interval of biases satisfying the KKT conditions.
fn compute_bias(k: &Matrix, ys: &[f64], alpha: &[f64], c: f64) -> f64 {
    let n = ys.len();
    let margin = |i: usize| -> f64 { (0..n).map(|j| ys[j] * alpha[j] * k[(i, j)]).sum() };
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for i in 0..n {
        let r = ys[i] - margin(i);
        let at_zero = alpha[i] <= SUPPORT_EPS;
        let at_c = alpha[i] >= c - SUPPORT_EPS;
        if !at_zero && !at_c {
            free_sum += r;
            free_count += 1;
        } else if (at_zero && ys[i] > 0.0) || (at_c && ys[i] < 0.0) {
            lower = lower.max(r);
        } else {
            upper = upper.min(r);
        }
    }
    if free_count > 0 {
        return free_sum / free_count as f64;
    }
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => 0.5 * (lower + upper),
        (true, false) => lower,
        (false, true) => upper,
        (false, false) => 0.0,
    }
}
