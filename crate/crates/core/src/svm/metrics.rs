//! Precision, recall and F1, per class and averaged.
//!
//! `precision = tp / (tp + fp)`, `recall = tp / (tp + fn)`, F1 is their
//! harmonic mean. Any 0/0 is reported as 0. Macro scores are the unweighted
//! mean over the two classes; binary scores are the defect class alone.

use serde::{Deserialize, Serialize};

use super::Label;
use crate::error::{arg_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub scores: Scores,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub defect: ClassMetrics,
    pub good: ClassMetrics,
    #[serde(rename = "macro")]
    pub macro_avg: Scores,
    pub binary: Scores,
    pub accuracy: f64,
    pub n: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn class_metrics(class: Label, predictions: &[Label], truth: &[Label]) -> ClassMetrics {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&p, &t) in predictions.iter().zip(truth) {
        match (p == class, t == class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    ClassMetrics {
        tp,
        fp,
        tn,
        fn_,
        scores: Scores {
            precision,
            recall,
            f1,
        },
    }
}

pub fn evaluate(predictions: &[Label], truth: &[Label]) -> Result<Metrics> {
    if predictions.len() != truth.len() {
        return Err(arg_err!(
            "{} predictions for {} labels",
            predictions.len(),
            truth.len()
        ));
    }
    if truth.is_empty() {
        return Err(arg_err!("cannot evaluate an empty test set"));
    }
    let defect = class_metrics(Label::Defect, predictions, truth);
    let good = class_metrics(Label::Good, predictions, truth);
    let mean = |a: f64, b: f64| 0.5 * (a + b);
    let macro_avg = Scores {
        precision: mean(defect.scores.precision, good.scores.precision),
        recall: mean(defect.scores.recall, good.scores.recall),
        f1: mean(defect.scores.f1, good.scores.f1),
    };
    let correct = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    Ok(Metrics {
        defect,
        good,
        macro_avg,
        binary: defect.scores,
        accuracy: ratio(correct, truth.len()),
        n: truth.len(),
    })
}
