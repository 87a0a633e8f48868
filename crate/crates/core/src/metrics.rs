//! Detection metrics with OOD as the positive class and higher score meaning
//! more OOD.

use serde::{Deserialize, Serialize};

use crate::data::LabelVector;
use crate::error::{Error, Result};
use crate::pipeline::ScoreReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub auroc: f64,
    pub aupr: f64,
    /// Accuracy over the pooled ID and OOD samples at the decision threshold.
    pub accuracy_at_threshold: Option<f64>,
    pub threshold: Option<f64>,
    pub n_id: usize,
    pub n_ood: usize,
}

fn check(scores_id: &[f64], scores_ood: &[f64]) -> Result<()> {
    if scores_id.is_empty() || scores_ood.is_empty() {
        return Err(Error::EmptyInput);
    }
    let all = scores_id.iter().chain(scores_ood);
    if let Some(pos) = all.clone().position(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScore(pos));
    }
    Ok(())
}

/// Area under the ROC curve via the Mann–Whitney rank sum with midranks,
/// so tied ID/OOD pairs count one half.
pub fn auroc(scores_id: &[f64], scores_ood: &[f64]) -> Result<f64> {
    check(scores_id, scores_ood)?;
    let mut all: Vec<(f64, bool)> = scores_id
        .iter()
        .map(|&s| (s, false))
        .chain(scores_ood.iter().map(|&s| (s, true)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut ood_rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // 1-based ranks i+1 ..= j share their mean
        let midrank = (i + 1 + j) as f64 / 2.0;
        let positives = all[i..j].iter().filter(|e| e.1).count();
        ood_rank_sum += midrank * positives as f64;
        i = j;
    }
    let (n_id, n_ood) = (scores_id.len() as f64, scores_ood.len() as f64);
    Ok((ood_rank_sum - n_ood * (n_ood + 1.0) / 2.0) / (n_id * n_ood))
}

/// Average precision: `Σ (R_t − R_{t−1}) · P_t` over descending distinct
/// score thresholds. Tied samples enter the ranking together, so a tie
/// block contributes at the precision of the whole block.
pub fn aupr(scores_id: &[f64], scores_ood: &[f64]) -> Result<f64> {
    check(scores_id, scores_ood)?;
    let mut all: Vec<(f64, bool)> = scores_ood
        .iter()
        .map(|&s| (s, true))
        .chain(scores_id.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));

    let positives = scores_ood.len() as f64;
    let (mut tp, mut seen, mut ap) = (0usize, 0usize, 0.0);
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        let mut block_tp = 0;
        while j < all.len() && all[j].0 == all[i].0 {
            block_tp += usize::from(all[j].1);
            j += 1;
        }
        tp += block_tp;
        seen += j - i;
        if block_tp > 0 {
            ap += (block_tp as f64 / positives) * (tp as f64 / seen as f64);
        }
        i = j;
    }
    Ok(ap)
}

/// Fraction of samples whose `is_ood` flag matches `truth` (1 = OOD).
pub fn accuracy(report: &ScoreReport, truth: &LabelVector) -> Result<f64> {
    truth.check_len(report.len())?;
    let mut correct = 0usize;
    for (i, (s, &t)) in report.samples.iter().zip(truth.as_slice()).enumerate() {
        let flag = s.is_ood.ok_or(Error::Uncalibrated)?;
        let expected = match t {
            0 => false,
            1 => true,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "truth label {other} at position {i} is not 0 or 1"
                )))
            }
        };
        correct += usize::from(flag == expected);
    }
    Ok(correct as f64 / report.len() as f64)
}

/// Accuracy over pooled ID and OOD scores when flagging `score > threshold`.
pub fn accuracy_at(scores_id: &[f64], scores_ood: &[f64], threshold: f64) -> f64 {
    let correct = scores_id.iter().filter(|&&s| s <= threshold).count()
        + scores_ood.iter().filter(|&&s| s > threshold).count();
    correct as f64 / (scores_id.len() + scores_ood.len()) as f64
}

pub fn evaluate(scores_id: &[f64], scores_ood: &[f64], threshold: Option<f64>) -> Result<EvalReport> {
    Ok(EvalReport {
        auroc: auroc(scores_id, scores_ood)?,
        aupr: aupr(scores_id, scores_ood)?,
        accuracy_at_threshold: threshold.map(|t| accuracy_at(scores_id, scores_ood, t)),
        threshold,
        n_id: scores_id.len(),
        n_ood: scores_ood.len(),
    })
}
