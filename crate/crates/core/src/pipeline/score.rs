use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::linalg::mahalanobis;

use super::model::{Calibration, CalibrationSource, OodModel};

pub const DEFAULT_PERCENTILE: f64 = 95.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    /// Minimum Mahalanobis distance over clusters.
    pub score: f64,
    pub nearest_cluster: usize,
    /// `None` until a threshold has been applied.
    pub is_ood: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub samples: Vec<SampleScore>,
}

impl ScoreReport {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.score).collect()
    }

    /// CSV with header `index,score,nearest_cluster,is_ood`; `is_ood` is
    /// `1`/`0`, or empty when unclassified.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,score,nearest_cluster,is_ood")?;
        for (i, s) in self.samples.iter().enumerate() {
            let flag = match s.is_ood {
                Some(true) => "1",
                Some(false) => "0",
                None => "",
            };
            writeln!(out, "{i},{},{},{flag}", s.score, s.nearest_cluster)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Scores each row by its smallest Mahalanobis distance to any cluster,
/// ties going to the lowest cluster id. Rows are classified when the model
/// carries a threshold.
pub fn score(model: &OodModel, x: &EmbeddingMatrix) -> Result<ScoreReport> {
    if x.d() != model.input_dim() {
        return Err(Error::DimMismatch {
            expected: model.input_dim(),
            actual: x.d(),
        });
    }
    let p = model.reduced_dim();
    let samples = (0..x.n())
        .into_par_iter()
        .map(|i| {
            let raw: Vec<f64> = x.row(i).iter().map(|&v| f64::from(v)).collect();
            let mut z = vec![0.0; p];
            model.pca.transform_row(&raw, &mut z);
            let mut best = (f64::INFINITY, 0);
            for (c, g) in model.clusters.iter().enumerate() {
                let d = mahalanobis(&z, g)?;
                if d < best.0 {
                    best = (d, c);
                }
            }
            Ok(SampleScore {
                score: best.0,
                nearest_cluster: best.1,
                is_ood: model.threshold.map(|t| best.0 > t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreReport { samples })
}

/// Nearest-rank percentile: the element at 1-based rank `⌈(pct/100)·n⌉` of
/// the ascending order.
pub fn nearest_rank(values: &[f64], percentile: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyHoldout);
    }
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(Error::InvalidArgument(format!(
            "percentile {percentile} is outside (0, 100]"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // the small offset keeps exact products like 95·100/100 from rounding up
    let rank = ((percentile * n as f64) / 100.0 - 1e-9).ceil() as usize;
    Ok(sorted[rank.clamp(1, n) - 1])
}

/// Sets the threshold from an in-distribution holdout.
pub fn calibrate_threshold(
    model: &OodModel,
    holdout: &EmbeddingMatrix,
    percentile: f64,
) -> Result<OodModel> {
    calibrate_threshold_from(model, holdout, percentile, CalibrationSource::Holdout)
}

/// Sets the threshold to the nearest-rank `percentile` of the scores of
/// `x`, recording where `x` came from.
pub fn calibrate_threshold_from(
    model: &OodModel,
    x: &EmbeddingMatrix,
    percentile: f64,
    source: CalibrationSource,
) -> Result<OodModel> {
    let scores = score(model, x)?.scores();
    let threshold = nearest_rank(&scores, percentile)?;
    let mut out = model.clone();
    // a threshold must be positive; an all-zero holdout gets the smallest one
    out.threshold = Some(threshold.max(f64::MIN_POSITIVE));
    out.fit_metadata.calibration = Some(Calibration {
        percentile,
        source,
        samples: x.n(),
    });
    Ok(out)
}

/// Flags every sample whose score is strictly above `threshold`.
pub fn classify(report: &ScoreReport, threshold: f64) -> Result<ScoreReport> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    Ok(ScoreReport {
        samples: report
            .samples
            .iter()
            .map(|s| SampleScore {
                is_ood: Some(s.score > threshold),
                ..*s
            })
            .collect(),
    })
}
