//! Evaluation protocols shared by the ablation tooling and the benchmark
//! suite.
//!
//! Every protocol fits on a training split, calibrates thresholds on that same
//! training split, and measures detection on a separate evaluation split of
//! in-distribution rows against an OOD split.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::data::EmbeddingMatrix;
use crate::error::Result;
use crate::metrics::{accuracy_at, auroc, evaluate, EvalReport};
use crate::pipeline::{
    calibrate_threshold_from, fit_detailed, knn_raw_baseline, score, CalibrationSource, Clusterer,
    FitConfig, OodModel,
};
use crate::synth::{generate, generate_holdout, MixtureSpec, OodMode, OodSpec};

/// Fresh in-distribution rows per cluster drawn for evaluation.
pub const DEFAULT_HOLDOUT_PER_CLUSTER: usize = 20;

/// Percentiles probed by the threshold sweep.
pub const SWEEP_PERCENTILES: [f64; 5] = [80.0, 85.0, 90.0, 95.0, 99.0];

/// Training, in-distribution evaluation and OOD rows.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: EmbeddingMatrix,
    pub eval_id: EmbeddingMatrix,
    pub ood: EmbeddingMatrix,
}

impl Split {
    /// Draws a split from a mixture: the generated ID rows train, a disjoint
    /// holdout of `holdout_per_cluster` rows per cluster evaluates.
    pub fn synthetic(spec: &MixtureSpec, holdout_per_cluster: usize) -> Result<Self> {
        let data = generate(spec)?;
        let (eval_id, _) = generate_holdout(spec, holdout_per_cluster)?;
        Ok(Self {
            train: data.id,
            eval_id,
            ood: data.ood,
        })
    }
}

/// Mixture whose raw features overlap heavily: the within-cluster spread
/// equals the spread of the centers, and OOD rows sit one standard deviation
/// away from a cluster sample, like a mild pixel-level nuisance shift.
pub fn overlapping_raw_spec() -> MixtureSpec {
    MixtureSpec {
        center_scale: 1.0,
        within_std: 1.0,
        ood: OodSpec {
            mode: OodMode::Shifted,
            magnitude: 1.0,
            count: 1000,
        },
        ..MixtureSpec::default()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionOutcome {
    pub report: EvalReport,
    pub cluster_count: usize,
    pub edge_count: usize,
    pub modularity: Option<f64>,
    #[serde(skip)]
    pub model: OodModel,
    pub elapsed: Duration,
}

/// Fit, calibrate at `percentile` on the training rows and evaluate.
pub fn run_detection(split: &Split, config: &FitConfig, percentile: f64) -> Result<DetectionOutcome> {
    let start = Instant::now();
    let fitted = fit_detailed(&split.train, config)?.model;
    let model = calibrate_threshold_from(&fitted, &split.train, percentile, CalibrationSource::Training)?;
    let id = score(&model, &split.eval_id)?.scores();
    let ood = score(&model, &split.ood)?.scores();
    let report = evaluate(&id, &ood, model.threshold)?;
    let meta = &model.fit_metadata;
    Ok(DetectionOutcome {
        report,
        cluster_count: meta.cluster_count,
        edge_count: meta.edge_count,
        modularity: meta.modularity,
        elapsed: start.elapsed(),
        model,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KRow {
    pub k: usize,
    pub cluster_count: usize,
    pub auroc: f64,
}

/// AUROC and cluster count for each neighbor count.
pub fn k_sweep(split: &Split, config: &FitConfig, ks: &[usize]) -> Result<Vec<KRow>> {
    ks.iter()
        .map(|&k| {
            let config = FitConfig { k, ..config.clone() };
            let (model, auroc) = fit_and_auroc(split, &config)?;
            Ok(KRow {
                k,
                cluster_count: model.fit_metadata.cluster_count,
                auroc,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub percentile: f64,
    pub threshold: f64,
    pub accuracy: f64,
}

/// Accuracy on the evaluation rows for thresholds calibrated at each
/// percentile of the training scores; the model is fitted once.
pub fn threshold_sweep(split: &Split, config: &FitConfig, percentiles: &[f64]) -> Result<Vec<ThresholdRow>> {
    let model = fit_detailed(&split.train, config)?.model;
    let id = score(&model, &split.eval_id)?.scores();
    let ood = score(&model, &split.ood)?.scores();
    percentiles
        .iter()
        .map(|&percentile| {
            let calibrated = calibrate_threshold_from(&model, &split.train, percentile, CalibrationSource::Training)?;
            let threshold = calibrated.threshold.expect("calibration sets a threshold");
            Ok(ThresholdRow {
                percentile,
                threshold,
                accuracy: accuracy_at(&id, &ood, threshold),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClustererComparison {
    pub cluster_count: usize,
    pub louvain_auroc: f64,
    pub kmeans_auroc: f64,
}

impl ClustererComparison {
    pub fn delta(&self) -> f64 {
        (self.louvain_auroc - self.kmeans_auroc).abs()
    }
}

/// Louvain against K-means with as many clusters as Louvain found.
pub fn clusterer_comparison(split: &Split, config: &FitConfig) -> Result<ClustererComparison> {
    let louvain_config = FitConfig {
        clusterer: Clusterer::default(),
        ..config.clone()
    };
    let (louvain_model, louvain_auroc) = fit_and_auroc(split, &louvain_config)?;
    let cluster_count = louvain_model.fit_metadata.cluster_count;
    let kmeans_config = FitConfig {
        clusterer: Clusterer::Kmeans {
            clusters: Some(cluster_count),
        },
        ..config.clone()
    };
    let (_, kmeans_auroc) = fit_and_auroc(split, &kmeans_config)?;
    Ok(ClustererComparison {
        cluster_count,
        louvain_auroc,
        kmeans_auroc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawKnnRow {
    pub k: usize,
    pub auroc: f64,
}

/// AUROC of the raw-feature KNN baseline for each neighbor count.
pub fn raw_knn_sweep(split: &Split, ks: &[usize]) -> Result<Vec<RawKnnRow>> {
    ks.iter()
        .map(|&k| {
            let id = knn_raw_baseline(&split.train, &split.eval_id, k)?;
            let ood = knn_raw_baseline(&split.train, &split.ood, k)?;
            Ok(RawKnnRow {
                k,
                auroc: auroc(&id, &ood)?,
            })
        })
        .collect()
}

fn fit_and_auroc(split: &Split, config: &FitConfig) -> Result<(OodModel, f64)> {
    let model = fit_detailed(&split.train, config)?.model;
    let id = score(&model, &split.eval_id)?.scores();
    let ood = score(&model, &split.ood)?.scores();
    let value = auroc(&id, &ood)?;
    Ok((model, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_split() -> Split {
        let spec = MixtureSpec {
            cluster_count: 3,
            dim: 6,
            samples_per_cluster: 40,
            ood: OodSpec {
                count: 60,
                ..MixtureSpec::default().ood
            },
            ..MixtureSpec::default()
        };
        Split::synthetic(&spec, 10).unwrap()
    }

    #[test]
    fn split_shapes() {
        let split = small_split();
        assert_eq!(split.train.n(), 120);
        assert_eq!(split.eval_id.n(), 30);
        assert_eq!(split.ood.n(), 60);
    }

    #[test]
    fn threshold_sweep_thresholds_grow_with_percentile() {
        let split = small_split();
        let rows = threshold_sweep(&split, &FitConfig::default(), &SWEEP_PERCENTILES).unwrap();
        assert_eq!(rows.len(), 5);
        for pair in rows.windows(2) {
            assert!(pair[0].threshold <= pair[1].threshold);
        }
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.accuracy)));
    }

    #[test]
    fn detection_outcome_is_calibrated() {
        let split = small_split();
        let outcome = run_detection(&split, &FitConfig::default(), 95.0).unwrap();
        assert!(outcome.model.threshold.is_some());
        assert!(outcome.report.accuracy_at_threshold.is_some());
        assert_eq!(outcome.report.n_id, 30);
        assert_eq!(outcome.report.n_ood, 60);
    }

    #[test]
    fn raw_sweep_reports_each_k() {
        let split = small_split();
        let rows = raw_knn_sweep(&split, &[1, 3]).unwrap();
        assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![1, 3]);
    }
}
