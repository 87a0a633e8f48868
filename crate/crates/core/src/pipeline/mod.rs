//! Phase-1 fitting (PCA, KNN graph, clustering, per-cluster Gaussians) and
//! phase-2 inference (minimum Mahalanobis distance, percentile threshold,
//! binary decision).

mod baseline;
mod fit;
mod model;
mod score;

pub use baseline::knn_raw_baseline;
pub use fit::{fit, fit_detailed, Clusterer, FitConfig, FitReport, StageTimings};
pub use model::{Calibration, CalibrationSource, FitMetadata, OodModel, MODEL_SCHEMA};
pub use score::{
    calibrate_threshold, calibrate_threshold_from, classify, nearest_rank, score, SampleScore,
    ScoreReport, DEFAULT_PERCENTILE,
};
