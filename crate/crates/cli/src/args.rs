//! Command-line definitions and their resolution against a JSON run
//! configuration. Flags take precedence over configuration keys, which take
//! precedence over built-in defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oodg::config::RunConfig;
use oodg::linalg::PcaTarget;
use oodg::pipeline::{CalibrationSource, Clusterer, FitConfig};
use oodg::synth::{MixtureSpec, OodMode, OodSpec};
use oodg::Symmetrization;

use crate::error::{CliError, CliResult};

/// Components kept at most when selecting by explained variance.
pub const DEFAULT_PCA_MAX_DIM: usize = 128;

#[derive(Debug, Parser)]
#[command(name = "oodg", version, about = "Graph-clustered Mahalanobis out-of-distribution detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded Gaussian-mixture data set with OOD samples.
    Synth(SynthArgs),
    /// Fit a detector on in-distribution embeddings.
    Fit(FitArgs),
    /// Set a model's decision threshold from in-distribution scores.
    Calibrate(CalibrateArgs),
    /// Score embeddings against a model and write a CSV report.
    Score(ScoreArgs),
    /// Compute AUROC, AUPR and accuracy for ID and OOD embeddings.
    Eval(EvalArgs),
    /// Run an ablation sweep and write a CSV table.
    Ablate(AblateArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory for id.oode, ood.oode, id_labels.oodl and the manifest.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub per_cluster: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Centers are drawn uniformly from [-s, s]^dim [default: 1.0].
    #[arg(long)]
    pub center_scale: Option<f64>,
    /// Within-cluster standard deviation [default: 0.2].
    #[arg(long)]
    pub within_std: Option<f64>,
    /// OOD generator: shifted, inflated or uniform [default: shifted].
    #[arg(long)]
    pub ood_mode: Option<OodMode>,
    /// OOD displacement or inflation factor [default: 8].
    #[arg(long)]
    pub ood_magnitude: Option<f64>,
    /// Number of OOD samples [default: 1000].
    #[arg(long)]
    pub ood_count: Option<usize>,
    /// Also write a fresh ID holdout with this many rows per cluster.
    #[arg(long)]
    pub holdout_per_cluster: Option<usize>,
}

impl SynthArgs {
    pub fn resolve(&self, config: &RunConfig) -> CliResult<(MixtureSpec, Option<usize>)> {
        let base = MixtureSpec::default();
        let ood_mode = match (&self.ood_mode, &config.ood_mode) {
            (Some(mode), _) => *mode,
            (None, Some(text)) => text.parse()?,
            (None, None) => base.ood.mode,
        };
        let spec = MixtureSpec {
            cluster_count: self.clusters.or(config.clusters).unwrap_or(base.cluster_count),
            dim: self.dim.or(config.dim).unwrap_or(base.dim),
            samples_per_cluster: self.per_cluster.or(config.per_cluster).unwrap_or(base.samples_per_cluster),
            center_scale: self.center_scale.or(config.center_scale).unwrap_or(base.center_scale),
            within_std: self.within_std.or(config.within_std).unwrap_or(base.within_std),
            seed: self.seed.or(config.seed).unwrap_or(0),
            ood: OodSpec {
                mode: ood_mode,
                magnitude: self.ood_magnitude.or(config.ood_magnitude).unwrap_or(base.ood.magnitude),
                count: self.ood_count.or(config.ood_count).unwrap_or(base.ood.count),
            },
        };
        spec.validate()?;
        let holdout = self.holdout_per_cluster.or(config.holdout_per_cluster);
        if holdout == Some(0) {
            return Err(CliError::usage("--holdout-per-cluster must be at least 1"));
        }
        Ok((spec, holdout))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClustererKind {
    Louvain,
    Kmeans,
}

/// Detector hyperparameters shared by `fit` and `ablate`.
#[derive(Debug, Args)]
pub struct FitFlags {
    /// Neighbors per node in the KNN graph [default: 7].
    #[arg(long)]
    pub k: Option<usize>,
    /// Keep the fewest PCA components explaining this variance fraction [default: 0.95].
    #[arg(long, conflicts_with = "pca_dim")]
    pub pca_var: Option<f64>,
    /// Keep exactly this many PCA components.
    #[arg(long)]
    pub pca_dim: Option<usize>,
    /// Upper bound on components chosen by --pca-var [default: 128].
    #[arg(long)]
    pub pca_max_dim: Option<usize>,
    /// Node clustering algorithm [default: louvain].
    #[arg(long, value_enum)]
    pub clusterer: Option<ClustererKind>,
    /// K-means cluster count. Without it, K-means uses as many clusters as
    /// Louvain finds on the same graph.
    #[arg(long)]
    pub k_clusters: Option<usize>,
    /// Louvain resolution [default: 1.0].
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Keep only mutual nearest-neighbor edges instead of the union.
    #[arg(long)]
    pub mutual: bool,
    /// Random seed for clustering [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Covariance ridge as a fraction of the mean per-axis variance [default: 0.001].
    #[arg(long)]
    pub ridge: Option<f64>,
}

impl FitFlags {
    pub fn resolve(&self, config: &RunConfig) -> CliResult<FitConfig> {
        let base = FitConfig::default();
        let max_components = Some(self.pca_max_dim.or(config.pca_max_dim).unwrap_or(DEFAULT_PCA_MAX_DIM));
        let variance = |fraction| PcaTarget::VarianceFraction {
            fraction,
            max_components,
        };
        let pca = match (self.pca_dim, self.pca_var, config.pca_dim, config.pca_var) {
            (Some(p), _, _, _) => PcaTarget::Components(p),
            (None, Some(f), _, _) => variance(f),
            (None, None, Some(_), Some(_)) => {
                return Err(CliError::usage("configuration sets both pca-dim and pca-var"))
            }
            (None, None, Some(p), None) => PcaTarget::Components(p),
            (None, None, None, Some(f)) => variance(f),
            (None, None, None, None) => match base.pca {
                PcaTarget::VarianceFraction { fraction, .. } => variance(fraction),
                other => other,
            },
        };
        let kind = match (self.clusterer, config.clusterer.as_deref()) {
            (Some(kind), _) => kind,
            (None, Some(text)) => ClustererKind::from_str(text, true)
                .map_err(|_| CliError::usage(format!("unknown clusterer {text:?} (expected louvain or kmeans)")))?,
            (None, None) => ClustererKind::Louvain,
        };
        let clusterer = match kind {
            ClustererKind::Louvain => Clusterer::Louvain {
                resolution: self.resolution.or(config.resolution).unwrap_or(1.0),
            },
            ClustererKind::Kmeans => Clusterer::Kmeans {
                clusters: self.k_clusters.or(config.k_clusters),
            },
        };
        let mutual = self.mutual || config.mutual.unwrap_or(false);
        let resolved = FitConfig {
            k: self.k.or(config.k).unwrap_or(base.k),
            pca,
            ridge_scale: self.ridge.or(config.ridge).unwrap_or(base.ridge_scale),
            seed: self.seed.or(config.seed).unwrap_or(base.seed),
            clusterer,
            symmetrization: if mutual {
                Symmetrization::Mutual
            } else {
                Symmetrization::Union
            },
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// In-distribution embeddings (OODE or CSV).
    #[arg(long)]
    pub id: PathBuf,
    /// Model file to write (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write the KNN graph as a `u v weight` edge list.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Also write the training partition as labels (OODL or CSV);
    /// isolated rows get 4294967295.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[command(flatten)]
    pub fit: FitFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    Holdout,
    Training,
}

impl From<SourceKind> for CalibrationSource {
    fn from(kind: SourceKind) -> Self {
        match kind {
            SourceKind::Holdout => CalibrationSource::Holdout,
            SourceKind::Training => CalibrationSource::Training,
        }
    }
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Model to calibrate.
    #[arg(long)]
    pub model: PathBuf,
    /// In-distribution embeddings whose score percentile becomes the threshold.
    #[arg(long)]
    pub holdout: PathBuf,
    /// Percentile in (0, 100] [default: 95].
    #[arg(long)]
    pub percentile: Option<f64>,
    /// Whether --holdout is held-out data or the training set (recorded in the model).
    #[arg(long, value_enum, default_value_t = SourceKind::Holdout)]
    pub source: SourceKind,
    /// Calibrated model to write; may equal --model.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Embeddings to score.
    #[arg(long)]
    pub input: PathBuf,
    /// CSV report `index,score,nearest_cluster,is_ood`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// In-distribution evaluation embeddings.
    #[arg(long)]
    pub id: PathBuf,
    /// Out-of-distribution evaluation embeddings.
    #[arg(long)]
    pub ood: PathBuf,
    /// JSON report with auroc, aupr and accuracy at the model threshold.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    /// AUROC per KNN neighbor count.
    K,
    /// Accuracy per calibration percentile.
    Threshold,
    /// Louvain against K-means with Louvain's cluster count.
    Clusterer,
    /// Raw-feature KNN distance baseline per neighbor count.
    RawKnn,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long, value_enum)]
    pub sweep: Sweep,
    /// Comma-separated values, inclusive integer ranges allowed (`5..15`).
    /// Defaults: k 5,7,11; threshold 80,85,90,95,99; raw-knn 5..15.
    #[arg(long)]
    pub values: Option<String>,
    /// Training in-distribution embeddings; thresholds are calibrated on them.
    #[arg(long)]
    pub id: PathBuf,
    /// OOD evaluation embeddings.
    #[arg(long)]
    pub ood: PathBuf,
    /// Separate in-distribution evaluation embeddings [default: --id].
    #[arg(long)]
    pub eval_id: Option<PathBuf>,
    /// CSV table to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Calibration percentile for the pipeline run in raw-knn sweeps [default: 95].
    #[arg(long)]
    pub percentile: Option<f64>,
    /// JSON run configuration; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub fit: FitFlags,
}

/// Parses `5,7,11`, `5..15` (inclusive) or a mix of both.
pub fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((lo, hi)) = token.split_once("..") {
            let parse = |s: &str| {
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| CliError::usage(format!("bad range bound {s:?} in {token:?}")))
            };
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                return Err(CliError::usage(format!("empty range {token:?}")));
            }
            out.extend((lo..=hi).map(|v| v as f64));
        } else {
            let value = token
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("bad value {token:?}")))?;
            if !value.is_finite() {
                return Err(CliError::usage(format!("bad value {token:?}")));
            }
            out.push(value);
        }
    }
    if out.is_empty() {
        return Err(CliError::usage("--values is empty"));
    }
    Ok(out)
}

/// Values that must be positive integers, such as neighbor counts.
pub fn as_counts(values: &[f64]) -> CliResult<Vec<usize>> {
    values
        .iter()
        .map(|&v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(CliError::usage(format!("{v} is not a positive integer")))
            }
        })
        .collect()
}

pub fn load_config(path: Option<&PathBuf>) -> CliResult<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).map_err(|e| match e {
            oodg::Error::Json(inner) => CliError::usage(format!("invalid configuration {}: {inner}", p.display())),
            other => other.into(),
        }),
        None => Ok(RunConfig::default()),
    }
}
