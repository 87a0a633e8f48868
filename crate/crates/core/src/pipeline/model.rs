use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Symmetrization;
use crate::linalg::{ClusterGaussian, PcaModel, PcaTarget};

use super::fit::Clusterer;

/// Schema tag written into every model file.
pub const MODEL_SCHEMA: &str = "oodg-model/1";

/// Where the decision threshold came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationSource {
    /// The in-distribution rows the model was fitted on.
    Training,
    /// A separate in-distribution holdout.
    Holdout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub percentile: f64,
    pub source: CalibrationSource,
    pub samples: usize,
}

/// Parameters and diagnostics recorded at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMetadata {
    pub k: usize,
    pub seed: u64,
    pub ridge_scale: f64,
    pub pca_target: PcaTarget,
    pub clusterer: Clusterer,
    pub symmetrization: Symmetrization,
    pub samples: usize,
    pub input_dim: usize,
    pub reduced_dim: usize,
    pub cluster_count: usize,
    pub isolated_count: usize,
    pub edge_count: usize,
    /// Modularity of the clustering on the KNN graph; absent on the
    /// degenerate single-cluster path where no graph is built.
    pub modularity: Option<f64>,
    /// Clusters scored with the pooled covariance because they were too small.
    pub pooled_fallback_clusters: usize,
    pub calibration: Option<Calibration>,
}

/// Everything needed to score new samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OodModel {
    pub schema: String,
    pub pca: PcaModel,
    pub clusters: Vec<ClusterGaussian>,
    /// Gaussian over all in-distribution rows; donor covariance for small
    /// clusters.
    pub pooled: ClusterGaussian,
    pub threshold: Option<f64>,
    pub fit_metadata: FitMetadata,
}

impl OodModel {
    pub fn input_dim(&self) -> usize {
        self.pca.input_dim()
    }

    pub fn reduced_dim(&self) -> usize {
        self.pca.output_dim()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    /// Checks the structural invariants a deserialized model must satisfy.
    pub fn validate(&self) -> Result<()> {
        if self.schema != MODEL_SCHEMA {
            return Err(Error::InvalidArgument(format!(
                "unsupported model schema {:?} (expected {MODEL_SCHEMA:?})",
                self.schema
            )));
        }
        if self.clusters.is_empty() {
            return Err(Error::InvalidArgument("model has no clusters".into()));
        }
        let p = self.reduced_dim();
        if self.pca.components.cols() != self.pca.mean.len() {
            return Err(Error::DimMismatch {
                expected: self.pca.mean.len(),
                actual: self.pca.components.cols(),
            });
        }
        for g in self.clusters.iter().chain(std::iter::once(&self.pooled)) {
            if g.dim() != p {
                return Err(Error::DimMismatch {
                    expected: p,
                    actual: g.dim(),
                });
            }
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "threshold must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn to_writer<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.to_writer(&mut out)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let model: OodModel = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        model.validate()?;
        Ok(model)
    }
}
