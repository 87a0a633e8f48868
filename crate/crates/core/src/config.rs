//! JSON run configuration. Keys mirror the command-line flags; every key is
//! optional and command-line flags take precedence.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub k: Option<usize>,
    pub pca_var: Option<f64>,
    pub pca_dim: Option<usize>,
    pub pca_max_dim: Option<usize>,
    pub clusterer: Option<String>,
    pub k_clusters: Option<usize>,
    pub resolution: Option<f64>,
    pub mutual: Option<bool>,
    pub seed: Option<u64>,
    pub ridge: Option<f64>,
    pub percentile: Option<f64>,
    pub clusters: Option<usize>,
    pub dim: Option<usize>,
    pub per_cluster: Option<usize>,
    pub center_scale: Option<f64>,
    pub within_std: Option<f64>,
    pub ood_mode: Option<String>,
    pub ood_magnitude: Option<f64>,
    pub ood_count: Option<usize>,
    pub holdout_per_cluster: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flag_named_keys() {
        let c = RunConfig::from_json(r#"{"k": 5, "pca-var": 0.9, "k-clusters": 12, "seed": 3}"#).unwrap();
        assert_eq!(c.k, Some(5));
        assert_eq!(c.pca_var, Some(0.9));
        assert_eq!(c.k_clusters, Some(12));
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.ridge, None);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(RunConfig::from_json(r#"{"neighbours": 5}"#).is_err());
    }
}
