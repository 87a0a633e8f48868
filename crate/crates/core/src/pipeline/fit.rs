use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::community::{modularity, KMeans, Louvain, Partition};
use crate::data::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph_with, isolated_nodes, KnnGraph, Symmetrization};
use crate::linalg::{
    fit_gaussian, fit_pca, norm, pca_transform, ClusterGaussian, Matrix, PcaModel, PcaTarget,
    DEFAULT_RIDGE_SCALE, ZERO_NORM,
};

use super::model::{FitMetadata, OodModel, MODEL_SCHEMA};

/// Minimum number of in-distribution rows accepted by [`fit`].
const MIN_FIT_SAMPLES: usize = 10;

/// Clusters smaller than `max(SMALL_CLUSTER, p)` borrow the pooled covariance.
const SMALL_CLUSTER: usize = 10;

/// Node clustering algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Clusterer {
    Louvain { resolution: f64 },
    /// `clusters: None` uses the cluster count Louvain finds on the same
    /// graph.
    Kmeans { clusters: Option<usize> },
}

impl Default for Clusterer {
    fn default() -> Self {
        Clusterer::Louvain { resolution: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Neighbors per node in the KNN graph.
    pub k: usize,
    pub pca: PcaTarget,
    pub ridge_scale: f64,
    pub seed: u64,
    pub clusterer: Clusterer,
    pub symmetrization: Symmetrization,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            k: 7,
            pca: PcaTarget::default(),
            ridge_scale: DEFAULT_RIDGE_SCALE,
            seed: 0,
            clusterer: Clusterer::default(),
            symmetrization: Symmetrization::Union,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        self.pca.validate()?;
        if !(self.ridge_scale > 0.0 && self.ridge_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ridge scale must be positive, got {}",
                self.ridge_scale
            )));
        }
        match self.clusterer {
            Clusterer::Louvain { resolution } if !(resolution > 0.0 && resolution.is_finite()) => {
                Err(Error::InvalidArgument(format!(
                    "Louvain resolution must be positive, got {resolution}"
                )))
            }
            Clusterer::Kmeans { clusters: Some(0) } => Err(Error::InvalidArgument(
                "k-means cluster count must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Wall-clock seconds spent in each fitting stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub pca: f64,
    pub graph: f64,
    pub clustering: f64,
    pub gaussians: f64,
}

/// Model plus the intermediate artifacts of a fit.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub model: OodModel,
    /// Cluster per training row; isolated rows unassigned.
    pub partition: Partition,
    /// Training rows in PCA space.
    pub reduced: Matrix,
    /// Absent on the degenerate path.
    pub graph: Option<KnnGraph>,
    pub timings: StageTimings,
}

pub fn fit(x_id: &EmbeddingMatrix, config: &FitConfig) -> Result<OodModel> {
    Ok(fit_detailed(x_id, config)?.model)
}

/// Runs the full phase-1 pipeline and keeps the intermediate artifacts.
pub fn fit_detailed(x_id: &EmbeddingMatrix, config: &FitConfig) -> Result<FitReport> {
    config.validate()?;
    let n = x_id.n();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            found: n,
        });
    }
    let x = x_id.to_matrix();
    let mut timings = StageTimings::default();

    let clock = Instant::now();
    let pca = match fit_pca(&x, config.pca) {
        Ok(pca) => pca,
        Err(Error::DegenerateData(_)) => return fit_degenerate(&x, config),
        Err(e) => return Err(e),
    };
    let reduced = pca_transform(&pca, &x)?;
    timings.pca = clock.elapsed().as_secs_f64();

    // Rows sitting on the mean have no direction; they cannot be placed in
    // a cosine graph and are treated as isolated.
    let clock = Instant::now();
    let directed: Vec<usize> = (0..n)
        .filter(|&i| norm(reduced.row(i)) >= ZERO_NORM)
        .collect();
    if directed.len() < 2 {
        return Err(Error::AllNodesIsolated);
    }
    if config.k > n - 1 {
        return Err(Error::KTooLarge {
            k: config.k,
            max: n - 1,
        });
    }
    let k = config.k.min(directed.len() - 1);
    let sub_graph = build_knn_graph_with(&reduced.select_rows(&directed), k, config.symmetrization)?;
    let graph = lift_graph(&sub_graph, &directed, n)?;
    if graph.edge_count() == 0 {
        return Err(Error::AllNodesIsolated);
    }
    let isolated = isolated_nodes(&graph);
    timings.graph = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let partition = match config.clusterer {
        Clusterer::Louvain { resolution } => {
            Louvain::new()
                .with_resolution(resolution)
                .with_seed(config.seed)
                .run(&graph)?
                .partition
        }
        Clusterer::Kmeans { clusters } => {
            let count = match clusters {
                Some(c) => c,
                None => Louvain::new()
                    .with_seed(config.seed)
                    .run(&graph)?
                    .partition
                    .cluster_count(),
            };
            let active: Vec<usize> = (0..n).filter(|&u| !graph.neighbors(u).is_empty()).collect();
            let result = KMeans::new(count)
                .with_seed(config.seed)
                .run(&reduced.select_rows(&active))?;
            let mut full = vec![None; n];
            for (&u, c) in active.iter().zip(result.partition.assignment()) {
                full[u] = *c;
            }
            let p = Partition::from_assignment(full);
            let q = modularity(&graph, &p)?;
            p.with_modularity(q)
        }
    };
    timings.clustering = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let pooled = fit_gaussian(&reduced, config.ridge_scale)?;
    let (clusters, fallbacks) = cluster_gaussians(&reduced, &partition, &pooled, config.ridge_scale)?;
    timings.gaussians = clock.elapsed().as_secs_f64();

    let fit_metadata = FitMetadata {
        k: config.k,
        seed: config.seed,
        ridge_scale: config.ridge_scale,
        pca_target: config.pca,
        clusterer: config.clusterer,
        symmetrization: config.symmetrization,
        samples: n,
        input_dim: x_id.d(),
        reduced_dim: pca.output_dim(),
        cluster_count: clusters.len(),
        isolated_count: isolated.len(),
        edge_count: graph.edge_count(),
        modularity: partition.modularity(),
        pooled_fallback_clusters: fallbacks,
        calibration: None,
    };
    let model = OodModel {
        schema: MODEL_SCHEMA.to_string(),
        pca,
        clusters,
        pooled,
        threshold: None,
        fit_metadata,
    };
    Ok(FitReport {
        model,
        partition,
        reduced,
        graph: Some(graph),
        timings,
    })
}

/// Re-indexes a graph built on a subset of rows back onto all `n` rows.
fn lift_graph(sub: &KnnGraph, rows: &[usize], n: usize) -> Result<KnnGraph> {
    if rows.len() == n {
        return Ok(sub.clone());
    }
    let edges: Vec<(usize, usize, f64)> = sub.edges().map(|(u, v, w)| (rows[u], rows[v], w)).collect();
    KnnGraph::from_edges(n, &edges)
}

/// One Gaussian per cluster; clusters below the size floor keep their own
/// centroid but score with the pooled covariance.
fn cluster_gaussians(
    reduced: &Matrix,
    partition: &Partition,
    pooled: &ClusterGaussian,
    ridge_scale: f64,
) -> Result<(Vec<ClusterGaussian>, usize)> {
    let floor = SMALL_CLUSTER.max(reduced.cols());
    let mut fallbacks = 0;
    let clusters = partition
        .members()
        .iter()
        .map(|members| {
            let rows = reduced.select_rows(members);
            if members.len() < floor {
                fallbacks += 1;
                pooled.recentered(rows.column_means(), members.len())
            } else {
                fit_gaussian(&rows, ridge_scale)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((clusters, fallbacks))
}

/// All rows (numerically) identical: one cluster, pooled Gaussian, and a
/// single arbitrary axis so the model still has a reduced space.
fn fit_degenerate(x: &Matrix, config: &FitConfig) -> Result<FitReport> {
    let d = x.cols();
    let mut components = Matrix::zeros(1, d);
    components[(0, 0)] = 1.0;
    let pca = PcaModel {
        mean: x.column_means(),
        components,
        explained_variance: vec![0.0],
        total_variance: 0.0,
    };
    let reduced = pca_transform(&pca, x)?;
    let pooled = fit_gaussian(&reduced, config.ridge_scale)?;
    let cluster = pooled.recentered(pooled.centroid().to_vec(), x.rows())?;
    let n = x.rows();
    let fit_metadata = FitMetadata {
        k: config.k,
        seed: config.seed,
        ridge_scale: config.ridge_scale,
        pca_target: config.pca,
        clusterer: config.clusterer,
        symmetrization: config.symmetrization,
        samples: n,
        input_dim: d,
        reduced_dim: 1,
        cluster_count: 1,
        isolated_count: 0,
        edge_count: 0,
        modularity: None,
        pooled_fallback_clusters: 1,
        calibration: None,
    };
    Ok(FitReport {
        model: OodModel {
            schema: MODEL_SCHEMA.to_string(),
            pca,
            clusters: vec![cluster],
            pooled,
            threshold: None,
            fit_metadata,
        },
        partition: Partition::from_labels(&vec![0; n]),
        reduced,
        graph: None,
        timings: StageTimings::default(),
    })
}
