//! Out-of-distribution detection over embedding vectors.
//!
//! In-distribution embeddings are reduced with PCA, linked into a
//! cosine-weighted k-nearest-neighbor graph and partitioned with Louvain.
//! Each community becomes a Gaussian; a query's score is its smallest
//! Mahalanobis distance to any community, and a percentile of
//! in-distribution scores serves as the decision threshold.
//!
//! ```no_run
//! use oodg::{io, pipeline, metrics};
//!
//! let id = io::load_embeddings("id.oode")?;
//! let ood = io::load_embeddings("ood.oode")?;
//! let model = pipeline::fit(&id, &pipeline::FitConfig::default())?;
//! let model = pipeline::calibrate_threshold(&model, &id, 95.0)?;
//! let id_scores = pipeline::score(&model, &id)?.scores();
//! let ood_scores = pipeline::score(&model, &ood)?.scores();
//! println!("AUROC {}", metrics::auroc(&id_scores, &ood_scores)?);
//! # Ok::<(), oodg::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN. Index loops are the
// clearest form for the triangular solves and small dense kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod community;
pub mod config;
pub mod contrastive;
pub mod data;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod synth;

pub use community::{kmeans, louvain, modularity, Partition};
pub use data::{EmbeddingMatrix, LabelVector};
pub use error::{Error, Result};
pub use graph::{build_knn_graph, isolated_nodes, KnnGraph, Symmetrization};
pub use linalg::{ClusterGaussian, Matrix, PcaModel, PcaTarget};
pub use metrics::EvalReport;
pub use pipeline::{FitConfig, OodModel, ScoreReport};
