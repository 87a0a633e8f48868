//! Dense numerical kernels: cosine similarity, PCA, regularized Gaussians and
//! Mahalanobis distance.

mod cosine;
mod dense;
mod gaussian;
mod pca;

pub use cosine::{cosine_similarity, ZERO_NORM};
pub use dense::{dot, norm, squared_euclidean, Matrix};
pub use gaussian::{fit_gaussian, mahalanobis, Cholesky, ClusterGaussian, DEFAULT_RIDGE_SCALE};
pub use pca::{fit_pca, pca_transform, PcaModel, PcaTarget};
