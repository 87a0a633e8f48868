use rayon::prelude::*;

use crate::data::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::linalg::squared_euclidean;

/// Raw-feature KNN baseline: mean Euclidean distance from each query to its
/// `k` nearest in-distribution rows. No PCA, no graph; larger is more OOD.
pub fn knn_raw_baseline(
    x_id: &EmbeddingMatrix,
    x_query: &EmbeddingMatrix,
    k: usize,
) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k > x_id.n() {
        return Err(Error::KTooLarge { k, max: x_id.n() });
    }
    if x_query.d() != x_id.d() {
        return Err(Error::DimMismatch {
            expected: x_id.d(),
            actual: x_query.d(),
        });
    }
    let reference = x_id.to_matrix();
    let queries = x_query.to_matrix();
    Ok((0..queries.rows())
        .into_par_iter()
        .map(|q| {
            let row = queries.row(q);
            let mut dists: Vec<f64> = reference
                .row_iter()
                .map(|r| squared_euclidean(row, r))
                .collect();
            if k < dists.len() {
                dists.select_nth_unstable_by(k - 1, f64::total_cmp);
                dists.truncate(k);
            }
            dists.sort_by(f64::total_cmp);
            dists.iter().map(|d| d.sqrt()).sum::<f64>() / k as f64
        })
        .collect())
}
