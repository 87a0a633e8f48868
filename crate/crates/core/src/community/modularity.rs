use crate::error::{Error, Result};
use crate::graph::KnnGraph;

use super::Partition;

/// Weighted Newman–Girvan modularity with resolution 1.
pub fn modularity(g: &KnnGraph, p: &Partition) -> Result<f64> {
    modularity_with_resolution(g, p, 1.0)
}

/// `Q = Σ_c [ L_c / m − γ (D_c / 2m)² ]`, where `L_c` is the edge weight
/// inside cluster `c` and `D_c` the summed weighted degree of its nodes.
pub fn modularity_with_resolution(g: &KnnGraph, p: &Partition, resolution: f64) -> Result<f64> {
    if p.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            expected: g.node_count(),
            actual: p.len(),
        });
    }
    let m = g.total_weight();
    if g.edge_count() == 0 || !(m > 0.0) {
        return Err(Error::EmptyGraph);
    }
    let mut internal = vec![0.0; p.cluster_count()];
    let mut degree = vec![0.0; p.cluster_count()];
    for u in 0..g.node_count() {
        let neighbors = g.neighbors(u);
        if neighbors.is_empty() {
            continue;
        }
        let cu = p.cluster_of(u).ok_or(Error::UnassignedNode(u))?;
        for &(v, w) in neighbors {
            degree[cu] += w;
            if u < v && p.cluster_of(v) == Some(cu) {
                internal[cu] += w;
            }
        }
    }
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(l, d)| l / m - resolution * (d / (2.0 * m)).powi(2))
        .sum())
}
