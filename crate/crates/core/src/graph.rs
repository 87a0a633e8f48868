//! Cosine-weighted k-nearest-neighbor graph over embedding rows.
//!
//! Neighbor search is exact: every row is compared against every other row.
//! Candidate edges with non-positive similarity are dropped so the graph is
//! a valid modularity input, then the directed candidate lists are
//! symmetrized.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix, ZERO_NORM};

/// How directed k-NN choices become undirected edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetrization {
    /// Keep `{u, v}` when either endpoint selected the other.
    #[default]
    Union,
    /// Keep `{u, v}` only when both endpoints selected each other.
    Mutual,
}

/// Undirected weighted graph with per-node adjacency sorted by neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
    total_weight: f64,
}

impl KnnGraph {
    /// Builds a graph from undirected edges `(u, v, w)`.
    ///
    /// Rejects self-loops, non-positive or non-finite weights, and duplicate
    /// edges (in either orientation).
    pub fn from_edges(node_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            for index in [u, v] {
                if index >= node_count {
                    return Err(Error::IndexOutOfRange {
                        index,
                        len: node_count,
                    });
                }
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop on node {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            canonical.push((u.min(v), u.max(v), w));
        }
        canonical.sort_by_key(|e| (e.0, e.1));
        if let Some(w) = canonical.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidArgument(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_canonical(node_count, &canonical))
    }

    /// `edges` must be sorted, deduplicated and have `u < v`.
    fn from_canonical(node_count: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut total_weight = 0.0;
        for &(u, v, w) in edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
            total_weight += w;
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Self {
            adjacency,
            edge_count: edges.len(),
            total_weight,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sum of undirected edge weights (`m` in the modularity formula).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    /// Weighted degree `s_u`.
    pub fn strength(&self, u: usize) -> f64 {
        self.adjacency[u].iter().map(|&(_, w)| w).sum()
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&(v, _)| u < v)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    /// Writes one `u v w` line per edge, `u < v`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v, w) in self.edges() {
            writeln!(out, "{u} {v} {w}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Nodes without any edge, ascending.
pub fn isolated_nodes(g: &KnnGraph) -> Vec<usize> {
    (0..g.node_count())
        .filter(|&u| g.adjacency[u].is_empty())
        .collect()
}

/// Cosine similarity between rows `u` and `v` given precomputed norms.
/// Symmetric bit-for-bit in `(u, v)`.
#[inline]
fn row_similarity(x: &Matrix, norms: &[f64], u: usize, v: usize) -> f64 {
    (dot(x.row(u), x.row(v)) / (norms[u] * norms[v])).clamp(-1.0, 1.0)
}

/// The `k` most similar other rows of `u`, most similar first, ties to the
/// lower index.
fn top_k(x: &Matrix, norms: &[f64], u: usize, k: usize) -> Vec<(usize, f64)> {
    let mut candidates: Vec<(usize, f64)> = (0..x.rows())
        .filter(|&v| v != u)
        .map(|v| (v, row_similarity(x, norms, u, v)))
        .collect();
    let order = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, order);
        candidates.truncate(k);
    }
    candidates.sort_by(order);
    candidates
}

/// Exact k-NN graph with union symmetrization.
pub fn build_knn_graph(x: &Matrix, k: usize) -> Result<KnnGraph> {
    build_knn_graph_with(x, k, Symmetrization::Union)
}

pub fn build_knn_graph_with(x: &Matrix, k: usize, mode: Symmetrization) -> Result<KnnGraph> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, found: n });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k > n - 1 {
        return Err(Error::KTooLarge { k, max: n - 1 });
    }
    let norms: Vec<f64> = x.row_iter().map(norm).collect();
    if let Some(row) = norms.iter().position(|&v| !(v >= ZERO_NORM)) {
        return Err(Error::ZeroNorm { row: Some(row) });
    }

    let chosen: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut list = top_k(x, &norms, u, k);
            list.retain(|&(_, w)| w > 0.0);
            list
        })
        .collect();

    let mut directed: Vec<(usize, usize, f64)> = chosen
        .iter()
        .enumerate()
        .flat_map(|(u, list)| list.iter().map(move |&(v, w)| (u.min(v), u.max(v), w)))
        .collect();
    directed.sort_by_key(|e| (e.0, e.1));

    let mut edges = Vec::with_capacity(directed.len());
    let mut i = 0;
    while i < directed.len() {
        let mut j = i + 1;
        while j < directed.len() && (directed[j].0, directed[j].1) == (directed[i].0, directed[i].1) {
            j += 1;
        }
        let keep = match mode {
            Symmetrization::Union => true,
            Symmetrization::Mutual => j - i == 2,
        };
        if keep {
            edges.push(directed[i]);
        }
        i = j;
    }
    Ok(KnnGraph::from_canonical(n, &edges))
}
