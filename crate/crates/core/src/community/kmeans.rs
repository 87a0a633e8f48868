//! Lloyd's K-means with greedy k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{squared_euclidean, Matrix};

use super::Partition;

pub const DEFAULT_MAX_ITERS: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeans {
    k: usize,
    seed: u64,
    max_iters: usize,
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub partition: Partition,
    /// `k × d` cluster means.
    pub centroids: Matrix,
    /// Sum of squared distances to the assigned centroid.
    pub inertia: f64,
    /// Inertia after every assignment step, non-increasing.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
}

/// Nearest centroid (ties to the lower id) and its squared distance.
fn nearest(row: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centroids.row_iter().enumerate() {
        let d = squared_euclidean(row, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(x: &Matrix, centroids: &Matrix) -> Vec<(usize, f64)> {
    let rows: Vec<usize> = (0..x.rows()).collect();
    rows.par_iter().map(|&i| nearest(x.row(i), centroids)).collect()
}

impl KMeans {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            seed: 0,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    /// Greedy k-means++: each new center is the best of several
    /// D²-weighted candidates by resulting potential.
    fn seed_centers(&self, x: &Matrix, rng: &mut ChaCha8Rng) -> Matrix {
        let n = x.rows();
        let trials = 2 + (self.k as f64).ln().floor() as usize;
        let mut chosen = vec![rng.random_range(0..n)];
        let mut closest: Vec<f64> = x
            .row_iter()
            .map(|r| squared_euclidean(r, x.row(chosen[0])))
            .collect();

        while chosen.len() < self.k {
            let potential: f64 = closest.iter().sum();
            let mut best: Option<(usize, f64, Vec<f64>)> = None;
            for _ in 0..trials {
                let candidate = if potential > 0.0 {
                    let target = rng.random::<f64>() * potential;
                    let mut acc = 0.0;
                    let mut pick = n - 1;
                    for (i, d) in closest.iter().enumerate() {
                        acc += d;
                        if acc > target && *d > 0.0 {
                            pick = i;
                            break;
                        }
                    }
                    // guard against rounding landing on an already-chosen point
                    if closest[pick] == 0.0 {
                        pick = closest.iter().rposition(|&d| d > 0.0).unwrap_or(pick);
                    }
                    pick
                } else {
                    rng.random_range(0..n)
                };
                let updated: Vec<f64> = x
                    .row_iter()
                    .zip(&closest)
                    .map(|(r, &d)| d.min(squared_euclidean(r, x.row(candidate))))
                    .collect();
                let score: f64 = updated.iter().sum();
                if best.as_ref().is_none_or(|b| score < b.1) {
                    best = Some((candidate, score, updated));
                }
            }
            let (pick, _, updated) = best.expect("at least one trial");
            chosen.push(pick);
            closest = updated;
        }
        x.select_rows(&chosen)
    }

    pub fn run(&self, x: &Matrix) -> Result<KMeansResult> {
        let n = x.rows();
        if self.k == 0 {
            return Err(Error::InvalidArgument("k-means needs k >= 1".into()));
        }
        if self.k > n {
            return Err(Error::KTooLarge { k: self.k, max: n });
        }
        let d = x.cols();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut centroids = self.seed_centers(x, &mut rng);
        let mut assignment = assign(x, &centroids);
        let mut trace = vec![assignment.iter().map(|a| a.1).sum::<f64>()];
        let mut iterations = 0;

        while iterations < self.max_iters {
            iterations += 1;
            let mut sums = Matrix::zeros(self.k, d);
            let mut counts = vec![0usize; self.k];
            for (i, &(c, _)) in assignment.iter().enumerate() {
                counts[c] += 1;
                for (s, v) in sums.row_mut(c).iter_mut().zip(x.row(i)) {
                    *s += v;
                }
            }
            for c in 0..self.k {
                if counts[c] > 0 {
                    let inv = 1.0 / counts[c] as f64;
                    let mean: Vec<f64> = sums.row(c).iter().map(|s| s * inv).collect();
                    centroids.row_mut(c).copy_from_slice(&mean);
                }
            }
            // Empty clusters take the point farthest from its centroid.
            for c in 0..self.k {
                if counts[c] > 0 {
                    continue;
                }
                let far = (0..n)
                    .filter(|&i| counts[assignment[i].0] > 1)
                    .map(|i| (i, squared_euclidean(x.row(i), centroids.row(assignment[i].0))))
                    .fold(None, |best: Option<(usize, f64)>, cur| match best {
                        Some(b) if b.1 >= cur.1 => Some(b),
                        _ => Some(cur),
                    });
                if let Some((i, _)) = far {
                    counts[assignment[i].0] -= 1;
                    counts[c] = 1;
                    assignment[i] = (c, 0.0);
                    centroids.row_mut(c).copy_from_slice(x.row(i));
                }
            }

            let next = assign(x, &centroids);
            let inertia: f64 = next.iter().map(|a| a.1).sum();
            let previous = *trace.last().expect("trace starts non-empty");
            assert!(
                inertia <= previous + 1e-9 * previous.max(1.0),
                "k-means inertia increased: {previous} -> {inertia}"
            );
            trace.push(inertia);
            let stable = next.iter().zip(&assignment).all(|(a, b)| a.0 == b.0);
            assignment = next;
            if stable {
                break;
            }
        }

        let inertia = *trace.last().expect("trace starts non-empty");
        let labels: Vec<usize> = assignment.iter().map(|a| a.0).collect();
        Ok(KMeansResult {
            partition: Partition::from_labels(&labels),
            centroids,
            inertia,
            inertia_trace: trace,
            iterations,
        })
    }
}

/// K-means with default iteration cap.
pub fn kmeans(x: &Matrix, k: usize, seed: u64) -> Result<KMeansResult> {
    KMeans::new(k).with_seed(seed).run(x)
}
