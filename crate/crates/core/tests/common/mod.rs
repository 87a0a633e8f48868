//! Independent reference implementations used as test oracles. Each one is
//! written the slow, obvious way and shares no code with the library.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal draw via Box–Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_dense(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Dense {
    (0..rows).map(|_| (0..cols).map(|_| normal(rng)).collect()).collect()
}

pub fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; p]; n];
    for i in 0..n {
        for j in 0..p {
            for t in 0..m {
                out[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    out
}

pub fn transpose(a: &Dense) -> Dense {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Random symmetric positive-definite matrix `B Bᵀ + εI` with a condition
/// number kept moderate by the diagonal shift.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Dense {
    let b = random_dense(rng, n, n);
    let mut s = mat_mul(&b, &transpose(&b));
    for (i, row) in s.iter_mut().enumerate() {
        row[i] += 0.5;
    }
    s
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn gauss_jordan_inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        assert!(p.abs() > 1e-300, "singular matrix");
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `(x − μ)ᵀ A⁻¹ (x − μ)` with an explicit inverse.
pub fn explicit_quadratic_form(a: &Dense, x: &[f64], mu: &[f64]) -> f64 {
    let inv = gauss_jordan_inverse(a);
    let d: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
    let mut q = 0.0;
    for i in 0..d.len() {
        for j in 0..d.len() {
            q += d[i] * inv[i][j] * d[j];
        }
    }
    q
}

/// Eigenvalues (descending) and matching eigenvectors (as columns) of a
/// symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut m = a.clone();
    let mut v: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    (values, vectors)
}

/// Unbiased sample covariance of the rows.
pub fn sample_covariance(rows: &Dense) -> Dense {
    let n = rows.len();
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let mut c = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    for row in c.iter_mut() {
        for v in row.iter_mut() {
            *v /= (n - 1) as f64;
        }
    }
    c
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Union-symmetrized cosine k-NN edge set `(u, v, w)` with `u < v`, sorted,
/// found by sorting every row's full similarity list.
pub fn brute_knn_edges(x: &Dense, k: usize) -> Vec<(usize, usize, f64)> {
    let n = x.len();
    let mut edges = std::collections::BTreeMap::new();
    for u in 0..n {
        let mut sims: Vec<(usize, f64)> = (0..n).filter(|&v| v != u).map(|v| (v, cosine(&x[u], &x[v]))).collect();
        sims.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        for &(v, w) in sims.iter().take(k) {
            if w > 0.0 {
                edges.insert((u.min(v), u.max(v)), w);
            }
        }
    }
    edges.into_iter().map(|((u, v), w)| (u, v, w)).collect()
}

/// AUROC as the fraction of (ID, OOD) pairs ranked correctly, ties half.
pub fn pair_count_auroc(id: &[f64], ood: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &o in ood {
        for &i in id {
            if o > i {
                wins += 1.0;
            } else if o == i {
                wins += 0.5;
            }
        }
    }
    wins / (id.len() * ood.len()) as f64
}

/// Average precision by walking every distinct threshold from high to low
/// and recounting the confusion matrix from scratch.
pub fn curve_walk_ap(id: &[f64], ood: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = id.iter().chain(ood).copied().collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut ap = 0.0;
    let mut previous_recall = 0.0;
    for t in thresholds {
        let tp = ood.iter().filter(|&&s| s >= t).count() as f64;
        let fp = id.iter().filter(|&&s| s >= t).count() as f64;
        let recall = tp / ood.len() as f64;
        if tp > 0.0 {
            ap += (recall - previous_recall) * tp / (tp + fp);
        }
        previous_recall = recall;
    }
    ap
}

/// `−log( exp(s_ij/τ) / Σ_{k≠i} exp(s_ik/τ) )` summed without any
/// stabilization.
pub fn naive_info_nce(rows: &Dense, tau: f64, i: usize, j: usize) -> f64 {
    let numerator = (cosine(&rows[i], &rows[j]) / tau).exp();
    let denominator: f64 = (0..rows.len())
        .filter(|&k| k != i)
        .map(|k| (cosine(&rows[i], &rows[k]) / tau).exp())
        .sum();
    -(numerator / denominator).ln()
}

/// Newman–Girvan modularity from the dense adjacency matrix:
/// `Q = (1/2m) Σ_ij [A_ij − γ k_i k_j / 2m] δ(c_i, c_j)`.
pub fn dense_modularity(n: usize, edges: &[(usize, usize, f64)], labels: &[usize], gamma: f64) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        a[u][v] += w;
        a[v][u] += w;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - gamma * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted-growth label strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for label in 0..=max + 1 {
            prefix.push(label);
            grow(prefix, max.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    grow(&mut vec![0], 0, n, &mut out);
    out
}

/// Minimum k-means inertia over every assignment of the points to `k`
/// non-empty clusters, each cluster at its mean.
pub fn exhaustive_kmeans_optimum(points: &Dense, k: usize) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    loop {
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        if counts.iter().all(|&c| c > 0) {
            best = best.min(inertia(points, &labels, k));
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

pub fn inertia(points: &Dense, labels: &[usize], k: usize) -> f64 {
    let d = points[0].len();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for j in 0..d {
            sums[l][j] += p[j];
        }
    }
    let mut total = 0.0;
    for (p, &l) in points.iter().zip(labels) {
        for j in 0..d {
            let c = sums[l][j] / counts[l] as f64;
            total += (p[j] - c) * (p[j] - c);
        }
    }
    total
}

/// Points from `k` well-separated isotropic blobs, `per` each, with labels.
pub fn blobs(rng: &mut ChaCha8Rng, k: usize, per: usize, dim: usize, spread: f64, std: f64) -> (Dense, Vec<usize>) {
    let centers: Dense = (0..k)
        .map(|_| (0..dim).map(|_| spread * (2.0 * rng.random::<f64>() - 1.0)).collect())
        .collect();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per {
            points.push(center.iter().map(|&m| m + std * normal(rng)).collect());
            labels.push(c);
        }
    }
    (points, labels)
}

/// Scores with deliberate ties: drawn from a small grid with probability
/// one half.
pub fn tied_scores(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.random::<bool>() {
                (rng.random_range(0..8) as f64) * 0.25 + shift.round()
            } else {
                normal(rng) + shift
            }
        })
        .collect()
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Planted-partition graph: `blocks` groups of `size` nodes, in-block edge
/// probability `p_in`, cross-block `p_out`, unit weights.
pub fn planted_partition(rng: &mut ChaCha8Rng, blocks: usize, size: usize, p_in: f64, p_out: f64) -> Vec<(usize, usize, f64)> {
    let n = blocks * size;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / size == v / size { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    edges
}
