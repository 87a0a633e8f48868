//! Seeded Gaussian-mixture data standing in for encoder embeddings.
//!
//! Every cluster draws from its own ChaCha8 stream (stream `j + 1` for
//! cluster `j`), so adding clusters never changes the draws of earlier ones.
//! Normal deviates come from the Box–Muller transform of uniform draws.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{EmbeddingMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const OOD_STREAM: u64 = u64::MAX;
const HOLDOUT_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OodMode {
    /// In-distribution sample displaced by `magnitude · within_std` along a
    /// random unit direction drawn independently for every OOD sample.
    Shifted,
    /// Cluster sample with its spread inflated to `magnitude · within_std`.
    Inflated,
    /// Uniform in `[−magnitude · center_scale, magnitude · center_scale]^dim`.
    Uniform,
}

impl std::str::FromStr for OodMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shifted" => Ok(OodMode::Shifted),
            "inflated" => Ok(OodMode::Inflated),
            "uniform" => Ok(OodMode::Uniform),
            other => Err(Error::InvalidArgument(format!(
                "unknown OOD mode {other:?} (expected shifted, inflated or uniform)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OodSpec {
    pub mode: OodMode,
    pub magnitude: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub cluster_count: usize,
    pub dim: usize,
    pub samples_per_cluster: usize,
    /// Centers are uniform in `[−center_scale, center_scale]^dim`.
    pub center_scale: f64,
    /// Isotropic within-cluster standard deviation.
    pub within_std: f64,
    pub seed: u64,
    pub ood: OodSpec,
}

impl Default for MixtureSpec {
    fn default() -> Self {
        Self {
            cluster_count: 10,
            dim: 32,
            samples_per_cluster: 200,
            center_scale: 1.0,
            within_std: 0.2,
            seed: 7,
            ood: OodSpec {
                mode: OodMode::Shifted,
                magnitude: 8.0,
                count: 1000,
            },
        }
    }
}

impl MixtureSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if self.cluster_count == 0 || self.dim == 0 || self.samples_per_cluster == 0 {
            return bad("cluster count, dimension and samples per cluster must be at least 1");
        }
        if self.ood.count == 0 {
            return bad("OOD sample count must be at least 1");
        }
        if !(self.center_scale > 0.0 && self.center_scale.is_finite()) {
            return bad("center scale must be positive");
        }
        // zero spread is allowed as the degenerate limit
        if !(self.within_std >= 0.0 && self.within_std.is_finite()) {
            return bad("within-cluster std must be non-negative");
        }
        if !(self.ood.magnitude >= 0.0 && self.ood.magnitude.is_finite()) {
            return bad("OOD magnitude must be non-negative");
        }
        Ok(())
    }
}

/// Generated data set.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    /// Cluster-major: all rows of cluster 0, then cluster 1, ...
    pub id: EmbeddingMatrix,
    pub ood: EmbeddingMatrix,
    pub id_labels: LabelVector,
    /// `cluster_count × dim` true centers.
    pub centers: Matrix,
}

/// Standard normal deviates from a uniform stream.
struct Normals<'a> {
    rng: &'a mut ChaCha8Rng,
    spare: Option<f64>,
}

impl<'a> Normals<'a> {
    fn new(rng: &'a mut ChaCha8Rng) -> Self {
        Self { rng, spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 − u lies in (0, 1], keeping the logarithm finite
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        self.spare = Some(r * (TAU * u2).sin());
        r * (TAU * u2).cos()
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn draw_center(rng: &mut ChaCha8Rng, spec: &MixtureSpec) -> Vec<f64> {
    (0..spec.dim)
        .map(|_| (2.0 * rng.random::<f64>() - 1.0) * spec.center_scale)
        .collect()
}

fn draw_rows(rng: &mut ChaCha8Rng, center: &[f64], std: f64, count: usize, out: &mut Vec<f32>) {
    let mut normals = Normals::new(rng);
    for _ in 0..count {
        out.extend(center.iter().map(|&c| (c + std * normals.next()) as f32));
    }
}

fn centers(spec: &MixtureSpec) -> Matrix {
    let mut data = Vec::with_capacity(spec.cluster_count * spec.dim);
    for j in 0..spec.cluster_count {
        data.extend(draw_center(&mut stream(spec.seed, j as u64 + 1), spec));
    }
    Matrix::from_vec(spec.cluster_count, spec.dim, data)
}

/// Draws the in-distribution mixture and the OOD set described by `spec`.
pub fn generate(spec: &MixtureSpec) -> Result<SynthData> {
    spec.validate()?;
    let (k, dim, per) = (spec.cluster_count, spec.dim, spec.samples_per_cluster);
    let mut id = Vec::with_capacity(k * per * dim);
    let mut labels = Vec::with_capacity(k * per);
    let mut center_data = Vec::with_capacity(k * dim);
    for j in 0..k {
        let mut rng = stream(spec.seed, j as u64 + 1);
        let center = draw_center(&mut rng, spec);
        draw_rows(&mut rng, &center, spec.within_std, per, &mut id);
        labels.extend(std::iter::repeat_n(j as u32, per));
        center_data.extend(center);
    }
    let centers = Matrix::from_vec(k, dim, center_data);

    let mut rng = stream(spec.seed, OOD_STREAM);
    let mut ood = Vec::with_capacity(spec.ood.count * dim);
    let sigma = spec.within_std;
    match spec.ood.mode {
        OodMode::Shifted => {
            let shift = spec.ood.magnitude * sigma;
            for _ in 0..spec.ood.count {
                let c = rng.random_range(0..k);
                let direction = {
                    let mut normals = Normals::new(&mut rng);
                    let v: Vec<f64> = (0..dim).map(|_| normals.next()).collect();
                    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / len).collect::<Vec<_>>()
                };
                let base: Vec<f64> = centers
                    .row(c)
                    .iter()
                    .zip(&direction)
                    .map(|(m, u)| m + shift * u)
                    .collect();
                draw_rows(&mut rng, &base, sigma, 1, &mut ood);
            }
        }
        OodMode::Inflated => {
            for _ in 0..spec.ood.count {
                let c = rng.random_range(0..k);
                draw_rows(&mut rng, centers.row(c), spec.ood.magnitude * sigma, 1, &mut ood);
            }
        }
        OodMode::Uniform => {
            let half = spec.ood.magnitude * spec.center_scale;
            for _ in 0..spec.ood.count * dim {
                ood.push(((2.0 * rng.random::<f64>() - 1.0) * half) as f32);
            }
        }
    }

    Ok(SynthData {
        id: EmbeddingMatrix::new(k * per, dim, id)?,
        ood: EmbeddingMatrix::new(spec.ood.count, dim, ood)?,
        id_labels: LabelVector::new(labels)?,
        centers,
    })
}

/// Fresh in-distribution draws from the same centers, independent of
/// [`generate`]'s draws. Returns rows and cluster labels.
pub fn generate_holdout(spec: &MixtureSpec, per_cluster: usize) -> Result<(EmbeddingMatrix, LabelVector)> {
    spec.validate()?;
    if per_cluster == 0 {
        return Err(Error::InvalidArgument("holdout size must be at least 1".into()));
    }
    let centers = centers(spec);
    let mut rows = Vec::with_capacity(spec.cluster_count * per_cluster * spec.dim);
    let mut labels = Vec::with_capacity(spec.cluster_count * per_cluster);
    for j in 0..spec.cluster_count {
        let mut rng = stream(spec.seed, HOLDOUT_STREAM_BASE + j as u64);
        draw_rows(&mut rng, centers.row(j), spec.within_std, per_cluster, &mut rows);
        labels.extend(std::iter::repeat_n(j as u32, per_cluster));
    }
    Ok((
        EmbeddingMatrix::new(spec.cluster_count * per_cluster, spec.dim, rows)?,
        LabelVector::new(labels)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> MixtureSpec {
        MixtureSpec {
            cluster_count: 3,
            dim: 4,
            samples_per_cluster: 50,
            seed: 11,
            ood: OodSpec {
                mode: OodMode::Shifted,
                magnitude: 8.0,
                count: 20,
            },
            ..MixtureSpec::default()
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(&small()).unwrap(), generate(&small()).unwrap());
        let mut other = small();
        other.seed = 12;
        assert_ne!(generate(&small()).unwrap().id, generate(&other).unwrap().id);
    }

    #[test]
    fn zero_spread_rows_are_centers() {
        let spec = MixtureSpec {
            within_std: 0.0,
            ..small()
        };
        let data = generate(&spec).unwrap();
        for (i, row) in data.id.rows().enumerate() {
            let c = data.id_labels.as_slice()[i] as usize;
            let center: Vec<f32> = data.centers.row(c).iter().map(|&v| v as f32).collect();
            assert_eq!(row, center.as_slice());
        }
    }

    #[test]
    fn adding_clusters_keeps_earlier_draws() {
        let a = generate(&small()).unwrap();
        let b = generate(&MixtureSpec {
            cluster_count: 4,
            ..small()
        })
        .unwrap();
        let prefix = 3 * 50 * 4;
        assert_eq!(&a.id.as_slice()[..prefix], &b.id.as_slice()[..prefix]);
    }

    #[test]
    fn labels_and_shapes() {
        let data = generate(&small()).unwrap();
        assert_eq!(data.id.n(), 150);
        assert_eq!(data.ood.n(), 20);
        assert_eq!(data.id_labels.len(), data.id.n());
        let mut distinct = data.id_labels.as_slice().to_vec();
        distinct.dedup();
        assert_eq!(distinct, vec![0, 1, 2]);
    }

    #[test]
    fn cluster_means_near_centers() {
        let spec = MixtureSpec {
            samples_per_cluster: 400,
            ..small()
        };
        let data = generate(&spec).unwrap();
        let bound = 5.0 * spec.within_std / (spec.samples_per_cluster as f64).sqrt();
        for j in 0..spec.cluster_count {
            let rows: Vec<usize> = (j * 400..(j + 1) * 400).collect();
            let mean = data.id.to_matrix().select_rows(&rows).column_means();
            let dist: f64 = mean
                .iter()
                .zip(data.centers.row(j))
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(dist <= bound, "cluster {j}: {dist} > {bound}");
        }
    }

    #[test]
    fn other_modes_and_holdout() {
        for mode in [OodMode::Inflated, OodMode::Uniform] {
            let spec = MixtureSpec {
                ood: OodSpec { mode, ..small().ood },
                ..small()
            };
            let data = generate(&spec).unwrap();
            assert_eq!(data.ood.n(), 20);
        }
        let (h, labels) = generate_holdout(&small(), 5).unwrap();
        assert_eq!(h.n(), 15);
        assert_eq!(labels.len(), 15);
        assert_ne!(&h.as_slice()[..4], &generate(&small()).unwrap().id.as_slice()[..4]);
        assert!("sideways".parse::<OodMode>().is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&MixtureSpec {
            cluster_count: 0,
            ..small()
        })
        .is_err());
        assert!(generate(&MixtureSpec {
            center_scale: 0.0,
            ..small()
        })
        .is_err());
    }
}
