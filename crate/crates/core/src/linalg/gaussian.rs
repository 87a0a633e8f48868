use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dense::Matrix;

/// Default multiplier for the covariance ridge `λ = scale · trace(S) / p`.
pub const DEFAULT_RIDGE_SCALE: f64 = 1e-3;

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(m: &Matrix) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                actual: m.cols(),
            });
        }
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut diag = m[(j, j)];
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if !(diag > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    pivot: j,
                    value: diag,
                });
            }
            let ljj = diag.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Self { dim: n, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)` of `L`; zero above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    /// Solves `L y = b` in place by forward substitution.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(l, y)| l * y).sum();
            b[i] = (b[i] - s) / self.lower[i * n + i];
        }
    }

    /// Solves `Lᵀ x = y` in place by back substitution.
    pub fn solve_upper_in_place(&self, y: &mut [f64]) {
        let n = self.dim;
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lower[k * n + i] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
    }

    /// Solves `M x = b` with two triangular solves.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_lower_in_place(&mut x);
        self.solve_upper_in_place(&mut x);
        x
    }

    /// `bᵀ M⁻¹ b`, computed as `‖L⁻¹ b‖²`.
    pub fn inverse_quadratic_form(&self, b: &[f64]) -> f64 {
        let mut y = b.to_vec();
        self.solve_lower_in_place(&mut y);
        y.iter().map(|v| v * v).sum()
    }
}

/// One Gaussian component: centroid, sample covariance and the cached
/// factorization of the ridge-regularized covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianRecord", into = "GaussianRecord")]
pub struct ClusterGaussian {
    centroid: Vec<f64>,
    covariance: Matrix,
    ridge: f64,
    member_count: usize,
    factor: Cholesky,
}

/// Serialized form; the factor is rebuilt on load.
#[derive(Serialize, Deserialize)]
struct GaussianRecord {
    centroid: Vec<f64>,
    covariance: Matrix,
    ridge: f64,
    member_count: usize,
}

impl TryFrom<GaussianRecord> for ClusterGaussian {
    type Error = Error;

    fn try_from(r: GaussianRecord) -> Result<Self> {
        ClusterGaussian::from_parts(r.centroid, r.covariance, r.ridge, r.member_count)
    }
}

impl From<ClusterGaussian> for GaussianRecord {
    fn from(g: ClusterGaussian) -> Self {
        GaussianRecord {
            centroid: g.centroid,
            covariance: g.covariance,
            ridge: g.ridge,
            member_count: g.member_count,
        }
    }
}

impl ClusterGaussian {
    /// Builds a component from an explicit covariance and ridge `λ`,
    /// factoring `covariance + λI`.
    pub fn from_parts(
        centroid: Vec<f64>,
        covariance: Matrix,
        ridge: f64,
        member_count: usize,
    ) -> Result<Self> {
        let p = centroid.len();
        if covariance.rows() != p || covariance.cols() != p {
            return Err(Error::DimMismatch {
                expected: p,
                actual: covariance.rows(),
            });
        }
        if member_count == 0 {
            return Err(Error::InvalidArgument(
                "a Gaussian component needs at least one member".into(),
            ));
        }
        let mut regularized = covariance.clone();
        for i in 0..p {
            regularized[(i, i)] += ridge;
        }
        let factor = Cholesky::factor(&regularized)?;
        Ok(Self {
            centroid,
            covariance,
            ridge,
            member_count,
            factor,
        })
    }

    /// Same covariance and factor, different centroid and member count.
    pub fn recentered(&self, centroid: Vec<f64>, member_count: usize) -> Result<Self> {
        if centroid.len() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                actual: centroid.len(),
            });
        }
        Ok(Self {
            centroid,
            member_count: member_count.max(1),
            ..self.clone()
        })
    }

    pub fn dim(&self) -> usize {
        self.centroid.len()
    }

    pub fn centroid(&self) -> &[f64] {
        &self.centroid
    }

    /// Unregularized sample covariance `S`.
    pub fn covariance(&self) -> &Matrix {
        &self.covariance
    }

    /// The `λ` added to the diagonal before factoring.
    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn member_count(&self) -> usize {
        self.member_count
    }

    pub fn factor(&self) -> &Cholesky {
        &self.factor
    }

    /// `S + λI`.
    pub fn regularized_covariance(&self) -> Matrix {
        let mut m = self.covariance.clone();
        for i in 0..self.dim() {
            m[(i, i)] += self.ridge;
        }
        m
    }
}

/// Fits centroid and unbiased covariance of `rows`, regularized with
/// `λ = ridge_scale · trace(S) / p` (or `ridge_scale` when the trace is zero).
pub fn fit_gaussian(rows: &Matrix, ridge_scale: f64) -> Result<ClusterGaussian> {
    if !(ridge_scale > 0.0 && ridge_scale.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ridge scale must be positive and finite, got {ridge_scale}"
        )));
    }
    let (n, p) = (rows.rows(), rows.cols());
    if n == 0 {
        return Err(Error::TooFewSamples { needed: 1, found: 0 });
    }
    if p == 0 {
        return Err(Error::EmptyMatrix);
    }
    let centroid = rows.column_means();
    let mut covariance = Matrix::zeros(p, p);
    if n >= 2 {
        let mut centered = vec![0.0; p];
        for row in rows.row_iter() {
            for (c, (v, m)) in centered.iter_mut().zip(row.iter().zip(&centroid)) {
                *c = v - m;
            }
            for i in 0..p {
                for j in i..p {
                    covariance[(i, j)] += centered[i] * centered[j];
                }
            }
        }
        let denom = (n - 1) as f64;
        for i in 0..p {
            for j in i..p {
                let v = covariance[(i, j)] / denom;
                covariance[(i, j)] = v;
                covariance[(j, i)] = v;
            }
        }
    }
    let trace: f64 = (0..p).map(|i| covariance[(i, i)]).sum();
    let ridge = if trace > 0.0 {
        ridge_scale * trace / p as f64
    } else {
        ridge_scale
    };
    ClusterGaussian::from_parts(centroid, covariance, ridge, n)
}

/// `sqrt((x−μ)ᵀ (S+λI)⁻¹ (x−μ))` through the cached factorization.
pub fn mahalanobis(x: &[f64], g: &ClusterGaussian) -> Result<f64> {
    if x.len() != g.dim() {
        return Err(Error::DimMismatch {
            expected: g.dim(),
            actual: x.len(),
        });
    }
    let diff: Vec<f64> = x.iter().zip(&g.centroid).map(|(a, b)| a - b).collect();
    Ok(g.factor.inverse_quadratic_form(&diff).sqrt())
}
