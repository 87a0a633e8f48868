#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use oodg::linalg::{fit_gaussian, fit_pca, mahalanobis, pca_transform, ClusterGaussian, PcaTarget};
use oodg::Matrix;
use proptest::prelude::*;

fn to_matrix(d: &Dense) -> Matrix {
    Matrix::from_rows(d).unwrap()
}

fn gaussian_from(cov: &Dense, mu: Vec<f64>) -> ClusterGaussian {
    ClusterGaussian::from_parts(mu, to_matrix(cov), 0.0, 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mahalanobis_matches_explicit_inverse(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = rng(seed);
        let cov = random_spd(&mut rng, n);
        let mu: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        let x: Vec<f64> = (0..n).map(|_| 3.0 * normal(&mut rng)).collect();
        let g = gaussian_from(&cov, mu.clone());
        let d = mahalanobis(&x, &g).unwrap();
        let oracle = explicit_quadratic_form(&cov, &x, &mu).sqrt();
        prop_assert!(relative_error(d, oracle) <= 1e-6, "{d} vs {oracle}");
    }

    #[test]
    fn mahalanobis_is_rotation_invariant(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = rng(seed);
        let cov = random_spd(&mut rng, n);
        let mu: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        let x: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        // orthogonal Q from the eigenvectors of another SPD matrix
        let (_, q) = jacobi_eigen(&random_spd(&mut rng, n));
        let qt = transpose(&q);
        let rotate = |v: &[f64]| -> Vec<f64> { q.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect() };
        let rotated_cov = mat_mul(&mat_mul(&q, &cov), &qt);
        let before = mahalanobis(&x, &gaussian_from(&cov, mu.clone())).unwrap();
        let after = mahalanobis(&rotate(&x), &gaussian_from(&rotated_cov, rotate(&mu))).unwrap();
        prop_assert!(relative_error(before, after) <= 1e-8);
    }

    #[test]
    fn mahalanobis_is_zero_only_at_the_centroid(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = rng(seed);
        let cov = random_spd(&mut rng, n);
        let mu: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        let g = gaussian_from(&cov, mu.clone());
        prop_assert_eq!(mahalanobis(&mu, &g).unwrap(), 0.0);
        let mut off = mu.clone();
        off[0] += 1e-3;
        prop_assert!(mahalanobis(&off, &g).unwrap() > 0.0);
    }
}

#[test]
fn fit_gaussian_recovers_covariance() {
    let mut rng = rng(11);
    // x = A z with A Aᵀ = [[2, .5], [.5, 1]]
    let l11 = 2f64.sqrt();
    let l21 = 0.5 / l11;
    let l22 = (1.0 - l21 * l21).sqrt();
    let rows: Vec<[f64; 2]> = (0..500)
        .map(|_| {
            let (z1, z2) = (normal(&mut rng), normal(&mut rng));
            [1.0 + l11 * z1, -2.0 + l21 * z1 + l22 * z2]
        })
        .collect();
    let g = fit_gaussian(&Matrix::from_rows(&rows).unwrap(), 1e-3).unwrap();
    let expected = [[2.0, 0.5], [0.5, 1.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((g.covariance()[(i, j)] - expected[i][j]).abs() < 0.2);
        }
    }
    assert!((g.centroid()[0] - 1.0).abs() < 0.2 && (g.centroid()[1] + 2.0).abs() < 0.2);
    let dense: Dense = rows.iter().map(|r| r.to_vec()).collect();
    let oracle = sample_covariance(&dense);
    for i in 0..2 {
        for j in 0..2 {
            assert!((g.covariance()[(i, j)] - oracle[i][j]).abs() < 1e-12);
        }
    }
}

#[test]
fn ridge_is_scaled_by_mean_variance() {
    let mut rng = rng(5);
    let rows = random_dense(&mut rng, 50, 4);
    let g = fit_gaussian(&to_matrix(&rows), 1e-3).unwrap();
    let cov = sample_covariance(&rows);
    let trace: f64 = (0..4).map(|i| cov[i][i]).sum();
    assert!(relative_error(g.ridge(), 1e-3 * trace / 4.0) < 1e-12);
}

/// Low-rank data: three latent factors embedded in ten dimensions plus a
/// whisper of noise.
fn three_factor_data(seed: u64, n: usize) -> Dense {
    let mut rng = rng(seed);
    let loadings = random_dense(&mut rng, 3, 10);
    (0..n)
        .map(|_| {
            let f = [3.0 * normal(&mut rng), 2.0 * normal(&mut rng), normal(&mut rng)];
            (0..10)
                .map(|j| (0..3).map(|t| f[t] * loadings[t][j]).sum::<f64>() + 1e-3 * normal(&mut rng))
                .collect()
        })
        .collect()
}

#[test]
fn pca_eigenvalues_match_jacobi_oracle() {
    for seed in 0..10 {
        let mut rng = rng(seed);
        let n = 30 + (seed as usize) * 7;
        let d = 3 + (seed as usize) % 10;
        let x = random_dense(&mut rng, n, d);
        let p = d.min(n - 1);
        let model = fit_pca(&to_matrix(&x), PcaTarget::Components(p)).unwrap();
        let (values, vectors) = jacobi_eigen(&sample_covariance(&x));
        for i in 0..p {
            assert!(
                relative_error(model.explained_variance[i], values[i]) <= 1e-6,
                "seed {seed} axis {i}: {} vs {}",
                model.explained_variance[i],
                values[i]
            );
            // same axis up to sign
            let dot: f64 = (0..d).map(|j| model.components[(i, j)] * vectors[j][i]).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-6, "seed {seed} axis {i}: |dot| = {}", dot.abs());
        }
        let trace: f64 = values.iter().sum();
        assert!(relative_error(model.total_variance, trace) < 1e-9);
    }
}

#[test]
fn pca_components_are_orthonormal() {
    for seed in 0..10 {
        let mut rng = rng(100 + seed);
        let x = random_dense(&mut rng, 60, 12);
        let model = fit_pca(&to_matrix(&x), PcaTarget::Components(12)).unwrap();
        let c = &model.components;
        for a in 0..c.rows() {
            for b in 0..c.rows() {
                let dot: f64 = (0..c.cols()).map(|j| c[(a, j)] * c[(b, j)]).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn explained_variance_equals_coordinate_variance() {
    let x = three_factor_data(3, 200);
    let model = fit_pca(&to_matrix(&x), PcaTarget::Components(5)).unwrap();
    let z = pca_transform(&model, &to_matrix(&x)).unwrap();
    let rows: Dense = z.row_iter().map(|r| r.to_vec()).collect();
    let cov = sample_covariance(&rows);
    for i in 0..5 {
        assert!(relative_error(cov[i][i], model.explained_variance[i]) < 1e-8);
        for j in 0..5 {
            if i != j {
                assert!(cov[i][j].abs() < 1e-8 * model.explained_variance[0]);
            }
        }
    }
}

#[test]
fn reconstruction_error_is_non_increasing_in_p() {
    let mut rng = rng(21);
    let x = to_matrix(&random_dense(&mut rng, 80, 10));
    let mut previous = f64::INFINITY;
    for p in 1..=10 {
        let model = fit_pca(&x, PcaTarget::Components(p)).unwrap();
        let z = pca_transform(&model, &x).unwrap();
        let back = model.inverse_transform(&z).unwrap();
        let err: f64 = x.as_slice().iter().zip(back.as_slice()).map(|(a, b)| (a - b).powi(2)).sum();
        assert!(err <= previous * (1.0 + 1e-12) + 1e-12, "p={p}: {err} > {previous}");
        previous = err;
    }
    assert!(previous < 1e-16 * 80.0 * 10.0 * 100.0);
}

#[test]
fn variance_target_finds_the_latent_rank() {
    let x = three_factor_data(9, 300);
    let target = PcaTarget::VarianceFraction {
        fraction: 0.999,
        max_components: None,
    };
    let model = fit_pca(&to_matrix(&x), target).unwrap();
    assert_eq!(model.output_dim(), 3);
    let (values, _) = jacobi_eigen(&sample_covariance(&x));
    for i in 0..3 {
        assert!(relative_error(model.explained_variance[i], values[i]) <= 1e-6);
    }
}

#[test]
fn sign_convention_makes_largest_entry_positive() {
    let mut rng = rng(4);
    let x = to_matrix(&random_dense(&mut rng, 40, 6));
    let model = fit_pca(&x, PcaTarget::Components(6)).unwrap();
    for axis in model.components.row_iter() {
        let largest = axis.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
        assert!(largest > 0.0);
    }
}
