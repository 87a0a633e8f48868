mod common;

use common::*;
use oodg::contrastive::{info_nce_batch_loss, info_nce_pair_loss, ContrastiveBatch};
use oodg::metrics::{aupr, auroc};
use oodg::Matrix;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn auroc_equals_pair_counting_exactly() {
    let mut rng = rng(1);
    for _ in 0..200 {
        let (n_id, n_ood) = (rng.random_range(1..=500), rng.random_range(1..=500));
        let id = tied_scores(&mut rng, n_id, 0.0);
        let ood = tied_scores(&mut rng, n_ood, 0.7);
        assert_eq!(auroc(&id, &ood).unwrap(), pair_count_auroc(&id, &ood));
    }
}

#[test]
fn aupr_matches_curve_walk() {
    let mut rng = rng(2);
    for _ in 0..200 {
        let (n_id, n_ood) = (rng.random_range(1..=500), rng.random_range(1..=500));
        let id = tied_scores(&mut rng, n_id, 0.0);
        let ood = tied_scores(&mut rng, n_ood, 0.7);
        let got = aupr(&id, &ood).unwrap();
        let oracle = curve_walk_ap(&id, &ood);
        assert!((got - oracle).abs() <= 1e-12, "{got} vs {oracle}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn auroc_swapping_classes_reflects(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let id = tied_scores(&mut rng, 40, 0.0);
        let ood = tied_scores(&mut rng, 30, 0.5);
        let forward = auroc(&id, &ood).unwrap();
        let backward = auroc(&ood, &id).unwrap();
        prop_assert!((forward + backward - 1.0).abs() < 1e-12);
    }

    #[test]
    fn metrics_ignore_monotone_transforms(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let id = tied_scores(&mut rng, 50, 0.0);
        let ood = tied_scores(&mut rng, 50, 0.5);
        let f = |v: &[f64]| -> Vec<f64> { v.iter().map(|s| (0.5 * s).exp() * 3.0 + 1.0).collect() };
        prop_assert_eq!(auroc(&id, &ood).unwrap(), auroc(&f(&id), &f(&ood)).unwrap());
        prop_assert!((aupr(&id, &ood).unwrap() - aupr(&f(&id), &f(&ood)).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn perfect_and_reversed_separation() {
    let id = [0.1, 0.2, 0.3];
    let ood = [1.0, 2.0];
    assert_eq!(auroc(&id, &ood).unwrap(), 1.0);
    assert_eq!(aupr(&id, &ood).unwrap(), 1.0);
    assert_eq!(auroc(&ood, &id).unwrap(), 0.0);
}

#[test]
fn all_equal_scores() {
    let s = [0.5; 4];
    assert_eq!(auroc(&s, &s).unwrap(), 0.5);
    assert_eq!(aupr(&s, &s).unwrap(), 0.5);
}

fn random_batch(seed: u64, n: usize, d: usize, tau: f64) -> (Dense, ContrastiveBatch) {
    let mut rng = rng(seed);
    let rows = random_dense(&mut rng, 2 * n, d);
    let batch = ContrastiveBatch::new(Matrix::from_rows(&rows).unwrap(), tau).unwrap();
    (rows, batch)
}

#[test]
fn pair_loss_matches_naive_summation() {
    for seed in 0..100 {
        let n = 1 + (seed as usize % 8);
        let tau = 0.05 + 0.1 * (seed % 10) as f64;
        let (rows, batch) = random_batch(seed, n, 6, tau);
        for t in 0..n {
            for (i, j) in [(2 * t, 2 * t + 1), (2 * t + 1, 2 * t)] {
                let got = info_nce_pair_loss(&batch, i, j).unwrap();
                let oracle = naive_info_nce(&rows, tau, i, j);
                assert!(
                    (got - oracle).abs() <= 1e-9 * oracle.abs().max(1.0),
                    "seed {seed} ({i},{j}): {got} vs {oracle}"
                );
            }
        }
    }
}

#[test]
fn batch_loss_is_mean_of_ordered_pairs() {
    let (rows, batch) = random_batch(9, 5, 4, 0.3);
    let oracle: f64 = (0..5)
        .flat_map(|t| [(2 * t, 2 * t + 1), (2 * t + 1, 2 * t)])
        .map(|(i, j)| naive_info_nce(&rows, 0.3, i, j))
        .sum::<f64>()
        / 10.0;
    assert!((info_nce_batch_loss(&batch) - oracle).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn loss_is_invariant_to_scale_and_rotation(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let (rows, batch) = random_batch(seed, 4, 5, 0.2);
        let base = info_nce_batch_loss(&batch);
        let scaled: Dense = rows.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
        let scaled = ContrastiveBatch::new(Matrix::from_rows(&scaled).unwrap(), 0.2).unwrap();
        prop_assert!((info_nce_batch_loss(&scaled) - base).abs() <= 1e-9);
        let mut r = rng(seed ^ 1);
        let (_, q) = jacobi_eigen(&random_spd(&mut r, 5));
        let rotated: Dense = rows
            .iter()
            .map(|row| q.iter().map(|qr| qr.iter().zip(row).map(|(a, b)| a * b).sum()).collect())
            .collect();
        let rotated = ContrastiveBatch::new(Matrix::from_rows(&rotated).unwrap(), 0.2).unwrap();
        prop_assert!((info_nce_batch_loss(&rotated) - base).abs() <= 1e-9);
    }
}

#[test]
fn loss_falls_as_positive_similarity_rises() {
    // anchor e0, negatives fixed on e2/e3, positive rotating toward e0 in
    // the e0–e1 plane; anchor-negative similarities stay fixed
    let mut previous = f64::INFINITY;
    for step in 0..=10 {
        let angle = std::f64::consts::FRAC_PI_2 * (1.0 - step as f64 / 10.0);
        let rows = [
            [1.0, 0.0, 0.0, 0.0],
            [angle.cos(), angle.sin(), 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let batch = ContrastiveBatch::new(Matrix::from_rows(&rows).unwrap(), 0.5).unwrap();
        let loss = info_nce_pair_loss(&batch, 0, 1).unwrap();
        assert!(loss < previous);
        previous = loss;
    }
}

#[test]
fn extreme_logits_stay_finite() {
    let rows = [[1.0, 0.0], [1.0, 1e-9], [-1.0, 0.0], [0.0, 1.0]];
    let batch = ContrastiveBatch::new(Matrix::from_rows(&rows).unwrap(), 1.0 / 700.0).unwrap();
    let loss = info_nce_batch_loss(&batch);
    assert!(loss.is_finite() && loss >= 0.0);
}
