//! Runs the synthetic detection benchmark and prints the headline numbers.
//!
//! `cargo run --release -p oodg-core --example synthetic_benchmark [within_std [holdout_per_cluster [seed]]]`

use std::time::Instant;

use oodg::experiment::{
    clusterer_comparison, k_sweep, overlapping_raw_spec, raw_knn_sweep, run_detection, threshold_sweep, Split,
    DEFAULT_HOLDOUT_PER_CLUSTER, SWEEP_PERCENTILES,
};
use oodg::pipeline::FitConfig;
use oodg::synth::MixtureSpec;

fn main() -> oodg::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut spec = MixtureSpec::default();
    if let Some(&s) = args.first() {
        spec.within_std = s;
    }
    let holdout = args.get(1).map_or(DEFAULT_HOLDOUT_PER_CLUSTER, |&h| h as usize);
    if let Some(&seed) = args.get(2) {
        spec.seed = seed as u64;
    }
    let start = Instant::now();
    let split = Split::synthetic(&spec, holdout)?;
    let config = FitConfig::default();

    let outcome = run_detection(&split, &config, 95.0)?;
    println!(
        "clusters={} edges={} modularity={:?} auroc={:.5} aupr={:.5} acc@95={:.4} ({:.2}s)",
        outcome.cluster_count,
        outcome.edge_count,
        outcome.modularity,
        outcome.report.auroc,
        outcome.report.aupr,
        outcome.report.accuracy_at_threshold.unwrap_or(f64::NAN),
        outcome.elapsed.as_secs_f64()
    );
    for row in threshold_sweep(&split, &config, &SWEEP_PERCENTILES)? {
        println!("  percentile {:>4}: accuracy={:.4}", row.percentile, row.accuracy);
    }
    for row in k_sweep(&split, &config, &[5, 7, 11])? {
        println!("  k={:<2} clusters={} auroc={:.6}", row.k, row.cluster_count, row.auroc);
    }
    let cmp = clusterer_comparison(&split, &config)?;
    println!("  louvain={:.6} kmeans={:.6}", cmp.louvain_auroc, cmp.kmeans_auroc);

    let raw = Split::synthetic(&overlapping_raw_spec(), holdout)?;
    for row in raw_knn_sweep(&raw, &[1, 5, 10, 15])? {
        println!("  raw-knn k={:<2} auroc={:.4}", row.k, row.auroc);
    }
    println!("elapsed {:.2}s", start.elapsed().as_secs_f64());
    Ok(())
}
