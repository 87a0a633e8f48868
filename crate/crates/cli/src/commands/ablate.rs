use std::io::Write;

use oodg::experiment::{
    clusterer_comparison, k_sweep, raw_knn_sweep, run_detection, threshold_sweep, Split, SWEEP_PERCENTILES,
};
use oodg::io::load_embeddings;
use oodg::pipeline::DEFAULT_PERCENTILE;
use serde::Serialize;

use super::write_file;
use crate::args::{as_counts, load_config, parse_values, AblateArgs, Sweep};
use crate::error::{CliError, CliResult};
use crate::manifest::{manifest_path_for, RunManifest};

#[derive(Serialize)]
struct Resolved<'a> {
    sweep: &'static str,
    values: &'a [f64],
    percentile: f64,
    fit: &'a oodg::FitConfig,
}

fn default_values(sweep: Sweep) -> Vec<f64> {
    match sweep {
        Sweep::K => vec![5.0, 7.0, 11.0],
        Sweep::Threshold => SWEEP_PERCENTILES.to_vec(),
        Sweep::RawKnn => (5..=15).map(f64::from).collect(),
        Sweep::Clusterer => Vec::new(),
    }
}

fn sweep_name(sweep: Sweep) -> &'static str {
    match sweep {
        Sweep::K => "k",
        Sweep::Threshold => "threshold",
        Sweep::Clusterer => "clusterer",
        Sweep::RawKnn => "raw-knn",
    }
}

pub fn run(args: &AblateArgs) -> CliResult<()> {
    let config = load_config(args.config.as_ref())?;
    let fit = args.fit.resolve(&config)?;
    let values = match &args.values {
        Some(text) => parse_values(text)?,
        None => default_values(args.sweep),
    };
    let percentile = args.percentile.or(config.percentile).unwrap_or(DEFAULT_PERCENTILE);
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(CliError::usage(format!("--percentile must be in (0, 100], got {percentile}")));
    }
    if args.sweep == Sweep::Threshold {
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0 && **v <= 100.0)) {
            return Err(CliError::usage(format!("percentile {bad} is outside (0, 100]")));
        }
    }
    let mut manifest = RunManifest::new("ablate", Resolved {
        sweep: sweep_name(args.sweep),
        values: &values,
        percentile,
        fit: &fit,
    })?;
    manifest.input(&args.id)?;
    manifest.input(&args.ood)?;
    let train = load_embeddings(&args.id)?;
    let eval_id = match &args.eval_id {
        Some(path) => {
            manifest.input(path)?;
            load_embeddings(path)?
        }
        None => {
            eprintln!("note: evaluating on the training ID rows; pass --eval-id for a held-out set");
            train.clone()
        }
    };
    let split = Split {
        train,
        eval_id,
        ood: load_embeddings(&args.ood)?,
    };

    let mut table = String::new();
    let start = std::time::Instant::now();
    match args.sweep {
        Sweep::K => {
            let rows = k_sweep(&split, &fit, &as_counts(&values)?)?;
            table.push_str("k,cluster_count,auroc\n");
            for r in &rows {
                table.push_str(&format!("{},{},{}\n", r.k, r.cluster_count, r.auroc));
            }
            let aurocs = rows.iter().map(|r| r.auroc);
            let spread = aurocs.clone().fold(f64::NEG_INFINITY, f64::max) - aurocs.fold(f64::INFINITY, f64::min);
            println!("auroc spread: {spread:.6e}");
        }
        Sweep::Threshold => {
            let rows = threshold_sweep(&split, &fit, &values)?;
            table.push_str("percentile,threshold,accuracy\n");
            for r in &rows {
                table.push_str(&format!("{},{},{}\n", r.percentile, r.threshold, r.accuracy));
            }
            let best = rows.iter().max_by(|a, b| a.accuracy.total_cmp(&b.accuracy)).expect("non-empty sweep");
            println!("best accuracy {:.4} at percentile {}", best.accuracy, best.percentile);
        }
        Sweep::Clusterer => {
            let cmp = clusterer_comparison(&split, &fit)?;
            table.push_str("clusterer,cluster_count,auroc\n");
            table.push_str(&format!("louvain,{},{}\n", cmp.cluster_count, cmp.louvain_auroc));
            table.push_str(&format!("kmeans,{},{}\n", cmp.cluster_count, cmp.kmeans_auroc));
            println!("auroc delta: {:.6e}", cmp.delta());
        }
        Sweep::RawKnn => {
            let rows = raw_knn_sweep(&split, &as_counts(&values)?)?;
            let pipeline = run_detection(&split, &fit, percentile)?.report.auroc;
            table.push_str("k,raw_auroc,pipeline_auroc\n");
            for r in &rows {
                table.push_str(&format!("{},{},{}\n", r.k, r.auroc, pipeline));
            }
            let best = rows.iter().map(|r| r.auroc).fold(f64::NEG_INFINITY, f64::max);
            println!("raw-knn max auroc {best:.4}; pipeline auroc {pipeline:.4}");
        }
    }
    manifest.time("sweep", start.elapsed().as_secs_f64());
    write_file(&args.out, |out| {
        out.write_all(table.as_bytes())
            .map_err(|e| CliError::io(format!("cannot write {}", args.out.display()), e))
    })?;
    manifest.output(&args.out)?;
    manifest.write(&manifest_path_for(&args.out, manifest.command))?;
    Ok(())
}
