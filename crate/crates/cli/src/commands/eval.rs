use oodg::io::load_embeddings;
use oodg::metrics::evaluate;
use oodg::pipeline::{score, OodModel};

use super::write_json;
use crate::args::EvalArgs;
use crate::error::CliResult;
use crate::manifest::{manifest_path_for, RunManifest};

pub fn run(args: &EvalArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("eval", serde_json::json!({}))?;
    for path in [&args.model, &args.id, &args.ood] {
        manifest.input(path)?;
    }
    let model = OodModel::load(&args.model)?;
    let id = load_embeddings(&args.id)?;
    let ood = load_embeddings(&args.ood)?;
    let report = manifest.timed("evaluate", || {
        let id_scores = score(&model, &id)?.scores();
        let ood_scores = score(&model, &ood)?.scores();
        Ok(evaluate(&id_scores, &ood_scores, model.threshold)?)
    })?;
    write_json(&args.out, &report)?;
    manifest.output(&args.out)?;
    manifest.write(&manifest_path_for(&args.out, manifest.command))?;
    println!("auroc: {:.6}", report.auroc);
    println!("aupr: {:.6}", report.aupr);
    if let Some(acc) = report.accuracy_at_threshold {
        println!("accuracy: {acc:.6}");
    }
    Ok(())
}
