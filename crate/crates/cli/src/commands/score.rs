use oodg::io::load_embeddings;
use oodg::pipeline::{score, OodModel};

use super::write_file;
use crate::args::ScoreArgs;
use crate::error::CliResult;
use crate::manifest::{manifest_path_for, RunManifest};

pub fn run(args: &ScoreArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("score", serde_json::json!({}))?;
    manifest.input(&args.model)?;
    manifest.input(&args.input)?;
    let model = OodModel::load(&args.model)?;
    let x = load_embeddings(&args.input)?;
    let report = manifest.timed("score", || Ok(score(&model, &x)?))?;
    write_file(&args.out, |out| Ok(report.write_csv(out)?))?;
    manifest.output(&args.out)?;
    manifest.write(&manifest_path_for(&args.out, manifest.command))?;
    let flagged = report.samples.iter().filter(|s| s.is_ood == Some(true)).count();
    match model.threshold {
        Some(t) => println!("scored {} rows; {flagged} above threshold {t}", report.len()),
        None => println!("scored {} rows (model not calibrated)", report.len()),
    }
    Ok(())
}
