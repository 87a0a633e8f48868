use std::fs;

use oodg::io::{save_embeddings, save_labels};
use oodg::synth::{generate, generate_holdout};
use serde::Serialize;

use crate::args::{load_config, SynthArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Serialize)]
struct Resolved<'a> {
    spec: &'a oodg::synth::MixtureSpec,
    holdout_per_cluster: Option<usize>,
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    let config = load_config(args.config.as_ref())?;
    let (spec, holdout) = args.resolve(&config)?;
    let mut manifest = RunManifest::new("synth", Resolved {
        spec: &spec,
        holdout_per_cluster: holdout,
    })?;
    if let Some(path) = &args.config {
        manifest.input(path)?;
    }
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(format!("cannot create {}", args.out.display()), e))?;

    let data = manifest.timed("generate", || Ok(generate(&spec)?))?;
    let id_path = args.out.join("id.oode");
    let ood_path = args.out.join("ood.oode");
    let labels_path = args.out.join("id_labels.oodl");
    manifest.timed("write", || {
        save_embeddings(&data.id, &id_path)?;
        save_embeddings(&data.ood, &ood_path)?;
        save_labels(&data.id_labels, &labels_path)?;
        Ok(())
    })?;
    for path in [&id_path, &ood_path, &labels_path] {
        manifest.output(path)?;
    }
    if let Some(per_cluster) = holdout {
        let (rows, labels) = generate_holdout(&spec, per_cluster)?;
        let rows_path = args.out.join("holdout.oode");
        let labels_path = args.out.join("holdout_labels.oodl");
        save_embeddings(&rows, &rows_path)?;
        save_labels(&labels, &labels_path)?;
        manifest.output(&rows_path)?;
        manifest.output(&labels_path)?;
    }
    manifest.write(&args.out.join("manifest.json"))?;
    println!(
        "wrote {} ID rows ({} clusters, dim {}) and {} OOD rows to {}",
        data.id.n(),
        spec.cluster_count,
        spec.dim,
        data.ood.n(),
        args.out.display()
    );
    Ok(())
}
