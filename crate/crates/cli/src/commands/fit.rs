use oodg::io::{load_embeddings, save_labels};
use oodg::pipeline::fit_detailed;

use super::write_file;
use crate::args::{load_config, FitArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{manifest_path_for, RunManifest};

pub fn run(args: &FitArgs) -> CliResult<()> {
    let config = load_config(args.config.as_ref())?;
    let fit_config = args.fit.resolve(&config)?;
    let mut manifest = RunManifest::new("fit", &fit_config)?;
    manifest.input(&args.id)?;
    if let Some(path) = &args.config {
        manifest.input(path)?;
    }

    let x = manifest.timed("load", || Ok(load_embeddings(&args.id)?))?;
    let report = fit_detailed(&x, &fit_config)?;
    let t = &report.timings;
    for (stage, seconds) in [("pca", t.pca), ("graph", t.graph), ("clustering", t.clustering), ("gaussians", t.gaussians)] {
        manifest.time(stage, seconds);
    }
    report.model.save(&args.out)?;
    manifest.output(&args.out)?;

    if let Some(path) = &args.edges {
        let graph = report
            .graph
            .as_ref()
            .ok_or_else(|| CliError::usage("no KNN graph was built (degenerate data); cannot write --edges"))?;
        write_file(path, |out| Ok(graph.write_edge_list(out)?))?;
        manifest.output(path)?;
    }
    if let Some(path) = &args.partition {
        save_labels(&report.partition.to_labels()?, path)?;
        manifest.output(path)?;
    }
    manifest.write(&manifest_path_for(&args.out, manifest.command))?;

    let meta = &report.model.fit_metadata;
    println!("cluster_count: {}", meta.cluster_count);
    println!("edge_count: {}", meta.edge_count);
    match meta.modularity {
        Some(q) => println!("modularity: {q:.6}"),
        None => println!("modularity: n/a"),
    }
    println!("isolated_count: {}", meta.isolated_count);
    println!("reduced_dim: {}", meta.reduced_dim);
    Ok(())
}
