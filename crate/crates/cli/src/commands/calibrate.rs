use oodg::io::load_embeddings;
use oodg::pipeline::{calibrate_threshold_from, OodModel, DEFAULT_PERCENTILE};
use serde::Serialize;

use crate::args::{load_config, CalibrateArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{manifest_path_for, RunManifest};

#[derive(Serialize)]
struct Resolved {
    percentile: f64,
    source: oodg::pipeline::CalibrationSource,
}

pub fn run(args: &CalibrateArgs) -> CliResult<()> {
    let config = load_config(args.config.as_ref())?;
    let percentile = args.percentile.or(config.percentile).unwrap_or(DEFAULT_PERCENTILE);
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(CliError::usage(format!("--percentile must be in (0, 100], got {percentile}")));
    }
    let resolved = Resolved {
        percentile,
        source: args.source.into(),
    };
    let mut manifest = RunManifest::new("calibrate", &resolved)?;
    manifest.input(&args.model)?;
    manifest.input(&args.holdout)?;

    let model = OodModel::load(&args.model)?;
    let holdout = load_embeddings(&args.holdout)?;
    let calibrated = manifest.timed("calibrate", || {
        Ok(calibrate_threshold_from(&model, &holdout, percentile, resolved.source)?)
    })?;
    calibrated.save(&args.out)?;
    manifest.output(&args.out)?;
    manifest.write(&manifest_path_for(&args.out, manifest.command))?;
    println!(
        "threshold: {} (percentile {percentile} of {} rows)",
        calibrated.threshold.expect("calibration sets a threshold"),
        holdout.n()
    );
    Ok(())
}
