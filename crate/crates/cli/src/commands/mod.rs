//! One module per subcommand. Each command writes its outputs, then a
//! manifest describing them, and prints a short summary to standard output.

mod ablate;
mod calibrate;
mod eval;
mod fit;
mod score;
mod synth;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub use ablate::run as ablate;
pub use calibrate::run as calibrate;
pub use eval::run as eval;
pub use fit::run as fit;
pub use score::run as score;
pub use synth::run as synth;

use crate::error::{CliError, CliResult};

/// Creates `path` and hands a buffered writer to `write`.
pub(crate) fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> CliResult<()>) -> CliResult<()> {
    let context = || format!("cannot write {}", path.display());
    let file = File::create(path).map_err(|e| CliError::io(context(), e))?;
    let mut out = BufWriter::new(file);
    write(&mut out)?;
    out.flush().map_err(|e| CliError::io(context(), e))?;
    Ok(())
}

pub(crate) fn write_json(path: &Path, value: &impl serde::Serialize) -> CliResult<()> {
    write_file(path, |out| {
        serde_json::to_writer_pretty(&mut *out, value).map_err(oodg::Error::from)?;
        out.write_all(b"\n").map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
    })
}
