use std::io::Write;
use std::path::Path;

use lossnet_core::Error;

use crate::inputs;
use crate::manifest::{write_sidecar, ManifestBuilder};

pub fn run(params_path: &Path, output: &Path) -> Result<(), Error> {
    let manifest = ManifestBuilder::new("enumerate")
        .params_path(params_path)
        .output(output);
    let params = inputs::load_params(params_path)?;
    let space = inputs::enumerate(&params)?;

    let mut csv = Vec::new();
    write!(csv, "index").map_err(io_err)?;
    for k in 0..params.class_count() {
        write!(csv, ",n{k}").map_err(io_err)?;
    }
    writeln!(csv).map_err(io_err)?;
    for (i, s) in space.states().iter().enumerate() {
        write!(csv, "{i}").map_err(io_err)?;
        for k in 0..params.class_count() {
            write!(csv, ",{}", s.count(k)).map_err(io_err)?;
        }
        writeln!(csv).map_err(io_err)?;
    }
    std::fs::write(output, csv).map_err(io_err)?;
    write_sidecar(&manifest.finish(), output).map_err(io_err)?;
    println!("{}", space.size());
    Ok(())
}

pub(crate) fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}
