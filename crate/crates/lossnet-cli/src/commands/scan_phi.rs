use std::io::Write;
use std::path::Path;

use lossnet_core::equilibrium::{phi, RhoVector};
use lossnet_core::Error;

use crate::inputs;
use crate::manifest::{write_sidecar, ManifestBuilder};

use super::enumerate::io_err;

pub fn run(
    params_path: &Path,
    axes_spec: &str,
    range_spec: &str,
    resolution: usize,
    fixed_spec: Option<&str>,
    output: &Path,
) -> Result<(), Error> {
    let manifest = ManifestBuilder::new("scan-phi")
        .params_path(params_path)
        .option("axes", axes_spec)
        .option("range", range_spec)
        .option("resolution", resolution)
        .option("fixed", fixed_spec.unwrap_or("-"))
        .output(output);
    let params = inputs::load_params(params_path)?;
    let space = inputs::enumerate(&params)?;
    let kc = params.class_count();

    if resolution < 1 {
        return Err(Error::Precondition("resolution must be >= 1".into()));
    }
    let axes: Vec<usize> = parse_list(axes_spec)?
        .into_iter()
        .map(|v: f64| v as usize)
        .collect();
    let axes: Vec<usize> = if kc == 1 { vec![0] } else { axes };
    if axes.is_empty() || axes.len() > 2 || axes.iter().any(|&a| a >= kc) {
        return Err(Error::Precondition(format!(
            "axes must name one or two class indices below K = {kc}"
        )));
    }
    let range: Vec<f64> = parse_list(range_spec)?;
    if range.len() != 2 * axes.len() {
        return Err(Error::Precondition(format!(
            "range needs {} values (lo,hi per scanned axis)",
            2 * axes.len()
        )));
    }
    if range.iter().any(|&v| v <= 0.0) {
        return Err(Error::Precondition("range must be strictly positive".into()));
    }

    let mut base = vec![1.0f64; kc];
    if let Some(f) = fixed_spec {
        let v = parse_list(f)?;
        if v.len() != kc {
            return Err(Error::DimensionMismatch {
                expected: kc,
                got: v.len(),
            });
        }
        if v.iter().any(|&x| x <= 0.0) {
            return Err(Error::Precondition("fixed loads must be positive".into()));
        }
        base = v;
    } else if kc > 2 {
        return Err(Error::Precondition(
            "models with K > 2 need --fixed to pin the unscanned loads".into(),
        ));
    }

    let grid = |lo: f64, hi: f64, i: usize| {
        if resolution == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (resolution - 1) as f64
        }
    };

    let mut csv = Vec::new();
    if axes.len() == 2 {
        writeln!(csv, "rho{},rho{},phi", axes[0], axes[1]).map_err(io_err)?;
        for i in 0..resolution {
            let a = grid(range[0], range[1], i);
            for j in 0..resolution {
                let b = grid(range[2], range[3], j);
                let mut rho = base.clone();
                rho[axes[0]] = a;
                rho[axes[1]] = b;
                let v = phi(&RhoVector::new(rho)?, &params, &space)?;
                writeln!(csv, "{a},{b},{v}").map_err(io_err)?;
            }
        }
    } else {
        writeln!(csv, "rho{},phi", axes[0]).map_err(io_err)?;
        for i in 0..resolution {
            let a = grid(range[0], range[1], i);
            let mut rho = base.clone();
            rho[axes[0]] = a;
            let v = phi(&RhoVector::new(rho)?, &params, &space)?;
            writeln!(csv, "{a},{v}").map_err(io_err)?;
        }
    }
    std::fs::write(output, csv).map_err(io_err)?;
    write_sidecar(&manifest.finish(), output).map_err(io_err)?;
    println!("wrote {} ({} points per axis)", output.display(), resolution);
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Precondition(format!("list entry {p:?}: {e}")))
        })
        .collect()
}
