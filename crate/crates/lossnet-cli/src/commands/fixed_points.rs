use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use lossnet_core::equilibrium::{
    find_all_critical_points_with_tol, fixed_point_residual, picard_solve, CriticalPoint,
    PicardOptions, RhoVector, StabilityLabel,
};
use lossnet_core::scalar::sup_norm;
use lossnet_core::{Error, NetworkParams64};

use crate::inputs;
use crate::manifest::{write_sidecar, ManifestBuilder, RunManifest};

use super::enumerate::io_err;

pub fn run(
    params_path: &Path,
    grid: usize,
    tol: f64,
    picard_only: bool,
    output: &Path,
) -> Result<(), Error> {
    let manifest = ManifestBuilder::new("fixed-points")
        .params_path(params_path)
        .option("grid", grid)
        .option("tol", tol)
        .option("picard_only", picard_only);
    let params = inputs::load_params(params_path)?;

    if picard_only {
        return run_picard_only(&params, grid, tol, output, manifest);
    }
    if !params.all_transfer_positive() {
        return Err(Error::UnsupportedModel(
            "some gamma_k = 0: the energy function cannot classify this model; \
             rerun with --picard-only for an unclassified listing"
                .into(),
        ));
    }

    let search = find_all_critical_points_with_tol(&params, grid, tol)?;
    if search.points.is_empty() {
        return Err(Error::NonConvergence {
            iterations: 0,
            last: vec![],
            gap: f64::NAN,
        });
    }
    for failure in &search.failures {
        eprintln!(
            "note: start {:?} failed: {}",
            failure.start, failure.error
        );
    }

    let json_path = output.with_extension("json");
    let csv_path = output.with_extension("csv");
    let manifest = manifest.output(&json_path).output(&csv_path).finish();
    write_points_json(&search.points, search.failures.len(), &manifest, &json_path)?;
    write_points_csv(&search.points, &csv_path)?;
    write_sidecar(&manifest, &csv_path).map_err(io_err)?;

    let minima = count(&search.points, StabilityLabel::Minimum);
    let saddles = count(&search.points, StabilityLabel::Saddle);
    let degenerate = count(&search.points, StabilityLabel::Degenerate);
    println!(
        "{} points: {} minima, {} saddles, {} degenerate",
        search.points.len(),
        minima,
        saddles,
        degenerate
    );
    Ok(())
}

fn count(points: &[CriticalPoint<f64>], label: StabilityLabel) -> usize {
    points.iter().filter(|p| p.label == label).count()
}

fn write_points_json(
    points: &[CriticalPoint<f64>],
    failed_starts: usize,
    manifest: &RunManifest,
    path: &PathBuf,
) -> Result<(), Error> {
    let body = json!({
        "points": points.iter().map(|p| json!({
            "rho": p.rho.as_slice(),
            "phi": p.phi_value,
            "grad_norm": p.grad_norm,
            "eigenvalues": p.hessian_eigenvalues,
            "label": p.label.to_string(),
        })).collect::<Vec<_>>(),
        "failed_starts": failed_starts,
        "manifest": serde_json::to_value(manifest).expect("manifest"),
    });
    std::fs::write(path, serde_json::to_string_pretty(&body).expect("json")).map_err(io_err)
}

fn write_points_csv(points: &[CriticalPoint<f64>], path: &PathBuf) -> Result<(), Error> {
    let k = points.first().map(|p| p.rho.len()).unwrap_or(0);
    let mut csv = Vec::new();
    for i in 0..k {
        write!(csv, "rho{i},").map_err(io_err)?;
    }
    write!(csv, "phi,grad_norm,").map_err(io_err)?;
    for i in 0..k {
        write!(csv, "eig{i},").map_err(io_err)?;
    }
    writeln!(csv, "label").map_err(io_err)?;
    for p in points {
        for v in p.rho.as_slice() {
            write!(csv, "{v},").map_err(io_err)?;
        }
        write!(csv, "{},{},", p.phi_value, p.grad_norm).map_err(io_err)?;
        for e in &p.hessian_eigenvalues {
            write!(csv, "{e},").map_err(io_err)?;
        }
        writeln!(csv, "{}", p.label).map_err(io_err)?;
    }
    std::fs::write(path, csv).map_err(io_err)
}

/// Unclassified listing for models with gamma_k = 0: multistart Picard only.
fn run_picard_only(
    params: &NetworkParams64,
    grid: usize,
    tol: f64,
    output: &Path,
    manifest: ManifestBuilder,
) -> Result<(), Error> {
    let kc = params.class_count();
    let rho_max: Vec<f64> = (0..kc)
        .map(|k| {
            (params.arrival_rate(k)
                + params.transfer_rate(k) * params.capacity() as f64
                    / params.requirement(k) as f64)
                / (params.service_rate(k) + params.transfer_rate(k))
        })
        .collect();
    let opts = PicardOptions {
        tol,
        max_iter: 200_000,
        ..PicardOptions::default()
    };
    let mut found: Vec<RhoVector<f64>> = Vec::new();
    let mut idx = vec![0usize; kc];
    loop {
        let start: Vec<f64> = (0..kc)
            .map(|k| {
                let lo = 1e-4 * rho_max[k];
                if grid == 1 {
                    lo
                } else {
                    let t = idx[k] as f64 / (grid - 1) as f64;
                    (lo.ln() + t * (rho_max[k].ln() - lo.ln())).exp()
                }
            })
            .collect();
        if let Ok(sol) = picard_solve(params, &RhoVector::new(start)?, &opts) {
            let dup = found.iter().any(|p| {
                p.sup_distance(&sol)
                    <= 1e-6
                        * (1.0 + sup_norm(p.as_slice()).max(sup_norm(sol.as_slice())))
            });
            if !dup {
                found.push(sol);
            }
        }
        let mut pos = 0;
        while pos < kc {
            idx[pos] += 1;
            if idx[pos] < grid {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == kc {
            break;
        }
    }
    if found.is_empty() {
        return Err(Error::NonConvergence {
            iterations: 0,
            last: vec![],
            gap: f64::NAN,
        });
    }
    let csv_path = output.with_extension("csv");
    let manifest = manifest.output(&csv_path).finish();
    let mut csv = Vec::new();
    for i in 0..kc {
        write!(csv, "rho{i},").map_err(io_err)?;
    }
    writeln!(csv, "residual_sup").map_err(io_err)?;
    for p in &found {
        for v in p.as_slice() {
            write!(csv, "{v},").map_err(io_err)?;
        }
        let r = fixed_point_residual(p, params)?;
        writeln!(csv, "{}", sup_norm(&r)).map_err(io_err)?;
    }
    std::fs::write(&csv_path, csv).map_err(io_err)?;
    write_sidecar(&manifest, &csv_path).map_err(io_err)?;
    println!("{} points (picard-only, unclassified)", found.len());
    Ok(())
}
