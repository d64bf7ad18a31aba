use std::path::Path;

use lossnet_core::dynamics::{integrate_ode, IntegrateOptions};
use lossnet_core::equilibrium::{find_all_critical_points, nu_rho};
use lossnet_core::Error;

use crate::inputs;
use crate::manifest::{write_sidecar, ManifestBuilder};

use super::enumerate::io_err;

pub fn run(
    params_path: &Path,
    y0_spec: &str,
    t_max: f64,
    step: f64,
    record_every: usize,
    no_g: bool,
    output: &Path,
) -> Result<(), Error> {
    let manifest = ManifestBuilder::new("integrate")
        .params_path(params_path)
        .option("y0", y0_spec)
        .option("t_max", t_max)
        .option("step", step)
        .option("record_every", record_every)
        .option("no_g", no_g)
        .output(output);
    let params = inputs::load_params(params_path)?;
    let space = inputs::enumerate(&params)?;
    let y0 = inputs::parse_y0(y0_spec, &space)?;

    let with_g = !no_g && params.all_transfer_positive();
    let opts = IntegrateOptions {
        step,
        output_every: record_every,
        with_g,
        ..IntegrateOptions::default()
    };
    let traj = integrate_ode(&y0, &params, &space, t_max, &opts)?;

    let mut csv = Vec::new();
    traj.write_csv(&space, &mut csv).map_err(io_err)?;
    std::fs::write(output, csv).map_err(io_err)?;
    write_sidecar(&manifest.finish(), output).map_err(io_err)?;

    println!(
        "final sup|V| = {:e}; converged = {}",
        traj.final_field_sup, traj.converged
    );

    // attribute the terminal point to the nearest equilibrium in sup norm
    if params.all_transfer_positive() {
        let search = find_all_critical_points(&params, 7)?;
        let terminal = traj.last();
        let mut best: Option<(usize, f64)> = None;
        for (i, pt) in search.points.iter().enumerate() {
            let nu = nu_rho(&pt.rho, &space)?;
            let d = terminal.sup_distance(&nu);
            // ties resolve to the lower index deterministically
            let better = match best {
                None => true,
                Some((_, bd)) => d + 1e-9 < bd,
            };
            if better {
                best = Some((i, d));
            }
        }
        if let Some((i, d)) = best {
            let pt = &search.points[i];
            println!(
                "nearest critical point: #{i} ({}) rho = {:?}, sup-distance {:.3e}",
                pt.label,
                pt.rho.as_slice(),
                d
            );
        }
    } else {
        println!("nearest critical point: n/a (model has gamma_k = 0 classes)");
    }
    Ok(())
}
