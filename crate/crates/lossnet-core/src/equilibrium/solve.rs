//! Fixed-point solvers: damped Picard iteration on the load map, damped
//! Newton refinement on ∇φ, and the deduplicating multistart sweep.

use crate::error::{Error, Result};
use crate::linalg::solve_linear;
use crate::model::NetworkParams;
use crate::scalar::{real, sup_norm, Real};

use super::energy::{grad_phi, hessian_phi, label_from_eigenvalues, phi_via_recursion};
use super::product_form::CapacityProfile;
use super::{CriticalPoint, RhoVector};

/// Knobs of the damped Picard iteration. The damping keeps the iteration
/// from oscillating near saddle basins.
#[derive(Debug, Clone)]
pub struct PicardOptions<T> {
    pub damping: T,
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for PicardOptions<T> {
    fn default() -> Self {
        Self {
            damping: real(0.5),
            tol: real(1e-12),
            max_iter: 100_000,
        }
    }
}

/// Residual of the fixed-point system, component k:
/// λ_k − ρ_k(μ_k + γ_k B_k(ρ)).
pub fn fixed_point_residual<T: Real>(
    rho: &RhoVector<T>,
    params: &NetworkParams<T>,
) -> Result<Vec<T>> {
    let prof = CapacityProfile::from_params(rho, params)?;
    Ok((0..params.class_count())
        .map(|k| {
            params.arrival_rate(k)
                - rho.get(k)
                    * (params.service_rate(k) + params.transfer_rate(k) * prof.blocking(k))
        })
        .collect())
}

/// Damped iteration of the load map
/// ρ_k ← (1−θ)ρ_k + θ(λ_k + γ_kρ_k(1−B_k(ρ)))/(μ_k+γ_k).
///
/// Convergence is tested on the *undamped* gap |ρ' − ρ|, which equals the
/// residual divided by (μ_k+γ_k), so the returned point always satisfies
/// |residual| < tol·max_k(μ_k+γ_k).
pub fn picard_solve<T: Real>(
    params: &NetworkParams<T>,
    rho0: &RhoVector<T>,
    opts: &PicardOptions<T>,
) -> Result<RhoVector<T>> {
    if !(opts.damping > T::zero() && opts.damping <= T::one()) {
        return Err(Error::Precondition("damping must lie in (0, 1]".into()));
    }
    if rho0.len() != params.class_count() {
        return Err(Error::DimensionMismatch {
            expected: params.class_count(),
            got: rho0.len(),
        });
    }
    let kc = params.class_count();
    let floor = real::<T>(1e-300);
    let mut rho = rho0.clone();
    let mut gap = T::infinity();
    for it in 0..opts.max_iter {
        let prof = CapacityProfile::from_params(&rho, params)?;
        let mut next = Vec::with_capacity(kc);
        gap = T::zero();
        for k in 0..kc {
            let target = (params.arrival_rate(k)
                + params.transfer_rate(k) * rho.get(k) * (T::one() - prof.blocking(k)))
                / (params.service_rate(k) + params.transfer_rate(k));
            gap = gap.max((target - rho.get(k)).abs());
            let damped =
                (T::one() - opts.damping) * rho.get(k) + opts.damping * target;
            next.push(damped.max(floor));
        }
        if gap < opts.tol {
            return Ok(rho);
        }
        rho = RhoVector::new(next)?;
        let _ = it;
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        last: rho.as_slice().iter().map(|x| x.to_f64().unwrap()).collect(),
        gap: gap.to_f64().unwrap(),
    })
}

/// Damped Newton iteration on ∇φ. Falls back to a gradient step when the
/// Hessian is singular; backtracks on ‖∇φ‖₂² and on positivity of ρ.
/// Returns the classified point with eigenvalues and label filled.
pub fn newton_refine<T: Real>(
    params: &NetworkParams<T>,
    rho0: &RhoVector<T>,
    tol: T,
) -> Result<CriticalPoint<T>> {
    let (point, _iters) = newton_refine_with_iterations(params, rho0, tol)?;
    Ok(point)
}

/// Newton refinement that also reports the number of iterations taken.
pub fn newton_refine_with_iterations<T: Real>(
    params: &NetworkParams<T>,
    rho0: &RhoVector<T>,
    tol: T,
) -> Result<(CriticalPoint<T>, usize)> {
    if !params.all_transfer_positive() {
        return Err(Error::UnsupportedModel(
            "Newton refinement works on grad phi and requires gamma_k > 0".into(),
        ));
    }
    let kc = params.class_count();
    let max_iter = 200usize;
    let mut rho = rho0.clone();
    let mut grad = grad_phi(&rho, params)?;
    for it in 0..max_iter {
        let gn = sup_norm(&grad);
        if gn < tol {
            let eig = hessian_phi(&rho, params)?.jacobi_eigenvalues();
            let point = CriticalPoint {
                rho: rho.clone(),
                grad_norm: gn,
                hessian_eigenvalues: eig.clone(),
                label: label_from_eigenvalues(&eig),
                phi_value: phi_via_recursion(&rho, params)?,
            };
            return Ok((point, it));
        }
        let hess = hessian_phi(&rho, params)?;
        let neg_grad: Vec<T> = grad.iter().map(|&g| -g).collect();
        let direction = match solve_linear(&hess.data, &neg_grad, kc) {
            Ok(d) => d,
            Err(_) => neg_grad.clone(), // singular Hessian: gradient step
        };
        match line_search(params, &rho, &grad, &direction)? {
            Some((next, next_grad)) => {
                rho = next;
                grad = next_grad;
            }
            None => {
                // Newton direction made no progress; try plain gradient descent
                match line_search(params, &rho, &grad, &neg_grad)? {
                    Some((next, next_grad)) => {
                        rho = next;
                        grad = next_grad;
                    }
                    None => {
                        return Err(Error::NonConvergence {
                            iterations: it,
                            last: rho
                                .as_slice()
                                .iter()
                                .map(|x| x.to_f64().unwrap())
                                .collect(),
                            gap: gn.to_f64().unwrap(),
                        });
                    }
                }
            }
        }
    }
    let gn = sup_norm(&grad);
    Err(Error::NonConvergence {
        iterations: max_iter,
        last: rho.as_slice().iter().map(|x| x.to_f64().unwrap()).collect(),
        gap: gn.to_f64().unwrap(),
    })
}

/// Backtracking step: shrink until ρ stays positive and ‖∇φ‖² decreases.
/// Returns the accepted point and its gradient, or None if no step length
/// down to 2⁻⁴⁰ makes progress.
fn line_search<T: Real>(
    params: &NetworkParams<T>,
    rho: &RhoVector<T>,
    grad: &[T],
    direction: &[T],
) -> Result<Option<(RhoVector<T>, Vec<T>)>> {
    let merit0: T = grad.iter().map(|&g| g * g).sum();
    let mut t = T::one();
    let half = real::<T>(0.5);
    let armijo = real::<T>(1e-4);
    for _ in 0..40 {
        let candidate: Vec<T> = rho
            .as_slice()
            .iter()
            .zip(direction.iter())
            .map(|(&r, &d)| r + t * d)
            .collect();
        if candidate.iter().all(|&r| r > T::zero()) {
            let cand = RhoVector::new(candidate)?;
            let g = grad_phi(&cand, params)?;
            let merit: T = g.iter().map(|&x| x * x).sum();
            if merit <= (T::one() - armijo * t) * merit0 {
                return Ok(Some((cand, g)));
            }
        }
        t = t * half;
    }
    Ok(None)
}

/// One start of the sweep that did not produce a converged point.
#[derive(Debug, Clone)]
pub struct FailedStart<T> {
    pub start: Vec<T>,
    pub error: Error,
}

/// Result of the multistart sweep: deduplicated points sorted by φ, plus
/// the starts that failed (reported, never fatal).
#[derive(Debug, Clone)]
pub struct CriticalPointSearch<T> {
    pub points: Vec<CriticalPoint<T>>,
    pub failures: Vec<FailedStart<T>>,
}

/// Multistart critical-point search.
///
/// Log-spaced grid over Π_k [1e-4·ρ_k^max, ρ_k^max] with
/// ρ_k^max = (λ_k + γ_kC/A_k)/(μ_k+γ_k), an upper bound on any fixed point.
/// Each start runs damped Picard then Newton. Saddles do not attract the
/// Picard map, so for every pair of distinct points the sweep launches
/// Newton from the pair midpoint *and* from the φ-argmax along the segment
/// between them (midpoints alone demonstrably land back in a minimum).
/// Points are deduplicated by relative sup-distance 1e-6 and sorted by φ.
pub fn find_all_critical_points<T: Real>(
    params: &NetworkParams<T>,
    grid_per_axis: usize,
) -> Result<CriticalPointSearch<T>> {
    find_all_critical_points_with_tol(params, grid_per_axis, real(1e-12))
}

/// Multistart sweep with an explicit Newton tolerance on sup‖∇φ‖.
pub fn find_all_critical_points_with_tol<T: Real>(
    params: &NetworkParams<T>,
    grid_per_axis: usize,
    tol: T,
) -> Result<CriticalPointSearch<T>> {
    if !params.all_transfer_positive() {
        return Err(Error::UnsupportedModel(
            "critical-point classification requires gamma_k > 0 for every class; \
             use the Picard-only path for models with gamma_k = 0"
                .into(),
        ));
    }
    if grid_per_axis < 1 {
        return Err(Error::Precondition("grid_per_axis must be >= 1".into()));
    }
    let kc = params.class_count();
    let rho_max: Vec<T> = (0..kc)
        .map(|k| {
            (params.arrival_rate(k)
                + params.transfer_rate(k) * real::<T>(params.capacity() as f64)
                    / real::<T>(params.requirement(k) as f64))
                / (params.service_rate(k) + params.transfer_rate(k))
        })
        .collect();
    let lo_factor = real::<T>(1e-4);
    let axes: Vec<Vec<T>> = rho_max
        .iter()
        .map(|&hi| log_spaced(lo_factor * hi, hi, grid_per_axis))
        .collect();

    let picard_opts = PicardOptions {
        tol: real(1e-9),
        max_iter: 20_000,
        ..PicardOptions::default()
    };

    let mut points: Vec<CriticalPoint<T>> = Vec::new();
    let mut failures: Vec<FailedStart<T>> = Vec::new();
    let mut grid_index = vec![0usize; kc];
    loop {
        let start: Vec<T> = (0..kc).map(|k| axes[k][grid_index[k]]).collect();
        let start_rho = RhoVector::new(start.clone())?;
        let picard_end = match picard_solve(params, &start_rho, &picard_opts) {
            Ok(r) => r,
            Err(Error::NonConvergence { last, .. }) => {
                // hand the last iterate to Newton anyway
                RhoVector::new(last.iter().map(|&x| real::<T>(x.max(1e-300))).collect())?
            }
            Err(e) => return Err(e),
        };
        match newton_refine(params, &picard_end, tol) {
            Ok(point) => merge_point(&mut points, point),
            Err(error) => failures.push(FailedStart {
                start: start.clone(),
                error,
            }),
        }
        // odometer over the grid
        let mut pos = 0;
        loop {
            if pos == kc {
                break;
            }
            grid_index[pos] += 1;
            if grid_index[pos] < grid_per_axis {
                break;
            }
            grid_index[pos] = 0;
            pos += 1;
        }
        if pos == kc {
            break;
        }
    }

    // saddle hunt between every pair of distinct points
    let snapshot: Vec<RhoVector<T>> = points.iter().map(|p| p.rho.clone()).collect();
    for i in 0..snapshot.len() {
        for j in i + 1..snapshot.len() {
            for start in saddle_starts(params, &snapshot[i], &snapshot[j])? {
                if let Ok(point) = newton_refine(params, &start, tol) {
                    merge_point(&mut points, point);
                }
            }
        }
    }

    points.sort_by(|a, b| {
        a.phi_value
            .partial_cmp(&b.phi_value)
            .expect("phi values are finite")
    });
    Ok(CriticalPointSearch { points, failures })
}

/// Newton launch points between two distinct limits: the arithmetic
/// midpoint and the φ-argmax over a 65-point scan of the segment.
fn saddle_starts<T: Real>(
    params: &NetworkParams<T>,
    a: &RhoVector<T>,
    b: &RhoVector<T>,
) -> Result<Vec<RhoVector<T>>> {
    let kc = a.len();
    let half = real::<T>(0.5);
    let mid: Vec<T> = (0..kc)
        .map(|k| half * (a.get(k) + b.get(k)))
        .collect();
    let mut out = vec![RhoVector::new(mid)?];

    let steps = 65usize;
    let mut best: Option<(T, Vec<T>)> = None;
    for s in 1..steps {
        let t = real::<T>(s as f64 / steps as f64);
        let point: Vec<T> = (0..kc)
            .map(|k| a.get(k) + t * (b.get(k) - a.get(k)))
            .collect();
        let rho = RhoVector::new(point.clone())?;
        let v = phi_via_recursion(&rho, params)?;
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, point));
        }
    }
    if let Some((_, argmax)) = best {
        out.push(RhoVector::new(argmax)?);
    }
    Ok(out)
}

fn log_spaced<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let llo = lo.ln();
    let lhi = hi.ln();
    (0..n)
        .map(|i| {
            let t = real::<T>(i as f64 / (n - 1) as f64);
            (llo + t * (lhi - llo)).exp()
        })
        .collect()
}

/// Inserts a point unless an existing one matches within relative
/// sup-distance 1e-6.
fn merge_point<T: Real>(points: &mut Vec<CriticalPoint<T>>, candidate: CriticalPoint<T>) {
    let tol = real::<T>(1e-6);
    for existing in points.iter() {
        let dist = existing.rho.sup_distance(&candidate.rho);
        let scale = T::one()
            + sup_norm(existing.rho.as_slice()).max(sup_norm(candidate.rho.as_slice()));
        if dist <= tol * scale {
            return;
        }
    }
    points.push(candidate);
}
