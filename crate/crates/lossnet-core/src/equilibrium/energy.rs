//! The energy function φ on load space, its derivatives, and critical-point
//! classification. Requires γ_k > 0 for every class; there is no sensible
//! extension to γ_k = 0 and none is attempted.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::model::{NetworkParams, StateSpace};
use crate::scalar::{real, sup_norm, Real};
use serde::Serialize;

use super::product_form::{log_partition_function, CapacityProfile};
use super::RhoVector;

/// Landscape role of a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityLabel {
    Minimum,
    Saddle,
    Maximum,
    Degenerate,
}

impl std::fmt::Display for StabilityLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StabilityLabel::Minimum => "minimum",
            StabilityLabel::Saddle => "saddle",
            StabilityLabel::Maximum => "maximum",
            StabilityLabel::Degenerate => "degenerate",
        };
        write!(f, "{s}")
    }
}

/// A classified zero of ∇φ.
#[derive(Debug, Clone)]
pub struct CriticalPoint<T> {
    pub rho: RhoVector<T>,
    pub grad_norm: T,
    pub hessian_eigenvalues: Vec<T>,
    pub label: StabilityLabel,
    pub phi_value: T,
}

fn require_transfers<T: Real>(params: &NetworkParams<T>) -> Result<()> {
    if !params.all_transfer_positive() {
        return Err(Error::UnsupportedModel(
            "the energy function requires gamma_k > 0 for every class".into(),
        ));
    }
    Ok(())
}

fn check_rho_dim<T: Real>(rho: &RhoVector<T>, params: &NetworkParams<T>) -> Result<()> {
    if rho.len() != params.class_count() {
        return Err(Error::DimensionMismatch {
            expected: params.class_count(),
            got: rho.len(),
        });
    }
    Ok(())
}

/// φ(ρ) = −log Z(ρ) + Σ_k (β_k ρ_k − α_k log ρ_k), with log Z enumerated
/// over the given state space.
pub fn phi<T: Real>(
    rho: &RhoVector<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<T> {
    require_transfers(params)?;
    check_rho_dim(rho, params)?;
    let log_z = log_partition_function(rho, space)?;
    Ok(phi_from_log_z(rho, params, log_z))
}

/// Same value with log Z from the capacity recursion; what the solvers use
/// (no enumeration needed).
pub fn phi_via_recursion<T: Real>(rho: &RhoVector<T>, params: &NetworkParams<T>) -> Result<T> {
    require_transfers(params)?;
    check_rho_dim(rho, params)?;
    let log_z = CapacityProfile::from_params(rho, params)?.log_z();
    Ok(phi_from_log_z(rho, params, log_z))
}

fn phi_from_log_z<T: Real>(rho: &RhoVector<T>, params: &NetworkParams<T>, log_z: T) -> T {
    let mut acc = -log_z;
    for k in 0..params.class_count() {
        acc = acc + params.beta(k) * rho.get(k) - params.alpha(k) * rho.get(k).ln();
    }
    acc
}

/// ∂φ/∂ρ_k = μ_k/γ_k − λ_k/(ρ_k γ_k) + B_k(ρ).
pub fn grad_phi<T: Real>(rho: &RhoVector<T>, params: &NetworkParams<T>) -> Result<Vec<T>> {
    require_transfers(params)?;
    check_rho_dim(rho, params)?;
    let prof = CapacityProfile::from_params(rho, params)?;
    Ok((0..params.class_count())
        .map(|k| {
            params.service_rate(k) / params.transfer_rate(k)
                - params.arrival_rate(k) / (rho.get(k) * params.transfer_rate(k))
                + prof.blocking(k)
        })
        .collect())
}

/// Hessian of φ from ν_ρ moments:
/// H_kl = (⟨I_k⟩⟨I_l⟩ − ⟨I_{k,l}⟩ + 1_{k=l}⟨I_k⟩)/(ρ_kρ_l) + 1_{k=l} λ_k/(γ_kρ_k²).
pub fn hessian_phi<T: Real>(
    rho: &RhoVector<T>,
    params: &NetworkParams<T>,
) -> Result<SymMatrix<T>> {
    require_transfers(params)?;
    check_rho_dim(rho, params)?;
    let kc = params.class_count();
    let prof = CapacityProfile::from_params(rho, params)?;
    let means: Vec<T> = (0..kc).map(|k| prof.mean(k)).collect();
    let mut h = SymMatrix::zeros(kc);
    for k in 0..kc {
        for l in k..kc {
            let cross = prof.cross(k, l);
            let mut v = (means[k] * means[l] - cross + if k == l { means[k] } else { T::zero() })
                / (rho.get(k) * rho.get(l));
            if k == l {
                v = v + params.arrival_rate(k)
                    / (params.transfer_rate(k) * rho.get(k) * rho.get(k));
            }
            h.set(k, l, v);
        }
    }
    Ok(h)
}

/// Label from Hessian eigenvalues with degeneracy cutoff
/// δ = 1e-8·max|eigenvalue|: any |λ| ≤ δ wins over the sign pattern.
pub fn label_from_eigenvalues<T: Real>(eigenvalues: &[T]) -> StabilityLabel {
    let delta = real::<T>(1e-8) * sup_norm(eigenvalues);
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut deg = 0usize;
    for &e in eigenvalues {
        if e.abs() <= delta {
            deg += 1;
        } else if e > T::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    if deg > 0 {
        StabilityLabel::Degenerate
    } else if neg == 0 {
        StabilityLabel::Minimum
    } else if pos == 0 {
        StabilityLabel::Maximum
    } else {
        StabilityLabel::Saddle
    }
}

/// Classifies an (already converged) critical point; errors if ∇φ is not
/// small at the given ρ.
pub fn classify_critical_point<T: Real>(
    rho: &RhoVector<T>,
    params: &NetworkParams<T>,
) -> Result<CriticalPoint<T>> {
    let grad = grad_phi(rho, params)?;
    let gn = sup_norm(&grad);
    if gn >= real::<T>(1e-8) {
        return Err(Error::Precondition(format!(
            "point is not critical: sup-norm of grad phi is {gn:e} (>= 1e-8)"
        )));
    }
    let eig = hessian_phi(rho, params)?.jacobi_eigenvalues();
    let label = label_from_eigenvalues(&eig);
    let phi_value = phi_via_recursion(rho, params)?;
    Ok(CriticalPoint {
        rho: rho.clone(),
        grad_norm: gn,
        hessian_eigenvalues: eig,
        label,
        phi_value,
    })
}
