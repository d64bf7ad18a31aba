//! Large-capacity scaling: C → ∞ with arrival rates λ_k·C. The normalized
//! loads converge to an explicit limit governed by the root ω of a strictly
//! decreasing scalar equation.

use crate::error::{Error, Result};
use crate::model::NetworkParams;
use crate::scalar::{real, Real};

use super::product_form::CapacityProfile;
use super::RhoVector;

/// The scaling limit: ω ≥ 0 and the limiting normalized loads.
#[derive(Debug, Clone)]
pub struct KellyLimit<T> {
    pub omega: T,
    pub rho_bar: Vec<T>,
}

/// x ↦ Σ_k λ_k A_k e^{−xA_k}/(μ_k + γ_k − γ_k e^{−xA_k}), strictly
/// decreasing on [0, ∞).
fn scaling_objective<T: Real>(params: &NetworkParams<T>, x: T) -> T {
    (0..params.class_count())
        .map(|k| {
            let a = real::<T>(params.requirement(k) as f64);
            let e = (-x * a).exp();
            params.arrival_rate(k) * a * e
                / (params.service_rate(k) + params.transfer_rate(k) * (T::one() - e))
        })
        .sum()
}

/// Solves for ω = inf{x ≥ 0 : objective(x) ≤ 1} by bracketing and bisection
/// to interval width 1e-12, then fills ρ̄_k = λ_k/(μ_k+γ_k−γ_ke^{−ωA_k}).
///
/// The λ in `params` are the *normalized* per-capacity arrival rates of the
/// λ_k·C scaling. Requires μ_k > 0 for every class.
pub fn kelly_omega<T: Real>(params: &NetworkParams<T>) -> Result<KellyLimit<T>> {
    for k in 0..params.class_count() {
        if !(params.service_rate(k) > T::zero()) {
            return Err(Error::UnsupportedModel(format!(
                "the scaling limit requires mu_k > 0 for every class (class {k} has mu = 0)"
            )));
        }
    }
    let omega = if scaling_objective(params, T::zero()) <= T::one() {
        T::zero()
    } else {
        // bracket by doubling, then bisect
        let mut hi = T::one();
        for _ in 0..200 {
            if scaling_objective(params, hi) <= T::one() {
                break;
            }
            hi = hi + hi;
        }
        let mut lo = T::zero();
        let width_tol = real::<T>(1e-12);
        while hi - lo > width_tol {
            let mid = (lo + hi) * real::<T>(0.5);
            if scaling_objective(params, mid) <= T::one() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) * real::<T>(0.5)
    };
    let rho_bar = (0..params.class_count())
        .map(|k| {
            let a = real::<T>(params.requirement(k) as f64);
            params.arrival_rate(k)
                / (params.service_rate(k)
                    + params.transfer_rate(k) * (T::one() - (-omega * a).exp()))
        })
        .collect();
    Ok(KellyLimit { omega, rho_bar })
}

/// Exact ratio P(C − Σ_k A_k P_k ≥ a)/P(C − Σ_k A_k P_k ≥ 0) for independent
/// Poisson P_k with means ρ_k, via the same lattice convolution as the
/// occupancy recursion (unnormalized, so the Poisson e^{−ρ} factors cancel).
pub fn poisson_tail_ratio<T: Real>(
    rho: &RhoVector<T>,
    params: &NetworkParams<T>,
    a: u32,
) -> Result<T> {
    let c = params.capacity();
    if a > c {
        return Err(Error::Precondition(format!(
            "tail offset a = {a} must lie in [0, C = {c}]"
        )));
    }
    let prof = CapacityProfile::from_params(rho, params)?;
    Ok(prof.prefix_ratio(c as i64 - a as i64))
}
