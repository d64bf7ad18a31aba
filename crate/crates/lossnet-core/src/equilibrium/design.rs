//! Designer of two-class bistable instances: given the intended saddle
//! location ρ̄ and a capacity C, produce arrival rates that make ρ̄ an exact
//! fixed point of the A=(1,C) geometry.

use crate::error::{Error, Result};
use crate::model::NetworkParams;
use crate::scalar::Real;

use super::energy::hessian_phi;
use super::product_form::CapacityProfile;
use super::RhoVector;

/// Output of the designer: the instance plus the diagonal second
/// derivatives of φ at ρ̄ (a saddle shows (−, +) once C is large enough).
#[derive(Debug, Clone)]
pub struct BistableDesign<T> {
    pub params: NetworkParams<T>,
    pub second_derivatives: Vec<T>,
}

/// Builds the K=2 instance with A=(1,C), γ=(1,1), μ=(0,0) and
/// λ_k = ρ̄_k − ⟨I_k, ν_ρ̄⟩, so the fixed-point residual vanishes at ρ̄
/// exactly. Requires the saddle condition ρ̄_2 < (ρ̄_1 − 1)e^{ρ̄_1}
/// (checked in log form to dodge overflow for large ρ̄_1).
pub fn design_bistable<T: Real>(rho_bar: &RhoVector<T>, capacity: u32) -> Result<BistableDesign<T>> {
    if rho_bar.len() != 2 {
        return Err(Error::Precondition(
            "the designer builds two-class instances; rho must have length 2".into(),
        ));
    }
    if capacity < 1 {
        return Err(Error::Precondition("capacity must be at least 1".into()));
    }
    let r1 = rho_bar.get(0);
    let r2 = rho_bar.get(1);
    // saddle condition: rho2 < (rho1 - 1) e^{rho1}
    let holds = r1 > T::one() && r2.ln() < (r1 - T::one()).ln() + r1;
    if !holds {
        return Err(Error::ConditionViolated(format!(
            "need rho_2 < (rho_1 - 1)·exp(rho_1); got rho_1 = {r1}, rho_2 = {r2}"
        )));
    }

    let requirement = vec![1u32, capacity];
    let prof = CapacityProfile::build(rho_bar, &requirement, capacity)?;
    let lambda: Vec<T> = (0..2).map(|k| rho_bar.get(k) - prof.mean(k)).collect();
    if lambda.iter().any(|&l| !(l > T::zero())) {
        return Err(Error::ConditionViolated(
            "derived arrival rates must be positive; pick a larger rho or capacity".into(),
        ));
    }
    let params = NetworkParams::new(
        requirement,
        capacity,
        lambda,
        vec![T::one(), T::one()],
        vec![T::zero(), T::zero()],
    )?;
    let hess = hessian_phi(rho_bar, &params)?;
    let second_derivatives = vec![hess.get(0, 0), hess.get(1, 1)];
    Ok(BistableDesign {
        params,
        second_derivatives,
    })
}

/// The saddle condition on its own, for CLI error reporting.
pub fn saddle_condition_holds<T: Real>(rho_bar: &RhoVector<T>) -> bool {
    let r1 = rho_bar.get(0);
    let r2 = rho_bar.get(1);
    r1 > T::one() && r2.ln() < (r1 - T::one()).ln() + r1
}
