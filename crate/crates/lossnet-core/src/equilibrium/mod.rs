//! Product-form equilibria of the mean-field limit: partition function,
//! blocking probabilities, fixed-point solvers, the energy function φ with
//! its landscape classification, bistable-instance design, and the
//! large-capacity (Kelly) scaling limit.

mod design;
mod energy;
mod kelly;
mod product_form;
mod solve;

pub use design::{design_bistable, saddle_condition_holds, BistableDesign};
pub use energy::{
    classify_critical_point, grad_phi, hessian_phi, label_from_eigenvalues, phi, phi_via_recursion,
    CriticalPoint, StabilityLabel,
};
pub use kelly::{kelly_omega, poisson_tail_ratio, KellyLimit};
pub use product_form::{
    blocking_probability, log_partition_function, nu_class_moment_recursive, nu_rho,
    occupancy_distribution, partition_function, CapacityProfile, OccupancyDistribution,
};
pub use solve::{
    find_all_critical_points, fixed_point_residual, newton_refine, picard_solve, CriticalPointSearch,
    FailedStart, PicardOptions,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Strictly positive load vector ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoVector<T> {
    rho: Vec<T>,
}

impl<T: Real> RhoVector<T> {
    pub fn new(rho: Vec<T>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::InvalidParams("rho must have length K ≥ 1".into()));
        }
        for (i, &r) in rho.iter().enumerate() {
            if !(r > T::zero()) || !r.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "rho[{i}] must be strictly positive and finite"
                )));
            }
        }
        Ok(Self { rho })
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn get(&self, k: usize) -> T {
        self.rho[k]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.rho
    }

    /// max_k |a_k − b_k|.
    pub fn sup_distance(&self, other: &Self) -> T {
        self.rho
            .iter()
            .zip(other.rho.iter())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}
