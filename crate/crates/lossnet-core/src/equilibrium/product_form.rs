//! Product-form quantities: partition function, ν_ρ, and the capacity
//! (occupied-units) recursion that yields occupancy marginals, blocking
//! probabilities and moments in O(C·K) without enumerating X.
//!
//! All sums run in log space; ρ^n/n! overflows f64 for capacities in the
//! hundreds.

use crate::error::{Error, Result};
use crate::model::{class_moment, Distribution, NetworkParams, StateSpace};
use crate::scalar::{log_add_exp, log_sum_exp, ln_factorial_table, real, Real};

use super::RhoVector;

/// Distribution of total occupied capacity under ν_ρ.
#[derive(Debug, Clone)]
pub struct OccupancyDistribution<T> {
    /// q[j] = P(A·n = j), j = 0..=C.
    pub q: Vec<T>,
}

/// Log-space weights of the capacity recursion
/// j·u_j = Σ_k A_k ρ_k u_{j−A_k}, u_0 = 1, with prefix sums; everything the
/// solvers need (Z, B_k, first and second moments of ν_ρ) reads off this.
#[derive(Debug, Clone)]
pub struct CapacityProfile<T> {
    capacity: usize,
    requirement: Vec<u32>,
    rho: Vec<T>,
    /// log u_j (−inf where the level is unreachable).
    log_u: Vec<T>,
    /// log Σ_{i ≤ j} u_i.
    log_prefix: Vec<T>,
}

impl<T: Real> CapacityProfile<T> {
    pub fn build(rho: &RhoVector<T>, requirement: &[u32], capacity: u32) -> Result<Self> {
        if rho.len() != requirement.len() {
            return Err(Error::DimensionMismatch {
                expected: requirement.len(),
                got: rho.len(),
            });
        }
        let c = capacity as usize;
        let k = requirement.len();
        let log_ra: Vec<T> = (0..k)
            .map(|i| (rho.get(i) * real::<T>(requirement[i] as f64)).ln())
            .collect();
        let mut log_u = vec![T::neg_infinity(); c + 1];
        log_u[0] = T::zero();
        for j in 1..=c {
            let mut acc = T::neg_infinity();
            for i in 0..k {
                let a = requirement[i] as usize;
                if a <= j && log_u[j - a] > T::neg_infinity() {
                    acc = log_add_exp(acc, log_ra[i] + log_u[j - a]);
                }
            }
            log_u[j] = acc - real::<T>(j as f64).ln();
        }
        let mut log_prefix = vec![T::neg_infinity(); c + 1];
        let mut acc = T::neg_infinity();
        for j in 0..=c {
            acc = log_add_exp(acc, log_u[j]);
            log_prefix[j] = acc;
        }
        Ok(Self {
            capacity: c,
            requirement: requirement.to_vec(),
            rho: rho.as_slice().to_vec(),
            log_u,
            log_prefix,
        })
    }

    pub fn from_params(rho: &RhoVector<T>, params: &NetworkParams<T>) -> Result<Self> {
        Self::build(rho, params.requirements(), params.capacity())
    }

    /// log Z(ρ) = log Σ_{j ≤ C} u_j.
    pub fn log_z(&self) -> T {
        self.log_prefix[self.capacity]
    }

    /// Z_a/Z_C = Σ_{j ≤ a} u_j / Σ_{j ≤ C} u_j, clamped to 0 for a < 0.
    pub fn prefix_ratio(&self, a: i64) -> T {
        if a < 0 {
            return T::zero();
        }
        let a = (a as usize).min(self.capacity);
        (self.log_prefix[a] - self.log_prefix[self.capacity]).exp()
    }

    /// Blocking probability B_k = Σ_{j > C−A_k} q_j, via 1 − Z_{C−A_k}/Z
    /// computed as −expm1 for accuracy at both ends.
    pub fn blocking(&self, k: usize) -> T {
        let a = self.capacity as i64 - self.requirement[k] as i64;
        if a < 0 {
            return T::one();
        }
        let d = self.log_prefix[a as usize] - self.log_prefix[self.capacity];
        -d.exp_m1()
    }

    /// ⟨I_k, ν_ρ⟩ = ρ_k Z_{C−A_k}/Z.
    pub fn mean(&self, k: usize) -> T {
        self.rho[k] * self.prefix_ratio(self.capacity as i64 - self.requirement[k] as i64)
    }

    /// ⟨I_{k,l}, ν_ρ⟩ = Σ n_k n_l ν_ρ(n); for k=l this is the raw second
    /// moment ρ_k² Z_{C−2A_k}/Z + ⟨I_k⟩.
    pub fn cross(&self, k: usize, l: usize) -> T {
        let c = self.capacity as i64;
        if k == l {
            let two_a = 2 * self.requirement[k] as i64;
            self.rho[k] * self.rho[k] * self.prefix_ratio(c - two_a) + self.mean(k)
        } else {
            let a = self.requirement[k] as i64 + self.requirement[l] as i64;
            self.rho[k] * self.rho[l] * self.prefix_ratio(c - a)
        }
    }

    /// Normalized occupancy marginals q_j = u_j/Z.
    pub fn occupancy(&self) -> OccupancyDistribution<T> {
        let z = self.log_z();
        let q = self
            .log_u
            .iter()
            .map(|&lu| {
                if lu == T::neg_infinity() {
                    T::zero()
                } else {
                    (lu - z).exp()
                }
            })
            .collect();
        OccupancyDistribution { q }
    }
}

/// Per-state log weights log(ρ^n/n!) over X.
fn state_log_weights<T: Real>(rho: &RhoVector<T>, space: &StateSpace) -> Result<Vec<T>> {
    if rho.len() != space.class_count() {
        return Err(Error::DimensionMismatch {
            expected: space.class_count(),
            got: rho.len(),
        });
    }
    let max_n = space
        .states()
        .iter()
        .flat_map(|s| s.0.iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let lnfact = ln_factorial_table::<T>(max_n);
    let log_rho: Vec<T> = rho.as_slice().iter().map(|&r| r.ln()).collect();
    Ok(space
        .states()
        .iter()
        .map(|s| {
            s.0.iter()
                .enumerate()
                .map(|(k, &n)| real::<T>(n as f64) * log_rho[k] - lnfact[n as usize])
                .sum()
        })
        .collect())
}

/// log Z(ρ) by direct enumeration over X (max-shifted).
pub fn log_partition_function<T: Real>(rho: &RhoVector<T>, space: &StateSpace) -> Result<T> {
    Ok(log_sum_exp(&state_log_weights(rho, space)?))
}

/// Z(ρ) = Σ_{n∈X} ρ^n/n! ≥ 1. The linear value; may exceed the scalar range
/// for extreme loads — use `log_partition_function` there.
pub fn partition_function<T: Real>(rho: &RhoVector<T>, space: &StateSpace) -> Result<T> {
    Ok(log_partition_function(rho, space)?.exp())
}

/// The product-form distribution ν_ρ(n) ∝ ρ^n/n! on X.
pub fn nu_rho<T: Real>(rho: &RhoVector<T>, space: &StateSpace) -> Result<Distribution<T>> {
    let lw = state_log_weights(rho, space)?;
    let lz = log_sum_exp(&lw);
    Distribution::renormalized(lw.into_iter().map(|w| (w - lz).exp()).collect())
}

/// Occupancy marginals via the capacity recursion; agrees with aggregating
/// ν_ρ by occupied units to 1e-10.
pub fn occupancy_distribution<T: Real>(
    rho: &RhoVector<T>,
    params: &NetworkParams<T>,
) -> Result<OccupancyDistribution<T>> {
    Ok(CapacityProfile::from_params(rho, params)?.occupancy())
}

/// B_k(ρ) = Σ_{j > C−A_k} q_j.
pub fn blocking_probability<T: Real>(
    rho: &RhoVector<T>,
    k: usize,
    params: &NetworkParams<T>,
) -> Result<T> {
    if k >= params.class_count() {
        return Err(Error::DimensionMismatch {
            expected: params.class_count(),
            got: k,
        });
    }
    Ok(CapacityProfile::from_params(rho, params)?.blocking(k))
}

/// ⟨I_k, ν_ρ⟩ without enumerating X (used by solvers and tests).
pub fn nu_class_moment_recursive<T: Real>(
    rho: &RhoVector<T>,
    k: usize,
    params: &NetworkParams<T>,
) -> Result<T> {
    Ok(CapacityProfile::from_params(rho, params)?.mean(k))
}

#[allow(dead_code)]
/// Enumeration route for the same moment; oracle counterpart in tests.
pub fn nu_class_moment_enumerated<T: Real>(
    rho: &RhoVector<T>,
    k: usize,
    space: &StateSpace,
) -> Result<T> {
    class_moment(&nu_rho(rho, space)?, k, space)
}
