//! Pair-correlation estimation from stationary samples via exchangeability:
//! for a uniformly drawn node pair (i ≠ j),
//! E[n_k(i)·n_k(j) | counts] = (S_k² − Q_k)/(N(N−1)) with
//! S_k = Σ_states n_k·counts and Q_k = Σ_states n_k²·counts, so the
//! covariance needs only first and second moments of the empirical counts.

use crate::error::{Error, Result};
use crate::model::StateSpace;
use crate::scalar::{real, Real};

use super::EmpiricalState;

/// Per-class covariance estimate with a jackknife standard error.
#[derive(Debug, Clone)]
pub struct PairCorrelation<T> {
    pub class: usize,
    pub covariance: T,
    pub std_error: T,
}

/// Estimates Cov(n_k at one node, n_k at another node) per class from
/// stationary-regime samples. Needs at least 10 samples.
pub fn pair_correlation<T: Real>(
    samples: &[EmpiricalState],
    space: &StateSpace,
) -> Result<Vec<PairCorrelation<T>>> {
    if samples.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: samples.len(),
        });
    }
    let kc = space.class_count();
    let m = samples.len();
    let mf = real::<T>(m as f64);
    let mut out = Vec::with_capacity(kc);
    for k in 0..kc {
        // per-sample pair product a_i and single mean b_i
        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for st in samples {
            let n = real::<T>(st.n_total() as f64);
            let mut s = T::zero();
            let mut q = T::zero();
            for (i, sv) in space.states().iter().enumerate() {
                let nk = real::<T>(sv.count(k) as f64);
                let c = real::<T>(st.counts()[i] as f64);
                s = s + nk * c;
                q = q + nk * nk * c;
            }
            a.push((s * s - q) / (n * (n - T::one())));
            b.push(s / n);
        }
        let sum_a: T = a.iter().copied().sum();
        let sum_b: T = b.iter().copied().sum();
        let cov = sum_a / mf - (sum_b / mf) * (sum_b / mf);

        // leave-one-out estimates in O(m)
        let m1 = mf - T::one();
        let loo: Vec<T> = (0..m)
            .map(|i| {
                let ai = (sum_a - a[i]) / m1;
                let bi = (sum_b - b[i]) / m1;
                ai - bi * bi
            })
            .collect();
        let loo_mean = loo.iter().copied().sum::<T>() / mf;
        let var: T = loo
            .iter()
            .map(|&x| (x - loo_mean) * (x - loo_mean))
            .sum::<T>()
            * m1
            / mf;
        out.push(PairCorrelation {
            class: k,
            covariance: cov,
            std_error: var.sqrt(),
        });
    }
    Ok(out)
}
