//! Network parameterization and the finite state space.
//!
//! A node has capacity `C`; a class-`k` customer occupies `A[k]` units.
//! The per-node state is an occupancy vector `n` with `A·n ≤ C`; the state
//! space `X` is that constrained lattice, enumerated once in lexicographic
//! order and shared (immutably) by every other module.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{real_of_usize, Real};

/// Default bound on |X|; dense-vector dynamics scale as |X|², so refuse
/// enormous spaces up front instead of thrashing.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Tolerance on |Σ y − 1| for probability vectors.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

/// Model tuple (K, A, C, λ, γ, μ).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams<T> {
    class_count: usize,
    requirement: Vec<u32>,
    capacity: u32,
    arrival: Vec<T>,
    transfer: Vec<T>,
    service: Vec<T>,
}

/// Raw JSON shape: keys K, A, C, lambda, gamma, mu.
#[derive(Serialize, Deserialize)]
struct ParamsJson {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "A")]
    a: Vec<u32>,
    #[serde(rename = "C")]
    c: u32,
    lambda: Vec<f64>,
    gamma: Vec<f64>,
    mu: Vec<f64>,
}

impl<T: Real> NetworkParams<T> {
    /// Validates every construction invariant.
    pub fn new(
        requirement: Vec<u32>,
        capacity: u32,
        arrival: Vec<T>,
        transfer: Vec<T>,
        service: Vec<T>,
    ) -> Result<Self> {
        let k = requirement.len();
        if k == 0 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        for (name, v) in [("lambda", &arrival), ("gamma", &transfer), ("mu", &service)] {
            if v.len() != k {
                return Err(Error::InvalidParams(format!(
                    "key \"{name}\": expected length {k}, got {}",
                    v.len()
                )));
            }
            for (i, &x) in v.iter().enumerate() {
                if !x.is_finite() || x < T::zero() {
                    return Err(Error::InvalidParams(format!(
                        "key \"{name}\"[{i}]: rates must be finite and nonnegative"
                    )));
                }
            }
        }
        for (i, &a) in requirement.iter().enumerate() {
            if a == 0 {
                return Err(Error::InvalidParams(format!(
                    "key \"A\"[{i}]: requirement must be at least 1"
                )));
            }
            if a > capacity {
                return Err(Error::InvalidParams(format!(
                    "key \"A\"[{i}]: requirement {a} exceeds capacity C={capacity}"
                )));
            }
        }
        for i in 0..k {
            if service[i] + transfer[i] <= T::zero() {
                return Err(Error::InvalidParams(format!(
                    "class {i}: mu + gamma must be positive (a customer must eventually leave)"
                )));
            }
        }
        Ok(Self {
            class_count: k,
            requirement,
            capacity,
            arrival,
            transfer,
            service,
        })
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn requirement(&self, k: usize) -> u32 {
        self.requirement[k]
    }

    pub fn requirements(&self) -> &[u32] {
        &self.requirement
    }

    pub fn arrival_rate(&self, k: usize) -> T {
        self.arrival[k]
    }

    pub fn transfer_rate(&self, k: usize) -> T {
        self.transfer[k]
    }

    pub fn service_rate(&self, k: usize) -> T {
        self.service[k]
    }

    /// True iff every class has a positive transfer rate (the energy function
    /// and its derivatives divide by γ_k).
    pub fn all_transfer_positive(&self) -> bool {
        self.transfer.iter().all(|&g| g > T::zero())
    }

    /// λ_k/γ_k; requires γ_k > 0.
    pub fn alpha(&self, k: usize) -> T {
        self.arrival[k] / self.transfer[k]
    }

    /// (γ_k+μ_k)/γ_k; requires γ_k > 0.
    pub fn beta(&self, k: usize) -> T {
        (self.transfer[k] + self.service[k]) / self.transfer[k]
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ParamsJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidParams(e.to_string()))?;
        if raw.a.len() != raw.k {
            return Err(Error::InvalidParams(format!(
                "key \"A\": expected length K={}, got {}",
                raw.k,
                raw.a.len()
            )));
        }
        let conv = |v: &[f64]| v.iter().map(|&x| crate::scalar::real::<T>(x)).collect();
        Self::new(
            raw.a.clone(),
            raw.c,
            conv(&raw.lambda),
            conv(&raw.gamma),
            conv(&raw.mu),
        )
    }

    pub fn to_json_string(&self) -> String {
        let raw = ParamsJson {
            k: self.class_count,
            a: self.requirement.clone(),
            c: self.capacity,
            lambda: self.arrival.iter().map(|x| x.to_f64().unwrap()).collect(),
            gamma: self.transfer.iter().map(|x| x.to_f64().unwrap()).collect(),
            mu: self.service.iter().map(|x| x.to_f64().unwrap()).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("params serialize")
    }
}

/// One occupancy vector n with A·n ≤ C.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVector(pub Vec<u32>);

impl StateVector {
    pub fn count(&self, k: usize) -> u32 {
        self.0[k]
    }
}

impl fmt::Display for StateVector {
    /// Serialized form used in CSV headers: components joined by '-'.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// The enumerated lattice X with bidirectional indexing and per-class
/// neighbor tables (`up` = index of n+f_k, `down` = index of n−f_k).
#[derive(Debug, Clone)]
pub struct StateSpace {
    states: Vec<StateVector>,
    index: HashMap<StateVector, usize>,
    up: Vec<Vec<Option<usize>>>,
    down: Vec<Vec<Option<usize>>>,
    class_count: usize,
}

impl StateSpace {
    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &StateVector {
        &self.states[i]
    }

    pub fn index_of(&self, n: &StateVector) -> Option<usize> {
        self.index.get(n).copied()
    }

    /// Index of n+f_k if it lies in X.
    pub fn up(&self, k: usize, i: usize) -> Option<usize> {
        self.up[k][i]
    }

    /// Index of n−f_k if n_k ≥ 1.
    pub fn down(&self, k: usize, i: usize) -> Option<usize> {
        self.down[k][i]
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }
}

/// Enumerates X = {n : A·n ≤ C} in lexicographic order with the default cap.
pub fn enumerate_statespace<T: Real>(params: &NetworkParams<T>) -> Result<StateSpace> {
    enumerate_statespace_with_cap(params, DEFAULT_STATE_CAP)
}

/// Enumeration with an explicit cap on |X|.
pub fn enumerate_statespace_with_cap<T: Real>(
    params: &NetworkParams<T>,
    cap: usize,
) -> Result<StateSpace> {
    let k = params.class_count();
    let a = params.requirements();
    let c = params.capacity();
    let mut states: Vec<StateVector> = Vec::new();
    let mut cur = vec![0u32; k];
    // lexicographic DFS over the positions
    fn rec(
        pos: usize,
        rem: u32,
        a: &[u32],
        cur: &mut Vec<u32>,
        out: &mut Vec<StateVector>,
        cap: usize,
    ) -> Result<()> {
        if pos == a.len() {
            if out.len() >= cap {
                return Err(Error::CapacityExceeded {
                    cap,
                    seen: out.len() + 1,
                });
            }
            out.push(StateVector(cur.clone()));
            return Ok(());
        }
        let max_n = rem / a[pos];
        for n in 0..=max_n {
            cur[pos] = n;
            rec(pos + 1, rem - n * a[pos], a, cur, out, cap)?;
        }
        cur[pos] = 0;
        Ok(())
    }
    rec(0, c, a, &mut cur, &mut states, cap)?;

    let index: HashMap<StateVector, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut up = vec![vec![None; states.len()]; k];
    let mut down = vec![vec![None; states.len()]; k];
    for (i, s) in states.iter().enumerate() {
        for cls in 0..k {
            let mut v = s.0.clone();
            v[cls] += 1;
            let sv = StateVector(v);
            up[cls][i] = index.get(&sv).copied();
            if s.0[cls] >= 1 {
                let mut w = s.0.clone();
                w[cls] -= 1;
                down[cls][i] = index.get(&StateVector(w)).copied();
            }
        }
    }
    Ok(StateSpace {
        states,
        index,
        up,
        down,
        class_count: k,
    })
}

/// Probability vector over X.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    y: Vec<T>,
}

impl<T: Real> Distribution<T> {
    /// Validates nonnegativity and normalization within `DISTRIBUTION_TOL`.
    pub fn new(y: Vec<T>) -> Result<Self> {
        for (i, &v) in y.iter().enumerate() {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::InvalidParams(format!(
                    "distribution component {i} is negative or non-finite"
                )));
            }
        }
        let total: T = y.iter().copied().sum();
        if (total - T::one()).abs() > crate::scalar::real(DISTRIBUTION_TOL) {
            return Err(Error::InvalidParams(format!(
                "distribution sums to {total}, outside 1 ± {DISTRIBUTION_TOL}"
            )));
        }
        Ok(Self { y })
    }

    /// Divides by the current sum; the explicit renormalization utility for
    /// accumulated roundoff.
    pub fn renormalized(mut y: Vec<T>) -> Result<Self> {
        let total: T = y.iter().copied().sum();
        if total <= T::zero() || !total.is_finite() {
            return Err(Error::InvalidParams(
                "cannot renormalize a vector with non-positive sum".into(),
            ));
        }
        for v in y.iter_mut() {
            *v = *v / total;
        }
        Self::new(y)
    }

    pub fn point_mass(space: &StateSpace, index: usize) -> Result<Self> {
        if index >= space.size() {
            return Err(Error::DimensionMismatch {
                expected: space.size(),
                got: index,
            });
        }
        let mut y = vec![T::zero(); space.size()];
        y[index] = T::one();
        Ok(Self { y })
    }

    pub fn uniform(space: &StateSpace) -> Self {
        let n = space.size();
        let w = T::one() / real_of_usize::<T>(n);
        Self { y: vec![w; n] }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.y
    }

    pub fn get(&self, i: usize) -> T {
        self.y[i]
    }

    /// Total-variation distance ½ Σ |y − z|.
    pub fn tv_distance(&self, other: &Self) -> T {
        let half: T = crate::scalar::real(0.5);
        half * self
            .y
            .iter()
            .zip(other.y.iter())
            .map(|(&a, &b)| (a - b).abs())
            .sum::<T>()
    }

    /// Sup-norm distance, used for nearest-equilibrium attribution.
    pub fn sup_distance(&self, other: &Self) -> T {
        self.y
            .iter()
            .zip(other.y.iter())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

fn check_dims<T: Real>(y: &Distribution<T>, space: &StateSpace) -> Result<()> {
    if y.len() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            got: y.len(),
        });
    }
    Ok(())
}

/// ⟨I_k, y⟩ = Σ_n n_k y_n ∈ [0, C/A_k].
pub fn class_moment<T: Real>(y: &Distribution<T>, k: usize, space: &StateSpace) -> Result<T> {
    check_dims(y, space)?;
    if k >= space.class_count() {
        return Err(Error::DimensionMismatch {
            expected: space.class_count(),
            got: k,
        });
    }
    Ok(space
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| real_of_usize::<T>(s.count(k) as usize) * y.get(i))
        .sum())
}

/// ⟨I_{k,l}, y⟩ = Σ_n n_k n_l y_n.
pub fn cross_moment<T: Real>(
    y: &Distribution<T>,
    k: usize,
    l: usize,
    space: &StateSpace,
) -> Result<T> {
    check_dims(y, space)?;
    let kc = space.class_count();
    if k >= kc || l >= kc {
        return Err(Error::DimensionMismatch {
            expected: kc,
            got: k.max(l),
        });
    }
    Ok(space
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            real_of_usize::<T>(s.count(k) as usize)
                * real_of_usize::<T>(s.count(l) as usize)
                * y.get(i)
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params1(a: Vec<u32>, c: u32) -> NetworkParams<f64> {
        let k = a.len();
        NetworkParams::new(a, c, vec![1.0; k], vec![1.0; k], vec![1.0; k]).unwrap()
    }

    #[test]
    fn enumerate_single_class() {
        let sp = enumerate_statespace(&params1(vec![1], 2)).unwrap();
        let got: Vec<Vec<u32>> = sp.states().iter().map(|s| s.0.clone()).collect();
        assert_eq!(got, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(sp.size(), 3);
    }

    #[test]
    fn enumerate_small_heavy_class() {
        let sp = enumerate_statespace(&params1(vec![1, 20], 20)).unwrap();
        assert_eq!(sp.size(), 22);
    }

    #[test]
    fn enumerate_two_class_lex_order() {
        let sp = enumerate_statespace(&params1(vec![1, 2], 2)).unwrap();
        let got: Vec<Vec<u32>> = sp.states().iter().map(|s| s.0.clone()).collect();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![2, 0]]);
    }

    #[test]
    fn cap_error_names_bound() {
        let err = enumerate_statespace_with_cap(&params1(vec![1], 100), 10).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("10"), "error should name the bound: {msg}");
    }

    #[test]
    fn params_reject_oversized_requirement() {
        let err = NetworkParams::new(vec![3], 2, vec![1.0], vec![1.0], vec![1.0]).unwrap_err();
        assert!(err.to_string().contains("exceeds capacity"));
    }

    #[test]
    fn params_reject_stuck_class() {
        let err = NetworkParams::<f64>::new(vec![1], 2, vec![1.0], vec![0.0], vec![0.0]).unwrap_err();
        assert!(err.to_string().contains("mu + gamma"));
    }

    #[test]
    fn params_json_round_trip() {
        let p: NetworkParams<f64> = NetworkParams::new(
            vec![1, 20],
            20,
            vec![0.68, 9.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let s = p.to_json_string();
        let q: NetworkParams<f64> = NetworkParams::from_json_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn params_json_missing_key_named() {
        let err =
            NetworkParams::<f64>::from_json_str(r#"{"K":1,"A":[1],"C":2,"gamma":[1],"mu":[1]}"#)
                .unwrap_err();
        assert!(err.to_string().contains("lambda"), "{err}");
    }

    #[test]
    fn class_moment_point_mass_at_origin() {
        let sp = enumerate_statespace(&params1(vec![1], 2)).unwrap();
        let y: Distribution<f64> = Distribution::point_mass(&sp, 0).unwrap();
        assert_eq!(class_moment(&y, 0, &sp).unwrap(), 0.0);
    }

    #[test]
    fn class_moment_hand_sum() {
        let sp = enumerate_statespace(&params1(vec![1], 2)).unwrap();
        let y: Distribution<f64> = Distribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!((class_moment(&y, 0, &sp).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn class_moment_uniform_two_class() {
        let sp = enumerate_statespace(&params1(vec![1, 2], 2)).unwrap();
        let y: Distribution<f64> = Distribution::uniform(&sp);
        assert!((class_moment(&y, 0, &sp).unwrap() - 0.75).abs() < 1e-15);
        assert!((class_moment(&y, 1, &sp).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cross_moment_second_moment() {
        let sp = enumerate_statespace(&params1(vec![1], 2)).unwrap();
        let y: Distribution<f64> = Distribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!((cross_moment(&y, 0, 0, &sp).unwrap() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn cross_moment_exclusive_classes() {
        let sp = enumerate_statespace(&params1(vec![1, 20], 20)).unwrap();
        let y: Distribution<f64> = Distribution::uniform(&sp);
        assert_eq!(cross_moment(&y, 0, 1, &sp).unwrap(), 0.0);
    }

    #[test]
    fn moment_dimension_mismatch() {
        let sp = enumerate_statespace(&params1(vec![1], 2)).unwrap();
        let y: Distribution<f64> = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert!(class_moment(&y, 0, &sp).is_err());
    }

    #[test]
    fn distribution_rejects_negative_and_unnormalized() {
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![0.4, 0.4]).is_err());
        let d = Distribution::renormalized(vec![2.0, 2.0]).unwrap();
        assert_eq!(d.get(0), 0.5);
    }

    proptest! {
        // every lattice move from an enumerated state is either indexable or
        // capacity-violating; index and states invert each other
        #[test]
        fn closure_and_bijection(a1 in 1u32..4, a2 in 1u32..4, c in 1u32..12) {
            let c = c.max(a1.max(a2));
            let p = params1(vec![a1, a2], c);
            let sp = enumerate_statespace(&p).unwrap();
            for (i, s) in sp.states().iter().enumerate() {
                prop_assert_eq!(sp.index_of(s), Some(i));
                for k in 0..2 {
                    let occupied: u32 = s.0.iter().zip(p.requirements()).map(|(n, a)| n * a).sum();
                    let fits = occupied + p.requirement(k) <= c;
                    prop_assert_eq!(sp.up(k, i).is_some(), fits);
                }
            }
        }

        #[test]
        fn class_moment_bounds(c in 1u32..10) {
            let p = params1(vec![1, 2], c.max(2));
            let sp = enumerate_statespace(&p).unwrap();
            let y: Distribution<f64> = Distribution::uniform(&sp);
            for k in 0..2 {
                let m = class_moment(&y, k, &sp).unwrap();
                prop_assert!(m >= 0.0);
                prop_assert!(m <= c.max(2) as f64 / p.requirement(k) as f64 + 1e-12);
            }
        }
    }
}
