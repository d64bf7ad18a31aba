//! Named observables of the empirical state and hysteresis switch
//! detection between two metastable regimes.

use serde::{Deserialize, Serialize};

use crate::model::{Distribution, StateSpace};
use crate::scalar::{real, Real};

/// Symmetric functionals of the node ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// Fraction of nodes with no class-`class` customer (0-based class).
    ZeroClassFraction { class: usize },
    /// Mean number of class-`class` customers per node.
    MeanPerNode { class: usize },
    /// Fraction of nodes sitting exactly in the state with this
    /// lexicographic index.
    StateFraction { index: usize },
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::ZeroClassFraction { class } => format!("zero_frac_k{class}"),
            Observable::MeanPerNode { class } => format!("mean_k{class}"),
            Observable::StateFraction { index } => format!("state{index}"),
        }
    }

    pub fn eval_counts<T: Real>(&self, counts: &[u64], n_total: u64, space: &StateSpace) -> T {
        let n = real::<T>(n_total as f64);
        match *self {
            Observable::ZeroClassFraction { class } => {
                let hits: u64 = space
                    .states()
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.count(class) == 0)
                    .map(|(i, _)| counts[i])
                    .sum();
                real::<T>(hits as f64) / n
            }
            Observable::MeanPerNode { class } => {
                let total: u64 = space
                    .states()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.count(class) as u64 * counts[i])
                    .sum();
                real::<T>(total as f64) / n
            }
            Observable::StateFraction { index } => real::<T>(counts[index] as f64) / n,
        }
    }

    /// The same functional of a probability vector; used to predict
    /// plateau levels from equilibria.
    pub fn eval_distribution<T: Real>(&self, y: &Distribution<T>, space: &StateSpace) -> T {
        match *self {
            Observable::ZeroClassFraction { class } => space
                .states()
                .iter()
                .enumerate()
                .filter(|(_, s)| s.count(class) == 0)
                .map(|(i, _)| y.get(i))
                .sum(),
            Observable::MeanPerNode { class } => space
                .states()
                .iter()
                .enumerate()
                .map(|(i, s)| real::<T>(s.count(class) as f64) * y.get(i))
                .sum(),
            Observable::StateFraction { index } => y.get(index),
        }
    }
}

/// Which observable switches regimes and where the hysteresis band sits.
#[derive(Debug, Clone)]
pub struct SwitchSpec<T> {
    /// index into the config's observable list
    pub observable: usize,
    pub theta_lo: T,
    pub theta_hi: T,
}

/// Crossing direction: entering the upper or lower regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

/// Regime changes found by hysteresis detection: a crossing fires only when
/// the observable passes the *far* threshold of the band, so consecutive
/// crossings always alternate.
#[derive(Debug, Clone, Serialize)]
pub struct SwitchReport<T> {
    pub crossings: Vec<(T, Direction)>,
    pub dwell_times: Vec<T>,
    /// empirical plateau means (low regime, high regime), present once both
    /// regimes have been visited
    pub levels: Option<(T, T)>,
}

impl<T: Real> SwitchReport<T> {
    pub fn empty() -> Self {
        Self {
            crossings: Vec::new(),
            dwell_times: Vec::new(),
            levels: None,
        }
    }
}

/// Streaming hysteresis detector fed with sampled observable values.
#[derive(Debug, Clone)]
pub struct SwitchDetector<T> {
    theta_lo: T,
    theta_hi: T,
    regime_high: Option<bool>,
    crossings: Vec<(T, Direction)>,
    low_sum: T,
    low_n: u64,
    high_sum: T,
    high_n: u64,
}

impl<T: Real> SwitchDetector<T> {
    pub fn new(theta_lo: T, theta_hi: T) -> Self {
        Self {
            theta_lo,
            theta_hi,
            regime_high: None,
            crossings: Vec::new(),
            low_sum: T::zero(),
            low_n: 0,
            high_sum: T::zero(),
            high_n: 0,
        }
    }

    pub fn observe(&mut self, t: T, value: T) {
        match self.regime_high {
            Some(true) => {
                if value < self.theta_lo {
                    self.regime_high = Some(false);
                    self.crossings.push((t, Direction::Down));
                }
            }
            Some(false) => {
                if value > self.theta_hi {
                    self.regime_high = Some(true);
                    self.crossings.push((t, Direction::Up));
                }
            }
            None => {
                if value > self.theta_hi {
                    self.regime_high = Some(true);
                    self.crossings.push((t, Direction::Up));
                } else if value < self.theta_lo {
                    self.regime_high = Some(false);
                    self.crossings.push((t, Direction::Down));
                }
            }
        }
        match self.regime_high {
            Some(true) => {
                self.high_sum = self.high_sum + value;
                self.high_n += 1;
            }
            Some(false) => {
                self.low_sum = self.low_sum + value;
                self.low_n += 1;
            }
            None => {}
        }
    }

    pub fn finish(self) -> SwitchReport<T> {
        let dwell_times = self
            .crossings
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .collect();
        let levels = if self.low_n > 0 && self.high_n > 0 {
            Some((
                self.low_sum / real::<T>(self.low_n as f64),
                self.high_sum / real::<T>(self.high_n as f64),
            ))
        } else {
            None
        };
        SwitchReport {
            crossings: self.crossings,
            dwell_times,
            levels,
        }
    }
}
