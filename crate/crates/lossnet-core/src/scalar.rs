//! Scalar abstraction: the numeric core is generic over `Real` (f32 or f64).

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the analysis core works with.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for embedding an f64 constant into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}

/// usize → scalar (state counts, iteration indices).
#[inline]
pub fn real_of_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize representable in scalar type")
}

/// log(a·e^x + e^y) patterns: numerically stable log(e^a + e^b).
/// Handles -inf endpoints (empty sums).
#[inline]
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Stable log Σ e^{x_i} with a max shift; returns -inf for an empty slice.
pub fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let mut hi = T::neg_infinity();
    for &x in xs {
        if x > hi {
            hi = x;
        }
    }
    if hi == T::neg_infinity() {
        return hi;
    }
    let mut acc = T::zero();
    for &x in xs {
        acc = acc + (x - hi).exp();
    }
    hi + acc.ln()
}

/// Table of ln(n!) for n = 0..=n_max, by cumulative summation.
pub fn ln_factorial_table<T: Real>(n_max: usize) -> Vec<T> {
    let mut t = Vec::with_capacity(n_max + 1);
    let mut acc = T::zero();
    t.push(acc);
    for n in 1..=n_max {
        acc = acc + real_of_usize::<T>(n).ln();
        t.push(acc);
    }
    t
}

/// Sup norm of a slice.
pub fn sup_norm<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}
