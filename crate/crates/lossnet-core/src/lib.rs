//! Analysis toolkit for symmetric multi-class loss networks with transfers:
//! product-form equilibria and their fixed-point equations, the energy
//! function φ on load space with landscape classification, the mean-field
//! ODE on the simplex with its Lyapunov function g, a large-capacity scaling
//! solver, and an event-driven N-node simulator in the exchangeable
//! compressed representation.
//!
//! The numeric core is generic over the scalar type through [`scalar::Real`]
//! (f32 or f64); the aliases at the crate root pin f64, which every shipped
//! tolerance assumes.

pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod simulator;

pub use error::{Error, Result};

/// f64 aliases for the domain types.
pub type NetworkParams64 = model::NetworkParams<f64>;
pub type Distribution64 = model::Distribution<f64>;
pub type RhoVector64 = equilibrium::RhoVector<f64>;
pub type CriticalPoint64 = equilibrium::CriticalPoint<f64>;
pub type KellyLimit64 = equilibrium::KellyLimit<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type SignatureReport64 = dynamics::SignatureReport<f64>;
pub type SimConfig64 = simulator::SimConfig<f64>;
pub type SwitchReport64 = simulator::SwitchReport<f64>;
