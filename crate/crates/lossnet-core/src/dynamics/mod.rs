//! Mean-field dynamics on the probability simplex over X: the vector field,
//! fixed-step RK4 integration, the entropy-like Lyapunov function g, and the
//! Hessian-signature machinery connecting the landscape of g to that of φ.

mod field;
mod lyapunov;
mod signature;

pub use field::{integrate_ode, vector_field, IntegrateOptions, Trajectory};
pub use lyapunov::{dissipation, grad_g, hessian_g, lyapunov_g};
pub use signature::{signature_crosscheck, w_matrix, Signature, SignatureReport};
