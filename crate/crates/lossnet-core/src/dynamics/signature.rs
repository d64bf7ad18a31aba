//! Hessian-signature machinery tying the landscape of g on the simplex to
//! the landscape of φ on load space: the rate-scaled covariance matrix W,
//! and a three-way signature comparison at critical points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{project_symmetric, simplex_tangent_basis, SymMatrix};
use crate::model::{class_moment, cross_moment, NetworkParams, StateSpace};
use crate::scalar::{real, sup_norm, Real};

use crate::equilibrium::{grad_phi, hessian_phi, nu_rho, RhoVector};

use super::lyapunov::hessian_g;

/// Inertia counts of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub degenerate: usize,
}

fn signature_with_relative_cutoff<T: Real>(eigenvalues: &[T], rel: f64) -> Signature {
    let delta = real::<T>(rel) * sup_norm(eigenvalues);
    let mut sig = Signature {
        positive: 0,
        negative: 0,
        degenerate: 0,
    };
    for &e in eigenvalues {
        if e.abs() <= delta {
            sig.degenerate += 1;
        } else if e > T::zero() {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
    }
    sig
}

/// Raw-sign inertia. The projected Hessian of g is strongly graded (entries
/// ~1/ν_ρ(n)), so a cutoff relative to the largest eigenvalue would swallow
/// the O(1) sign-carrying eigenvalues; Jacobi keeps their signs accurate and
/// degeneracy authority rests with the well-scaled I−W and φ sides.
fn signature_raw_signs<T: Real>(eigenvalues: &[T]) -> Signature {
    let mut sig = Signature {
        positive: 0,
        negative: 0,
        degenerate: 0,
    };
    for &e in eigenvalues {
        if e == T::zero() {
            sig.degenerate += 1;
        } else if e > T::zero() {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
    }
    sig
}

/// Three views of the local landscape at a critical load ρ.
#[derive(Debug, Clone)]
pub struct SignatureReport<T> {
    /// eigenvalues of W^{ν_ρ} (ascending)
    pub w_eigenvalues: Vec<T>,
    /// signature of I − W^{ν_ρ}
    pub iw_signature: Signature,
    /// signature of the Hessian of φ at ρ
    pub phi_signature: Signature,
    /// signature of the Hessian of g at ν_ρ restricted to {h : Σ h_n = 0}
    pub g_signature: Signature,
    pub consistent: bool,
}

/// W^y at y = ν_ρ: entry (k,l) is
/// sqrt(γ_kγ_l/((λ_k+γ_k⟨I_k⟩)(λ_l+γ_l⟨I_l⟩)))·Cov(n_k, n_l),
/// a rate-scaled covariance of the class counts. Symmetric PSD.
pub fn w_matrix<T: Real>(
    rho: &RhoVector<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<SymMatrix<T>> {
    let kc = params.class_count();
    let y = nu_rho(rho, space)?;
    let means: Vec<T> = (0..kc)
        .map(|k| class_moment(&y, k, space))
        .collect::<Result<_>>()?;
    let scale: Vec<T> = (0..kc)
        .map(|k| {
            let denom = params.arrival_rate(k) + params.transfer_rate(k) * means[k];
            (params.transfer_rate(k) / denom).sqrt()
        })
        .collect();
    let mut w = SymMatrix::zeros(kc);
    for k in 0..kc {
        for l in k..kc {
            let cov = cross_moment(&y, k, l, space)? - means[k] * means[l];
            w.set(k, l, scale[k] * scale[l] * cov);
        }
    }
    Ok(w)
}

/// At a critical ρ (sup‖∇φ‖ < 1e-8 required), computes
/// (i) the spectrum of I − W^{ν_ρ},
/// (ii) the signature of the φ-Hessian,
/// (iii) the directly projected tangent-space signature of the g-Hessian,
/// and checks that the negative/degenerate counts agree across all three
/// and positive counts agree between the two K-dimensional views (the
/// g side fills its remaining |X|−1−K directions with positives).
pub fn signature_crosscheck<T: Real>(
    rho: &RhoVector<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<SignatureReport<T>> {
    let grad = grad_phi(rho, params)?;
    let gn = sup_norm(&grad);
    if gn >= real::<T>(1e-8) {
        return Err(Error::Precondition(format!(
            "signature crosscheck requires a critical point; sup-norm of grad phi is {gn:e}"
        )));
    }

    let w = w_matrix(rho, params, space)?;
    let w_eigenvalues = w.jacobi_eigenvalues();
    let iw_eigenvalues: Vec<T> = w_eigenvalues.iter().map(|&e| T::one() - e).collect();
    let iw_signature = signature_with_relative_cutoff(&iw_eigenvalues, 1e-8);

    let phi_eigenvalues = hessian_phi(rho, params)?.jacobi_eigenvalues();
    let phi_signature = signature_with_relative_cutoff(&phi_eigenvalues, 1e-8);

    let y = nu_rho(rho, space)?;
    let hg = hessian_g(&y, params, space)?;
    let basis = simplex_tangent_basis::<T>(space.size());
    let projected = project_symmetric(&hg, &basis);
    let g_eigenvalues = projected.jacobi_eigenvalues();
    let g_signature = signature_raw_signs(&g_eigenvalues);

    let tangent_dim = space.size() - 1;
    let consistent = iw_signature == phi_signature
        && g_signature.negative == phi_signature.negative
        && g_signature.degenerate == phi_signature.degenerate
        && g_signature.positive == tangent_dim - g_signature.negative - g_signature.degenerate;

    Ok(SignatureReport {
        w_eigenvalues,
        iw_signature,
        phi_signature,
        g_signature,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{
        find_all_critical_points, picard_solve, PicardOptions, StabilityLabel,
    };
    use crate::model::enumerate_statespace;

    #[test]
    fn w_vanishes_for_degenerate_product_law() {
        // rho -> 0: nu concentrates at the empty state, variance 0
        let p: NetworkParams<f64> = NetworkParams::new(vec![1], 3, vec![1.0], vec![1.0], vec![1.0]).unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let rho: RhoVector<f64> = RhoVector::new(vec![1e-14]).unwrap();
        let w = w_matrix(&rho, &p, &sp).unwrap();
        assert!(w.get(0, 0).abs() < 1e-10);
    }

    #[test]
    fn w_symmetric_positive_semidefinite() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let p: NetworkParams<f64> = NetworkParams::new(
                vec![1, 2],
                6,
                vec![rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)],
                vec![rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)],
                vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)],
            )
            .unwrap();
            let sp = enumerate_statespace(&p).unwrap();
            let rho: RhoVector<f64> = RhoVector::new(vec![
                rng.gen_range(0.1..4.0),
                rng.gen_range(0.1..2.0),
            ])
            .unwrap();
            let w = w_matrix(&rho, &p, &sp).unwrap();
            assert!((w.get(0, 1) - w.get(1, 0)).abs() < 1e-15);
            for e in w.jacobi_eigenvalues() {
                assert!(e > -1e-12, "PSD violated: {e}");
            }
        }
    }

    #[test]
    fn single_class_point_has_expected_counts() {
        let p: NetworkParams<f64> = NetworkParams::new(vec![1], 4, vec![1.5], vec![1.0], vec![1.0]).unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let rho = picard_solve(
            &p,
            &RhoVector::new(vec![1.0]).unwrap(),
            &PicardOptions::default(),
        )
        .unwrap();
        let rep = signature_crosscheck(&rho, &p, &sp).unwrap();
        assert!(rep.consistent);
        assert_eq!(rep.phi_signature.positive, 1);
        assert_eq!(rep.g_signature.positive, sp.size() - 1);
        assert_eq!(rep.g_signature.negative, 0);
    }

    #[test]
    fn bistable_instance_consistent_at_minima_and_saddle() {
        let p: NetworkParams<f64> = NetworkParams::new(
            vec![1, 20],
            20,
            vec![0.68, 9.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let search = find_all_critical_points(&p, 7).unwrap();
        assert!(search.points.len() >= 3);
        let mut saw_saddle = false;
        for pt in &search.points {
            let rep = signature_crosscheck(&pt.rho, &p, &sp).unwrap();
            assert!(
                rep.consistent,
                "inconsistent at {:?}: {:?} {:?} {:?}",
                pt.rho, rep.iw_signature, rep.phi_signature, rep.g_signature
            );
            match pt.label {
                StabilityLabel::Minimum => {
                    assert_eq!(rep.phi_signature.negative, 0);
                    // every eigenvalue of W sits strictly inside (0,1) at a
                    // stable point up to exact zeros of the covariance
                    for &e in &rep.w_eigenvalues {
                        assert!(e < 1.0 && e > -1e-12);
                    }
                }
                StabilityLabel::Saddle => {
                    saw_saddle = true;
                    assert_eq!(rep.phi_signature.negative, 1);
                    assert!(rep.w_eigenvalues.iter().any(|&e| e > 1.0));
                }
                _ => {}
            }
        }
        assert!(saw_saddle);
    }

    #[test]
    fn crosscheck_rejects_non_critical_points() {
        let p: NetworkParams<f64> = NetworkParams::new(vec![1], 4, vec![1.5], vec![1.0], vec![1.0]).unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let rho: RhoVector<f64> = RhoVector::new(vec![0.123]).unwrap();
        assert!(matches!(
            signature_crosscheck(&rho, &p, &sp),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn scaled_form_cross_check() {
        // the √y change of variable turns the projected g-Hessian into
        // I − Σ v v^T on {h : Σ √y h = 0}; its signature must match the
        // directly projected one (congruence)
        let p: NetworkParams<f64> = NetworkParams::new(
            vec![1, 20],
            20,
            vec![0.68, 9.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let search = find_all_critical_points(&p, 7).unwrap();
        for pt in &search.points {
            let rep = signature_crosscheck(&pt.rho, &p, &sp).unwrap();
            // scaled route: negative count = #{eig W > 1}
            let neg_scaled = rep.w_eigenvalues.iter().filter(|&&e| e > 1.0).count();
            assert_eq!(rep.g_signature.negative, neg_scaled);
        }
    }
}
