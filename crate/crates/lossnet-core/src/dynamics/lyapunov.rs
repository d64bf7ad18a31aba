//! The entropy-like Lyapunov function g, its gradient, the explicit Hessian,
//! and the dissipation ⟨V, ∇g⟩ in its flux form.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::model::{class_moment, Distribution, NetworkParams, StateSpace};
use crate::scalar::{ln_factorial_table, real, Real};

fn check<T: Real>(
    y: &Distribution<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<()> {
    if y.len() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            got: y.len(),
        });
    }
    if params.class_count() != space.class_count() {
        return Err(Error::DimensionMismatch {
            expected: space.class_count(),
            got: params.class_count(),
        });
    }
    Ok(())
}

fn max_count(space: &StateSpace) -> usize {
    space
        .states()
        .iter()
        .flat_map(|s| s.0.iter().copied())
        .max()
        .unwrap_or(0) as usize
}

/// Domain guard: a class with λ_k = γ_k = 0 makes the arrival-side log
/// undefined as soon as the class is populated.
fn check_class_domains<T: Real>(
    params: &NetworkParams<T>,
    moments: &[T],
) -> Result<()> {
    for (k, &m) in moments.iter().enumerate() {
        if params.arrival_rate(k) == T::zero()
            && params.transfer_rate(k) == T::zero()
            && m > T::zero()
        {
            return Err(Error::Domain(format!(
                "class {k} has lambda = gamma = 0 but positive mean occupancy; log(0) in g"
            )));
        }
    }
    Ok(())
}

/// g(y) = Σ_n y_n log(n! y_n) − Σ_k ∫₀^{⟨I_k,y⟩} log((λ_k+γ_kx)/(μ_k+γ_k)) dx,
/// with 0·log 0 = 0 on the boundary. The integral in closed form:
/// for γ_k > 0, [(λ+γu)(log((λ+γu)/(μ+γ)) − 1)/γ]₀^M; for γ_k = 0,
/// M·log(λ_k/μ_k).
pub fn lyapunov_g<T: Real>(
    y: &Distribution<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<T> {
    check(y, params, space)?;
    let kc = params.class_count();
    let moments: Vec<T> = (0..kc)
        .map(|k| class_moment(y, k, space))
        .collect::<Result<_>>()?;
    check_class_domains(params, &moments)?;

    let lnfact = ln_factorial_table::<T>(max_count(space));
    let mut entropy = T::zero();
    for (i, s) in space.states().iter().enumerate() {
        let yi = y.get(i);
        if yi > T::zero() {
            let lf: T = s.0.iter().map(|&n| lnfact[n as usize]).sum();
            entropy = entropy + yi * (lf + yi.ln());
        }
    }

    let mut integral = T::zero();
    for k in 0..kc {
        integral = integral + arrival_log_integral(params, k, moments[k]);
    }
    Ok(entropy - integral)
}

/// ∫₀^M log((λ+γx)/(μ+γ)) dx.
fn arrival_log_integral<T: Real>(params: &NetworkParams<T>, k: usize, m: T) -> T {
    let lam = params.arrival_rate(k);
    let gam = params.transfer_rate(k);
    let mu = params.service_rate(k);
    if gam > T::zero() {
        let denom = mu + gam;
        let anti = |u: T| {
            let v = lam + gam * u;
            if v > T::zero() {
                v * ((v / denom).ln() - T::one()) / gam
            } else {
                T::zero() // λ = 0 endpoint: v log v → 0
            }
        };
        anti(m) - anti(T::zero())
    } else {
        // γ = 0: flat integrand log(λ/μ); the λ=0 ∧ M>0 case is rejected by
        // the domain guard, and M=0 contributes nothing
        if m == T::zero() {
            T::zero()
        } else {
            m * (lam / mu).ln()
        }
    }
}

fn require_interior<T: Real>(y: &Distribution<T>) -> Result<()> {
    for i in 0..y.len() {
        if !(y.get(i) > T::zero()) {
            return Err(Error::InteriorRequired { index: i });
        }
    }
    Ok(())
}

/// ∂g/∂y_n = 1 + log(n! y_n) − Σ_k n_k log((λ_k+γ_k⟨I_k,y⟩)/(μ_k+γ_k)).
/// Interior only.
pub fn grad_g<T: Real>(
    y: &Distribution<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<Vec<T>> {
    check(y, params, space)?;
    require_interior(y)?;
    let kc = params.class_count();
    let moments: Vec<T> = (0..kc)
        .map(|k| class_moment(y, k, space))
        .collect::<Result<_>>()?;
    check_class_domains(params, &moments)?;
    let log_ratio: Vec<T> = (0..kc)
        .map(|k| {
            let num = params.arrival_rate(k) + params.transfer_rate(k) * moments[k];
            (num / (params.service_rate(k) + params.transfer_rate(k))).ln()
        })
        .collect();
    let lnfact = ln_factorial_table::<T>(max_count(space));
    Ok(space
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let lf: T = s.0.iter().map(|&n| lnfact[n as usize]).sum();
            let classes: T = s
                .0
                .iter()
                .enumerate()
                .map(|(k, &n)| real::<T>(n as f64) * log_ratio[k])
                .sum();
            T::one() + lf + y.get(i).ln() - classes
        })
        .collect())
}

/// Explicit Hessian of g at an interior point:
/// ∂²g/∂y_n∂y_m = 1_{n=m}/y_n − Σ_k n_k m_k γ_k/(λ_k+γ_k⟨I_k,y⟩).
pub fn hessian_g<T: Real>(
    y: &Distribution<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<SymMatrix<T>> {
    check(y, params, space)?;
    require_interior(y)?;
    let kc = params.class_count();
    let moments: Vec<T> = (0..kc)
        .map(|k| class_moment(y, k, space))
        .collect::<Result<_>>()?;
    check_class_domains(params, &moments)?;
    // class-k coupling weight γ_k/(λ_k+γ_k⟨I_k⟩); zero transfers decouple
    let weight: Vec<T> = (0..kc)
        .map(|k| {
            if params.transfer_rate(k) > T::zero() {
                params.transfer_rate(k)
                    / (params.arrival_rate(k) + params.transfer_rate(k) * moments[k])
            } else {
                T::zero()
            }
        })
        .collect();
    let n = space.size();
    let mut h = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let si = space.state(i);
            let sj = space.state(j);
            let mut v = if i == j { T::one() / y.get(i) } else { T::zero() };
            for k in 0..kc {
                v = v - real::<T>(si.count(k) as f64)
                    * real::<T>(sj.count(k) as f64)
                    * weight[k];
            }
            h.set(i, j, v);
        }
    }
    Ok(h)
}

/// Dissipation along the flow in flux form:
/// Σ_k Σ_{n: n_k ≥ 1} F_n^k·log((λ_k+γ_k⟨I_k⟩)y_{n−f_k}/((μ_k+γ_k)n_k y_n))
/// with F_n^k = (μ_k+γ_k)n_k y_n − (λ_k+γ_k⟨I_k⟩)y_{n−f_k}. Each term is
/// ≤ 0; equals ⟨V(y), ∇g(y)⟩. Interior only.
pub fn dissipation<T: Real>(
    y: &Distribution<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<T> {
    check(y, params, space)?;
    require_interior(y)?;
    let kc = params.class_count();
    let moments: Vec<T> = (0..kc)
        .map(|k| class_moment(y, k, space))
        .collect::<Result<_>>()?;
    check_class_domains(params, &moments)?;
    let mut total = T::zero();
    for k in 0..kc {
        let arrival = params.arrival_rate(k) + params.transfer_rate(k) * moments[k];
        let departure = params.service_rate(k) + params.transfer_rate(k);
        for (i, s) in space.states().iter().enumerate() {
            let nk = s.count(k);
            if nk == 0 {
                continue;
            }
            let j = space.down(k, i).expect("n_k >= 1 has a down neighbor");
            let a = departure * real::<T>(nk as f64) * y.get(i);
            let b = arrival * y.get(j);
            let flux = a - b;
            if flux != T::zero() {
                total = total + flux * (b / a).ln();
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::vector_field;
    use crate::equilibrium::{nu_rho, picard_solve, PicardOptions, RhoVector};
    use crate::model::enumerate_statespace;
    use rand::{Rng, SeedableRng};

    fn unit_params() -> NetworkParams<f64> {
        NetworkParams::new(vec![1], 1, vec![1.0], vec![1.0], vec![1.0]).unwrap()
    }

    fn random_interior(
        space: &StateSpace,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Distribution<f64> {
        let raw: Vec<f64> = (0..space.size()).map(|_| rng.gen_range(0.05..1.0)).collect();
        Distribution::renormalized(raw).unwrap()
    }

    #[test]
    fn zero_at_empty_point_mass() {
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let y: Distribution<f64> = Distribution::point_mass(&sp, 0).unwrap();
        assert_eq!(lyapunov_g(&y, &p, &sp).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_matches_quadrature_oracle() {
        // adaptive-free Simpson on a fine grid is plenty at these scales
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let lam: f64 = rng.gen_range(0.0..2.0);
            let gam: f64 = rng.gen_range(0.1..2.0);
            let mu: f64 = rng.gen_range(0.0..2.0);
            let m: f64 = rng.gen_range(0.01..4.0);
            let p: NetworkParams<f64> = NetworkParams::new(vec![1], 5, vec![lam], vec![gam], vec![mu.max(0.01)])
                .unwrap();
            let exact = arrival_log_integral(&p, 0, m);
            // Simpson with 20000 panels
            let f = |x: f64| ((lam + gam * x) / (mu.max(0.01) + gam)).ln();
            let n = 20000;
            let h = m / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let a = i as f64 * h;
                acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
            }
            assert!(
                (exact - acc).abs() < 1e-10,
                "lam={lam} gam={gam} mu={mu} m={m}: {exact} vs {acc}"
            );
        }
    }

    #[test]
    fn hand_value_on_two_state_space() {
        // K=1, A=1, C=1, rates 1, y=(1/2,1/2):
        // entropy = ln(1/2); integral = ∫₀^{1/2} ln((1+x)/2) dx
        //        = [ (1+x)(ln((1+x)/2)−1) ]₀^{0.5} = −0.2383759281177261
        // (quadrature oracle value), so g ≈ −0.4547712524422192.
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let y: Distribution<f64> = Distribution::new(vec![0.5, 0.5]).unwrap();
        let g = lyapunov_g(&y, &p, &sp).unwrap();
        assert!((g - (-0.4547712524422192)).abs() < 1e-12, "g = {g}");
    }

    #[test]
    fn domain_error_when_unreachable_class_is_populated() {
        let p: NetworkParams<f64> = NetworkParams::new(vec![1, 1], 3, vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0])
            .unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let y: Distribution<f64> = Distribution::uniform(&sp);
        assert!(matches!(
            lyapunov_g(&y, &p, &sp),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn grad_components_equal_at_equilibrium() {
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let rho = picard_solve(
            &p,
            &RhoVector::new(vec![1.0]).unwrap(),
            &PicardOptions::default(),
        )
        .unwrap();
        let nu = nu_rho(&rho, &sp).unwrap();
        let g = grad_g(&nu, &p, &sp).unwrap();
        let spread = g.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
            - g.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        assert!(spread < 1e-9, "spread {spread}");
    }

    #[test]
    fn grad_matches_finite_differences() {
        let p: NetworkParams<f64> = NetworkParams::new(vec![1, 2], 4, vec![0.6, 1.2], vec![0.8, 0.5], vec![0.7, 0.9])
            .unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let y = random_interior(&sp, &mut rng);
        let g = grad_g(&y, &p, &sp).unwrap();
        for i in 0..sp.size() {
            let h = 1e-6 * y.get(i);
            let mut up = y.as_slice().to_vec();
            let mut dn = up.clone();
            up[i] += h;
            dn[i] -= h;
            // g extends smoothly to positive vectors near the simplex;
            // evaluate without renormalizing
            let gu = lyapunov_g_unnormalized(&up, &p, &sp);
            let gd = lyapunov_g_unnormalized(&dn, &p, &sp);
            let fd = (gu - gd) / (2.0 * h);
            let rel = (g[i] - fd).abs() / g[i].abs().max(1e-8);
            assert!(rel < 1e-6, "i={i}: {} vs {}", g[i], fd);
        }
    }

    // test-only evaluation of the g formula on a raw positive vector
    fn lyapunov_g_unnormalized(y: &[f64], p: &NetworkParams<f64>, sp: &StateSpace) -> f64 {
        let kc = p.class_count();
        let moments: Vec<f64> = (0..kc)
            .map(|k| {
                sp.states()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.count(k) as f64 * y[i])
                    .sum()
            })
            .collect();
        let lnfact = ln_factorial_table::<f64>(max_count(sp));
        let mut entropy = 0.0;
        for (i, s) in sp.states().iter().enumerate() {
            if y[i] > 0.0 {
                let lf: f64 = s.0.iter().map(|&n| lnfact[n as usize]).sum();
                entropy += y[i] * (lf + y[i].ln());
            }
        }
        let mut integral = 0.0;
        for k in 0..kc {
            integral += arrival_log_integral(p, k, moments[k]);
        }
        entropy - integral
    }

    #[test]
    fn grad_component_at_origin_for_uniform() {
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let y: Distribution<f64> = Distribution::uniform(&sp);
        let g = grad_g(&y, &p, &sp).unwrap();
        assert!((g[0] - (1.0 + (0.5f64).ln())).abs() < 1e-14);
    }

    #[test]
    fn grad_rejects_boundary() {
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let y: Distribution<f64> = Distribution::point_mass(&sp, 0).unwrap();
        assert!(matches!(
            grad_g(&y, &p, &sp),
            Err(Error::InteriorRequired { .. })
        ));
    }

    // raw-coordinate gradient oracle (same formula, off-simplex evaluation)
    fn grad_g_raw(y: &[f64], p: &NetworkParams<f64>, sp: &StateSpace) -> Vec<f64> {
        let kc = p.class_count();
        let moments: Vec<f64> = (0..kc)
            .map(|k| {
                sp.states()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.count(k) as f64 * y[i])
                    .sum()
            })
            .collect();
        let lnfact = ln_factorial_table::<f64>(max_count(sp));
        sp.states()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let lf: f64 = s.0.iter().map(|&n| lnfact[n as usize]).sum();
                let classes: f64 = s
                    .0
                    .iter()
                    .enumerate()
                    .map(|(k, &n)| {
                        n as f64
                            * ((p.arrival_rate(k) + p.transfer_rate(k) * moments[k])
                                / (p.service_rate(k) + p.transfer_rate(k)))
                            .ln()
                    })
                    .sum();
                1.0 + lf + y[i].ln() - classes
            })
            .collect()
    }

    #[test]
    fn hessian_matches_finite_differences_of_grad() {
        let p: NetworkParams<f64> = NetworkParams::new(vec![1, 2], 3, vec![0.6, 1.2], vec![0.8, 0.5], vec![0.7, 0.9])
            .unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let y = random_interior(&sp, &mut rng);
        let hm = hessian_g(&y, &p, &sp).unwrap();
        let n = sp.size();
        // sanity: the raw oracle agrees with the production gradient on the simplex
        let g_prod = grad_g(&y, &p, &sp).unwrap();
        let g_raw = grad_g_raw(y.as_slice(), &p, &sp);
        for i in 0..n {
            assert!((g_prod[i] - g_raw[i]).abs() < 1e-13);
        }
        for j in 0..n {
            let h = 1e-6 * y.get(j);
            let mut up = y.as_slice().to_vec();
            let mut dn = up.clone();
            up[j] += h;
            dn[j] -= h;
            let gu = grad_g_raw(&up, &p, &sp);
            let gd = grad_g_raw(&dn, &p, &sp);
            for i in 0..n {
                let fd = (gu[i] - gd[i]) / (2.0 * h);
                let rel = (hm.get(i, j) - fd).abs() / hm.get(i, j).abs().max(1e-6);
                assert!(rel < 1e-5, "H[{i}][{j}]: {} vs {}", hm.get(i, j), fd);
            }
        }
    }

    #[test]
    fn dissipation_vanishes_at_equilibrium() {
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let rho = picard_solve(
            &p,
            &RhoVector::new(vec![1.0]).unwrap(),
            &PicardOptions::default(),
        )
        .unwrap();
        let nu = nu_rho(&rho, &sp).unwrap();
        let d = dissipation(&nu, &p, &sp).unwrap();
        assert!(d.abs() < 1e-12, "dissipation {d}");
    }

    #[test]
    fn dissipation_nonpositive_and_matches_inner_product() {
        let p: NetworkParams<f64> = NetworkParams::new(vec![1, 2], 4, vec![0.6, 1.2], vec![0.8, 0.5], vec![0.7, 0.9])
            .unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let y = random_interior(&sp, &mut rng);
            let d = dissipation(&y, &p, &sp).unwrap();
            assert!(d <= 1e-12, "dissipation must be nonpositive: {d}");
            let v = vector_field(&y, &p, &sp).unwrap();
            let g = grad_g(&y, &p, &sp).unwrap();
            let inner: f64 = v.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
            let rel = (d - inner).abs() / d.abs().max(1e-12);
            assert!(rel < 1e-10, "flux form {d} vs inner product {inner}");
        }
    }
}
