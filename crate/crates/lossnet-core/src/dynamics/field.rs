//! The mean-field vector field and its fixed-step RK4 integrator.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{Distribution, NetworkParams, StateSpace};
use crate::scalar::{real, sup_norm, Real};

use super::lyapunov::lyapunov_g;

/// Field evaluation on a raw vector (RK stage points drift slightly off the
/// simplex; the field is a polynomial and doesn't care).
pub(crate) fn vector_field_raw<T: Real>(
    y: &[T],
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Vec<T> {
    let kc = params.class_count();
    let moments: Vec<T> = (0..kc)
        .map(|k| {
            space
                .states()
                .iter()
                .enumerate()
                .map(|(i, s)| real::<T>(s.count(k) as f64) * y[i])
                .sum()
        })
        .collect();
    let mut v = vec![T::zero(); space.size()];
    for (i, s) in space.states().iter().enumerate() {
        let mut acc = T::zero();
        for k in 0..kc {
            let eff_in = params.arrival_rate(k) + params.transfer_rate(k) * moments[k];
            let out_rate = params.transfer_rate(k) + params.service_rate(k);
            let nk = real::<T>(s.count(k) as f64);
            if let Some(j) = space.down(k, i) {
                acc = acc + eff_in * y[j];
            }
            if let Some(j) = space.up(k, i) {
                acc = acc - eff_in * y[i] + out_rate * (nk + T::one()) * y[j];
            }
            acc = acc - out_rate * nk * y[i];
        }
        v[i] = acc;
    }
    v
}

/// V_n(y): per-state drift. Arrival flux runs at the effective rate
/// λ_k + γ_k⟨I_k, y⟩ (external plus transfer feedback); departures at
/// (γ_k+μ_k)·n_k. The components sum to zero.
pub fn vector_field<T: Real>(
    y: &Distribution<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
) -> Result<Vec<T>> {
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
    Ok(vector_field_raw(y.as_slice(), params, space))
}

/// Integration knobs; `output_every` records every that many steps.
#[derive(Debug, Clone)]
pub struct IntegrateOptions<T> {
    pub step: T,
    pub output_every: usize,
    /// stop as converged once sup|V| drops below this
    pub stop_tol: T,
    /// evaluate the Lyapunov function at recorded points
    pub with_g: bool,
}

impl<T: Real> Default for IntegrateOptions<T> {
    fn default() -> Self {
        Self {
            step: real(0.01),
            output_every: 10,
            stop_tol: real(1e-10),
            with_g: false,
        }
    }
}

/// Integrated trajectory: recorded times, points, optional g values, and
/// whether the stop tolerance was reached before the horizon.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub points: Vec<Distribution<T>>,
    pub g_values: Option<Vec<T>>,
    pub converged: bool,
    pub final_field_sup: T,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &Distribution<T> {
        self.points.last().expect("trajectory records at least y0")
    }

    /// CSV: column t, one column per state (header = serialized state
    /// vector), optional final column g.
    pub fn write_csv<W: Write>(&self, space: &StateSpace, mut w: W) -> std::io::Result<()> {
        write!(w, "t")?;
        for s in space.states() {
            write!(w, ",{s}")?;
        }
        if self.g_values.is_some() {
            write!(w, ",g")?;
        }
        writeln!(w)?;
        for (i, t) in self.times.iter().enumerate() {
            write!(w, "{t}")?;
            for j in 0..space.size() {
                write!(w, ",{}", self.points[i].get(j))?;
            }
            if let Some(g) = &self.g_values {
                write!(w, ",{}", g[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Classical RK4 with fixed step on the simplex. After every step negatives
/// in [−1e-12, 0) are clamped to zero and the vector is renormalized when
/// |Σy − 1| > 1e-12; a negative component beyond 1e-9 aborts with a
/// step-size error. Stops early (flagging convergence) when sup|V| falls
/// below the stop tolerance.
pub fn integrate_ode<T: Real>(
    y0: &Distribution<T>,
    params: &NetworkParams<T>,
    space: &StateSpace,
    t_max: T,
    opts: &IntegrateOptions<T>,
) -> Result<Trajectory<T>> {
    if !(opts.step > T::zero()) {
        return Err(Error::Precondition("step must be positive".into()));
    }
    if y0.len() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            got: y0.len(),
        });
    }
    let h = opts.step;
    let half = real::<T>(0.5);
    let sixth = T::one() / real::<T>(6.0);
    let two = real::<T>(2.0);
    let clamp_abort = real::<T>(1e-9);
    let renorm_tol = real::<T>(1e-12);
    let n = space.size();

    let mut y: Vec<T> = y0.as_slice().to_vec();
    let mut t = T::zero();
    let mut times = vec![t];
    let mut points = vec![y0.clone()];
    let mut g_values = if opts.with_g {
        Some(vec![lyapunov_g(y0, params, space)?])
    } else {
        None
    };

    let mut field_sup = sup_norm(&vector_field_raw(&y, params, space));
    let mut converged = field_sup < opts.stop_tol;

    let mut steps_since_output = 0usize;
    while !converged && t < t_max {
        let k1 = vector_field_raw(&y, params, space);
        let y2 = stage(&y, &k1, half * h);
        let k2 = vector_field_raw(&y2, params, space);
        let y3 = stage(&y, &k2, half * h);
        let k3 = vector_field_raw(&y3, params, space);
        let y4 = stage(&y, &k3, h);
        let k4 = vector_field_raw(&y4, params, space);

        let mut next: Vec<T> = (0..n)
            .map(|i| y[i] + h * sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]))
            .collect();

        // clamp guard: tiny negatives are roundoff, big ones mean the step
        // is too coarse
        let mut worst = T::zero();
        for v in next.iter_mut() {
            if *v < T::zero() {
                worst = worst.max(-*v);
                *v = T::zero();
            }
        }
        if worst > clamp_abort {
            return Err(Error::StepClamp {
                magnitude: worst.to_f64().unwrap(),
            });
        }
        let total: T = next.iter().copied().sum();
        if (total - T::one()).abs() > renorm_tol {
            for v in next.iter_mut() {
                *v = *v / total;
            }
        }
        y = next;
        t = t + h;

        field_sup = sup_norm(&vector_field_raw(&y, params, space));
        converged = field_sup < opts.stop_tol;

        steps_since_output += 1;
        if steps_since_output >= opts.output_every.max(1) || converged || t >= t_max {
            steps_since_output = 0;
            let point = Distribution::new(y.clone())?;
            if let Some(g) = g_values.as_mut() {
                g.push(lyapunov_g(&point, params, space)?);
            }
            times.push(t);
            points.push(point);
        }
    }

    Ok(Trajectory {
        times,
        points,
        g_values,
        converged,
        final_field_sup: field_sup,
    })
}

fn stage<T: Real>(y: &[T], dir: &[T], scale: T) -> Vec<T> {
    y.iter()
        .zip(dir.iter())
        .map(|(&a, &d)| a + scale * d)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{nu_rho, picard_solve, PicardOptions, RhoVector};
    use crate::model::enumerate_statespace;

    fn unit_params() -> NetworkParams<f64> {
        NetworkParams::new(vec![1], 1, vec![1.0], vec![1.0], vec![1.0]).unwrap()
    }

    #[test]
    fn hand_evaluated_field() {
        // K=1, A=1, C=1, all rates 1, y=(1/2, 1/2): V = (+1/4, −1/4)
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let y: Distribution<f64> = Distribution::new(vec![0.5, 0.5]).unwrap();
        let v = vector_field(&y, &p, &sp).unwrap();
        assert!((v[0] - 0.25).abs() < 1e-15);
        assert!((v[1] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn flux_conservation_on_random_distributions() {
        use rand::{Rng, SeedableRng};
        let p: NetworkParams<f64> = NetworkParams::new(vec![1, 2], 5, vec![0.7, 1.1], vec![0.4, 0.9], vec![0.8, 0.3])
            .unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let raw: Vec<f64> = (0..sp.size()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let y = Distribution::renormalized(raw).unwrap();
            let v = vector_field(&y, &p, &sp).unwrap();
            let total: f64 = v.iter().sum();
            assert!(total.abs() < 1e-13, "flux {total}");
        }
    }

    #[test]
    fn field_vanishes_at_solved_equilibrium() {
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let rho = picard_solve(
            &p,
            &RhoVector::new(vec![0.5]).unwrap(),
            &PicardOptions::default(),
        )
        .unwrap();
        let nu = nu_rho(&rho, &sp).unwrap();
        let v = vector_field(&nu, &p, &sp).unwrap();
        assert!(sup_norm(&v) < 1e-9);
    }

    #[test]
    fn equilibrium_start_stays_put_and_flags_convergence() {
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let rho = picard_solve(
            &p,
            &RhoVector::new(vec![0.5]).unwrap(),
            &PicardOptions::default(),
        )
        .unwrap();
        let nu = nu_rho(&rho, &sp).unwrap();
        let traj = integrate_ode(&nu, &p, &sp, 10.0, &IntegrateOptions::default()).unwrap();
        assert!(traj.converged);
        for pt in &traj.points {
            assert!(pt.sup_distance(&nu) < 1e-8);
        }
    }

    #[test]
    fn interior_start_converges_with_g_non_increasing() {
        let p: NetworkParams<f64> = NetworkParams::new(vec![1], 5, vec![2.0], vec![1.0], vec![1.0]).unwrap();
        let sp = enumerate_statespace(&p).unwrap();
        let y0: Distribution<f64> = Distribution::uniform(&sp);
        let traj = integrate_ode(
            &y0,
            &p,
            &sp,
            200.0,
            &IntegrateOptions {
                with_g: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(traj.converged, "sup V left at {}", traj.final_field_sup);
        let g = traj.g_values.as_ref().unwrap();
        for w in g.windows(2) {
            assert!(w[1] <= w[0] + 1e-8 * (1.0 + w[0].abs()));
        }
        // trajectory stays interior (boundary repulsion)
        for pt in &traj.points[1..] {
            let min = (0..pt.len()).map(|i| pt.get(i)).fold(f64::INFINITY, f64::min);
            assert!(min > 0.0);
        }
    }

    #[test]
    fn csv_shape() {
        let p = unit_params();
        let sp = enumerate_statespace(&p).unwrap();
        let y0: Distribution<f64> = Distribution::uniform(&sp);
        let traj = integrate_ode(&y0, &p, &sp, 0.05, &IntegrateOptions::default()).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&sp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,0,1");
        assert!(lines.next().unwrap().starts_with("0,"));
    }
}
