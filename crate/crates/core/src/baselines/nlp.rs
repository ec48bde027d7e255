//! Log-barrier nonlinear method on the original problem with a
//! softmax-smoothed min-max objective, finite-difference gradients, and
//! multistart. Local and occasionally wobbly, as direct methods on
//! this constraint set tend to be; kept as a comparison baseline.

use std::time::Instant;

use ndarray::{Array1, Array2};
use ndarray_linalg::cholesky::{CholeskyFactorized, FactorizeC, SolveC, UPLO};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use crate::channel::{self, Deployment, Environment, SystemConfig, UavPlacement};
use crate::feasibility;
use crate::planner::{IterationRecord, Solution};

use super::{decision_bounds, BaselineError};

/// Problems up to this dimension get damped Newton steps with
/// finite-difference Hessians; larger ones fall back to gradient
/// descent (the barrier valley makes pure descent slow but the large-K
/// baseline is only compared qualitatively).
const NEWTON_DIM_LIMIT: usize = 16;

/// Settings of the nonlinear barrier baseline.
#[derive(Debug, Clone)]
pub struct NlpConfig {
    /// Barrier stages; the barrier weight grows tenfold per stage and
    /// the softmax temperature shrinks tenfold.
    pub stages: usize,
    pub max_inner_iterations: usize,
    /// Inner loop ends when the step size falls below this fraction of
    /// the unit box.
    pub step_tol: f64,
    /// Random starts; the best final point wins.
    pub multistart: usize,
    pub seed: u64,
}

impl Default for NlpConfig {
    fn default() -> Self {
        NlpConfig {
            stages: 7,
            max_inner_iterations: 200,
            step_tol: 1e-9,
            multistart: 8,
            seed: 0,
        }
    }
}

struct Problem<'a> {
    deployment: &'a Deployment,
    env: &'a Environment,
    cfg: &'a SystemConfig,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn dim(&self) -> usize {
        4 + self.deployment.len()
    }

    fn denormalize(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .enumerate()
            .map(|(i, zi)| self.lower[i] + zi * (self.upper[i] - self.lower[i]))
            .collect()
    }

    /// Exact constraint values g <= 0: per-device SINR shortfalls and
    /// per-device footprint angles.
    fn constraints(&self, v: &[f64]) -> Vec<f64> {
        let k = self.deployment.len();
        let placement = UavPlacement { x: v[0], y: v[1], h: v[2], theta_b: v[3] };
        let powers = &v[4..4 + k];
        let gammas = channel::sinr_unchecked(&placement, self.deployment, self.env, self.cfg, powers)
            .expect("length checked");
        let mut g = Vec::with_capacity(2 * k);
        for gamma in gammas {
            g.push((self.cfg.gamma0 - gamma) / self.cfg.gamma0);
        }
        for i in 0..k {
            let r = channel::ground_distance(&placement, i, self.deployment).expect("valid index");
            g.push((2.0 * (r / placement.h).atan() - placement.theta_b) / self.cfg.theta0);
        }
        g
    }

    /// Softmax-smoothed worst-case average energy, in watts.
    fn smoothed_objective(&self, v: &[f64], temperature: f64) -> f64 {
        let k = self.deployment.len();
        let mut zmax = f64::NEG_INFINITY;
        let energies: Vec<f64> = (0..k)
            .map(|i| {
                let e = self.deployment.activation[i] * v[4 + i];
                if e > zmax {
                    zmax = e;
                }
                e
            })
            .collect();
        let s: f64 = energies.iter().map(|e| ((e - zmax) / temperature).exp()).sum();
        zmax + temperature * s.ln()
    }

    /// Barrier-augmented merit in normalized coordinates; +inf outside
    /// the domain.
    fn merit(&self, z: &[f64], t: f64, temperature: f64) -> f64 {
        for zi in z {
            if !(*zi > 0.0 && *zi < 1.0) {
                return f64::INFINITY;
            }
        }
        let v = self.denormalize(z);
        let mut val = t * self.smoothed_objective(&v, temperature);
        for g in self.constraints(&v) {
            if g >= 0.0 {
                return f64::INFINITY;
            }
            val -= (-g).ln();
        }
        for zi in z {
            val -= zi.ln() + (1.0 - zi).ln();
        }
        val
    }
}

/// Damped-Newton direction from a finite-difference Hessian of the
/// merit. Returns None when the factorization fails even with a ridge.
fn fd_newton_direction(
    problem: &Problem<'_>,
    z: &[f64],
    t: f64,
    temperature: f64,
    grad: &[f64],
) -> Option<Vec<f64>> {
    let dim = z.len();
    let h = 1e-5;
    // Hessian columns from central differences of the FD gradient.
    let grad_at = |zz: &[f64]| -> Option<Vec<f64>> {
        let base = problem.merit(zz, t, temperature);
        if !base.is_finite() {
            return None;
        }
        let mut g = vec![0.0; dim];
        for i in 0..dim {
            let mut zp = zz.to_vec();
            let mut zm = zz.to_vec();
            zp[i] = (zz[i] + h).min(1.0 - 1e-12);
            zm[i] = (zz[i] - h).max(1e-12);
            let fp = problem.merit(&zp, t, temperature);
            let fm = problem.merit(&zm, t, temperature);
            g[i] = if fp.is_finite() && fm.is_finite() {
                (fp - fm) / (zp[i] - zm[i])
            } else if fp.is_finite() {
                (fp - base) / (zp[i] - zz[i])
            } else if fm.is_finite() {
                (base - fm) / (zz[i] - zm[i])
            } else {
                0.0
            };
        }
        Some(g)
    };
    let mut hess = Array2::<f64>::zeros((dim, dim));
    for i in 0..dim {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[i] = (z[i] + h).min(1.0 - 1e-12);
        zm[i] = (z[i] - h).max(1e-12);
        let gp = grad_at(&zp)?;
        let gm = grad_at(&zm)?;
        let denom = zp[i] - zm[i];
        for j in 0..dim {
            hess[[i, j]] += 0.5 * (gp[j] - gm[j]) / denom;
            hess[[j, i]] += 0.5 * (gp[j] - gm[j]) / denom;
        }
    }
    let scale = (0..dim).map(|i| hess[[i, i]].abs()).fold(0.0f64, f64::max).max(1.0);
    let mut ridge = scale * 1e-10;
    for _ in 0..8 {
        let mut a = hess.clone();
        for i in 0..dim {
            a[[i, i]] += ridge;
        }
        if let Ok(f) = a.factorizec(UPLO::Lower) {
            let b = Array1::from_iter(grad.iter().map(|g| -g));
            if let Ok(d) = <CholeskyFactorized<_> as SolveC<f64>>::solvec(&f, &b) {
                let d = d.to_vec();
                if d.iter().all(|v| v.is_finite()) {
                    return Some(d);
                }
            }
        }
        ridge *= 100.0;
    }
    None
}

/// Solve the original problem with the smoothed barrier method.
pub fn solve_nlp_ipm(
    deployment: &Deployment,
    env: &Environment,
    cfg: &SystemConfig,
    nlp: &NlpConfig,
) -> Result<Solution, BaselineError> {
    let started = Instant::now();
    let (lower, upper) = decision_bounds(deployment, cfg);
    let problem = Problem { deployment, env, cfg, lower, upper };
    let dim = problem.dim();
    let mut rng = ChaCha20Rng::seed_from_u64(nlp.seed);

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut trace = Vec::new();
    let mut total_inner = 0usize;

    for start in 0..nlp.multistart {
        // Rejection-sample a strictly feasible normalized start.
        let mut z0 = None;
        for _ in 0..200 {
            let cand: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..0.95)).collect();
            let v = problem.denormalize(&cand);
            if problem.constraints(&v).iter().all(|g| *g < -1e-9) {
                z0 = Some(cand);
                break;
            }
        }
        let Some(mut z) = z0 else { continue };

        let max_c = deployment.max_activation();
        let mut temperature = 0.1 * cfg.p_max * max_c;
        let mut t = 1.0;
        for _stage in 0..nlp.stages {
            let mut step = 0.1;
            for _ in 0..nlp.max_inner_iterations {
                total_inner += 1;
                let base = problem.merit(&z, t, temperature);
                // Central finite-difference gradient in z, falling back
                // to one-sided differences when a probe leaves the
                // barrier domain.
                let h = 1e-7;
                let mut grad = vec![0.0; dim];
                for i in 0..dim {
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    zp[i] = (z[i] + h).min(1.0 - 1e-12);
                    zm[i] = (z[i] - h).max(1e-12);
                    let fp = problem.merit(&zp, t, temperature);
                    let fm = problem.merit(&zm, t, temperature);
                    grad[i] = if fp.is_finite() && fm.is_finite() {
                        (fp - fm) / (zp[i] - zm[i])
                    } else if fp.is_finite() {
                        (fp - base) / (zp[i] - z[i])
                    } else if fm.is_finite() {
                        (base - fm) / (z[i] - zm[i])
                    } else {
                        0.0
                    };
                }
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if !(norm > 0.0) || !norm.is_finite() {
                    break;
                }
                let direction = if dim <= NEWTON_DIM_LIMIT {
                    fd_newton_direction(&problem, &z, t, temperature, &grad)
                        .unwrap_or_else(|| grad.iter().map(|g| -g / norm).collect())
                } else {
                    grad.iter().map(|g| -g / norm).collect::<Vec<f64>>()
                };
                // Backtracking along the chosen descent direction.
                let slope: f64 = grad.iter().zip(&direction).map(|(g, d)| g * d).sum();
                if !(slope < 0.0) {
                    break;
                }
                let mut alpha = if dim <= NEWTON_DIM_LIMIT { 1.0 } else { step };
                let mut moved = false;
                for _ in 0..60 {
                    let trial: Vec<f64> =
                        z.iter().zip(&direction).map(|(zi, d)| zi + alpha * d).collect();
                    let val = problem.merit(&trial, t, temperature);
                    if val.is_finite() && val <= base + 0.01 * alpha * slope {
                        z = trial;
                        step = (alpha * 2.0).min(0.1);
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                let dir_norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
                if !moved || alpha * dir_norm < nlp.step_tol {
                    break;
                }
            }
            t *= 10.0;
            temperature /= 10.0;
        }

        let v = problem.denormalize(&z);
        if problem.constraints(&v).iter().all(|g| *g <= 0.0) {
            let objective = Solution::objective_from_powers(deployment, &v[4..]);
            trace.push(IterationRecord {
                iteration: start + 1,
                t_after_p11_w: f64::NAN,
                t_w: objective,
                p11_seconds: 0.0,
                p12_seconds: 0.0,
            });
            if best.as_ref().map_or(true, |(_, obj)| objective < *obj) {
                best = Some((v, objective));
            }
        }
    }

    let (v, objective_w) = best.ok_or(BaselineError::NoFeasiblePoint)?;
    let k = deployment.len();
    Ok(Solution {
        placement: UavPlacement { x: v[0], y: v[1], h: v[2], theta_b: v[3] },
        powers: v[4..4 + k].to_vec(),
        objective_w,
        trace,
        tan_fit: None,
        feasibility: feasibility::max_feasible_sinr(deployment, cfg),
        converged: total_inner > 0,
        p13_seconds: 0.0,
        total_seconds: started.elapsed().as_secs_f64(),
    })
}

// ===========================================================================
// Tests
// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{antenna_gain, avg_channel_gain, Environment};
    use crate::feasibility::verify_solution;

    fn dense_urban() -> Environment {
        Environment::preset("dense_urban").unwrap()
    }

    #[test]
    fn single_device_matches_closed_form() {
        let env = dense_urban();
        let mut cfg = SystemConfig::default();
        cfg.sigma2 = 1e-6;
        let dep = crate::scenario::random_deployment(1, 20.0, 17).unwrap();
        let (x, y) = dep.positions[0];
        let overhead = UavPlacement { x, y, h: cfg.h_min, theta_b: cfg.theta0 };
        let gain = avg_channel_gain(&overhead, 0, &dep, &env, &cfg).unwrap();
        let p_star = cfg.gamma0 * cfg.sigma2 / (antenna_gain(cfg.theta0) * gain);
        let c_star = dep.activation[0] * p_star;
        let sol = solve_nlp_ipm(&dep, &env, &cfg, &NlpConfig::default()).unwrap();
        let rel = (sol.objective_w - c_star) / c_star;
        assert!(rel.abs() <= 0.01, "objective off closed form by {rel}");
    }

    #[test]
    fn symmetric_pair_near_equal_powers() {
        let env = dense_urban();
        let mut cfg = SystemConfig::default();
        cfg.sigma2 = 1e-6;
        let dep =
            Deployment::new(vec![(10.0, 0.0), (-10.0, 0.0)], vec![0.3, 0.3]).unwrap();
        let sol = solve_nlp_ipm(&dep, &env, &cfg, &NlpConfig::default()).unwrap();
        assert!(
            ((sol.powers[0] - sol.powers[1]) / cfg.p_max).abs() <= 1e-3,
            "powers {:?}",
            sol.powers
        );
    }

    #[test]
    fn returned_solution_is_feasible() {
        let env = dense_urban();
        let cfg = SystemConfig::default();
        let dep = crate::scenario::random_deployment(4, 20.0, 23).unwrap();
        let sol = solve_nlp_ipm(&dep, &env, &cfg, &NlpConfig::default()).unwrap();
        let slacks = verify_solution(&sol.placement, &sol.powers, &dep, &env, &cfg);
        assert!(slacks.feasible, "min slack {}", slacks.min_normalized_slack);
    }

    #[test]
    fn deterministic_given_seed() {
        let env = dense_urban();
        let cfg = SystemConfig::default();
        let dep = crate::scenario::random_deployment(3, 20.0, 29).unwrap();
        let nlp = NlpConfig { multistart: 4, ..NlpConfig::default() };
        let a = solve_nlp_ipm(&dep, &env, &cfg, &nlp).unwrap();
        let b = solve_nlp_ipm(&dep, &env, &cfg, &nlp).unwrap();
        assert_eq!(a.objective_w.to_bits(), b.objective_w.to_bits());
    }
}
