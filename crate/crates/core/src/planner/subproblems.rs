//! Builders for the three sub-problems of the alternating planner.
//!
//! The two GPs replace the average channel gain with the separable
//! surrogate (r h)^(-alpha/2) delta and, in the position problem, the
//! coordinate offsets |x_k - x_uav| with AM-GM relaxations, exactly as
//! the alternating scheme prescribes. The final LP uses the exact
//! channel model.

use crate::channel::{
    antenna_gain, avg_channel_gain, gain_bound_delta, ground_distance, Deployment, Environment,
    SystemConfig, UavPlacement, MAIN_LOBE_GAIN_NUMERATOR,
};
use crate::gp::{GpProblem, LpProblem, Monomial, Posynomial, VarId};

use super::{PlannerError, TanFit};

/// Ground distances below this fraction of the disk radius are floored
/// before entering surrogate coefficients: the separable gain bound
/// diverges as r -> 0, which the exact model does not.
pub(crate) const R_FLOOR_FRACTION: f64 = 1e-3;

/// Variable handles of the height/beamwidth GP.
#[derive(Debug, Clone)]
pub struct P11Vars {
    pub h: VarId,
    pub theta_b: VarId,
    pub t: VarId,
    pub p: Vec<VarId>,
    pub u: Vec<VarId>,
}

/// Variable handles of the horizontal-position GP.
#[derive(Debug, Clone)]
pub struct P12Vars {
    pub x_uav: VarId,
    pub y_uav: VarId,
    pub t: VarId,
    pub x_abs: Vec<VarId>,
    pub y_abs: Vec<VarId>,
    pub p: Vec<VarId>,
    pub u: Vec<VarId>,
    /// Origin shift applied to all coordinates (add to go into problem
    /// space, subtract to come back).
    pub shift: (f64, f64),
}

/// Column scaling of the power LP.
#[derive(Debug, Clone)]
pub struct P13Scale {
    pub power: f64,
    pub objective: f64,
}

fn floored_distances(
    deployment: &Deployment,
    cfg: &SystemConfig,
    x_uav: f64,
    y_uav: f64,
) -> Vec<f64> {
    let floor = R_FLOOR_FRACTION * cfg.r_disk;
    deployment
        .positions
        .iter()
        .map(|&(x, y)| ((x - x_uav).powi(2) + (y - y_uav).powi(2)).sqrt().max(floor))
        .collect()
}

#[cfg(test)]
pub(crate) fn floored_distances_for_test(
    deployment: &Deployment,
    cfg: &SystemConfig,
    x_uav: f64,
    y_uav: f64,
) -> Vec<f64> {
    floored_distances(deployment, cfg, x_uav, y_uav)
}

/// Height/beamwidth/power GP at fixed horizontal position.
///
/// Variables {h, theta_B, t, p_k, u_k}; constraints: K epigraph rows,
/// 2K power boxes, the height and beamwidth floors, the fitted
/// footprint row, K SINR surrogates and K gain-bound rows — 5K+3 in
/// total with K^2+4K+3 monomial terms.
pub fn build_p11(
    deployment: &Deployment,
    env: &Environment,
    cfg: &SystemConfig,
    x_uav: f64,
    y_uav: f64,
    fit: &TanFit,
) -> (GpProblem, P11Vars) {
    let k = deployment.len();
    let r = floored_distances(deployment, cfg, x_uav, y_uav);
    let max_r = r.iter().cloned().fold(0.0f64, f64::max);
    let delta = gain_bound_delta(env, cfg);
    let a2 = cfg.alpha / 2.0;

    // Data-driven cold-start inits; also used as variable scales.
    let h_lo = cfg.h_min * 1.05;
    let h_hi = cfg.h_max * 0.95;
    let h_kink = max_r / (cfg.theta0 / 2.0).tan();
    let h0 = if h_lo < h_hi { h_kink.clamp(h_lo, h_hi) } else { 0.5 * (cfg.h_min + cfg.h_max) };
    let theta_cap = std::f64::consts::PI * 0.99;
    let theta_fp = (max_r / (fit.q1 * h0)).powf(1.0 / fit.q2);
    let theta0_init = (1.25 * cfg.theta0.max(theta_fp)).min(theta_cap);
    let p0 = (cfg.p_min * cfg.p_max).sqrt();
    let t0 = 1.5 * deployment.max_activation() * p0;

    let mut gp = GpProblem::new();
    let h = gp.add_var("h", h0, None, Some(cfg.h_max));
    let theta_b = gp.add_var("theta_b", theta0_init, None, Some(std::f64::consts::PI * 0.999));
    let t = gp.add_var("t", t0, None, None);
    let p: Vec<VarId> = (0..k).map(|i| gp.add_var(format!("p{i}"), p0, None, None)).collect();
    let u: Vec<VarId> = (0..k)
        .map(|i| {
            let u0 = 1.3 * (r[i] * h0).powf(a2) / delta;
            gp.add_var(format!("u{i}"), u0, None, None)
        })
        .collect();

    gp.set_objective(Posynomial::from_monomial(Monomial::new(1.0).pow(t, 1.0)));

    // epigraph c_i p_i / t <= 1
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(deployment.activation[i]).pow(p[i], 1.0).pow(t, -1.0),
        ));
    }
    // power boxes
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(Monomial::new(cfg.p_min).pow(p[i], -1.0)));
    }
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(1.0 / cfg.p_max).pow(p[i], 1.0),
        ));
    }
    // h_min / h <= 1
    gp.add_constraint(Posynomial::from_monomial(Monomial::new(cfg.h_min).pow(h, -1.0)));
    // theta0 / theta_B <= 1
    gp.add_constraint(Posynomial::from_monomial(Monomial::new(cfg.theta0).pow(theta_b, -1.0)));
    // fitted footprint: (max_r / q1) h^-1 theta_B^-q2 <= 1
    gp.add_constraint(Posynomial::from_monomial(
        Monomial::new(max_r / fit.q1).pow(h, -1.0).pow(theta_b, -fit.q2),
    ));
    // SINR surrogate rows
    for i in 0..k {
        let mut terms = Vec::with_capacity(k);
        for j in 0..k {
            if j != i {
                let coeff = cfg.gamma0 * delta * deployment.activation[j] * r[j].powf(-a2);
                terms.push(
                    Monomial::new(coeff)
                        .pow(h, -a2)
                        .pow(p[j], 1.0)
                        .pow(p[i], -1.0)
                        .pow(u[i], 1.0),
                );
            }
        }
        let noise = cfg.gamma0 * cfg.sigma2 / MAIN_LOBE_GAIN_NUMERATOR;
        terms.push(Monomial::new(noise).pow(theta_b, 2.0).pow(p[i], -1.0).pow(u[i], 1.0));
        gp.add_constraint(Posynomial::new(terms));
    }
    // gain-bound rows: (r_i^{a/2} / delta) h^{a/2} u_i^-1 <= 1
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(r[i].powf(a2) / delta).pow(h, a2).pow(u[i], -1.0),
        ));
    }

    (gp, P11Vars { h, theta_b, t, p, u })
}

/// Independent evaluation of the SINR-surrogate row of the
/// height/beamwidth GP, for cross-checking the built constraint.
#[allow(clippy::too_many_arguments)]
pub fn omega_reference(
    deployment: &Deployment,
    env: &Environment,
    cfg: &SystemConfig,
    r: &[f64],
    i: usize,
    h: f64,
    theta_b: f64,
    p: &[f64],
    u_i: f64,
) -> f64 {
    let delta = gain_bound_delta(env, cfg);
    let a2 = cfg.alpha / 2.0;
    let mut s = 0.0;
    for j in 0..deployment.len() {
        if j != i {
            s += deployment.activation[j] * p[j] * r[j].powf(-a2);
        }
    }
    let g3 = MAIN_LOBE_GAIN_NUMERATOR / (theta_b * theta_b);
    cfg.gamma0 * h.powf(-a2) * delta * u_i * s / p[i]
        + cfg.gamma0 * cfg.sigma2 * u_i / (g3 * p[i])
}

/// Horizontal-position/power GP at fixed height and beamwidth.
///
/// Variables {x_uav, y_uav, t, x~_k, y~_k, p_k, u_k}; constraints: K
/// epigraph rows, 2K power boxes, K footprint rows, 4K AM-GM offset
/// rows, K SINR surrogates and K gain-bound rows — 10K in total.
///
/// Device coordinates are shifted so every coordinate is at least
/// r_disk/100 before entering the monomials; the returned handles carry
/// the shift for mapping the solution back.
pub fn build_p12(
    deployment: &Deployment,
    env: &Environment,
    cfg: &SystemConfig,
    h: f64,
    theta_b: f64,
    prev_xy: (f64, f64),
) -> (GpProblem, P12Vars) {
    let k = deployment.len();
    // Shift each axis so the smallest coordinate lands at half the axis
    // spread (at least r_disk/100). The AM-GM offset rows floor each
    // x~_k at roughly coordinate/4 and cap x_uav at 2 sqrt(x~ x_k), so
    // coordinates that are tiny or huge relative to the footprint make
    // the problem infeasible; half-spread balances the two floors.
    let min_x = deployment.positions.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x0 = deployment.positions.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = deployment.positions.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y0 = deployment.positions.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let base_x = (0.5 * (max_x0 - min_x)).max(cfg.r_disk / 100.0);
    let base_y = (0.5 * (max_y0 - min_y)).max(cfg.r_disk / 100.0);
    let shift = (base_x - min_x, base_y - min_y);
    let dx: Vec<f64> = deployment.positions.iter().map(|p| p.0 + shift.0).collect();
    let dy: Vec<f64> = deployment.positions.iter().map(|p| p.1 + shift.1).collect();
    let footprint = h * (theta_b / 2.0).tan();

    // Search a coarse grid (plus the previous position) for the start
    // that leaves the most footprint headroom: the AM-GM offset floors
    // max(a^2/(4b), b^2/(4a)) dominate the true offsets, so a poorly
    // placed start violates the footprint rows.
    let floor_pair = |coord: f64, uav: f64| -> f64 {
        (coord * coord / (4.0 * uav)).max(uav * uav / (4.0 * coord))
    };
    let load_at = |xc: f64, yc: f64| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..k {
            let fx = floor_pair(dx[i], xc);
            let fy = floor_pair(dy[i], yc);
            worst = worst.max((fx * fx + fy * fy) / (footprint * footprint));
        }
        worst
    };
    let max_x = dx.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_y = dy.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut best = (prev_xy.0 + shift.0, prev_xy.1 + shift.1);
    if !(best.0 > 0.0 && best.1 > 0.0) {
        best = (base_x, base_y);
    }
    let mut best_load = load_at(best.0, best.1);
    let steps = 12;
    for ix in 0..=steps {
        for iy in 0..=steps {
            let xc = base_x + (max_x - base_x) * ix as f64 / steps as f64;
            let yc = base_y + (max_y - base_y) * iy as f64 / steps as f64;
            let load = load_at(xc, yc);
            if load < best_load {
                best_load = load;
                best = (xc, yc);
            }
        }
    }
    let (x0, y0) = best;
    let beta = if best_load < 0.94 { (0.97 / best_load).sqrt().min(1.05) } else { 1.0 + 1e-6 };

    let delta = gain_bound_delta(env, cfg);
    let a2 = cfg.alpha / 2.0;
    let a4 = cfg.alpha / 4.0;
    let p0 = (cfg.p_min * cfg.p_max).sqrt();
    let t0 = 1.5 * deployment.max_activation() * p0;
    let abs_floor = 1e-6 * cfg.r_disk;

    let mut gp = GpProblem::new();
    let x_uav = gp.add_var("x_uav", x0, None, None);
    let y_uav = gp.add_var("y_uav", y0, None, None);
    let t = gp.add_var("t", t0, None, None);
    let mut x_abs = Vec::with_capacity(k);
    let mut y_abs = Vec::with_capacity(k);
    for i in 0..k {
        let fx = (floor_pair(dx[i], x0) * beta).max(abs_floor * 2.0);
        let fy = (floor_pair(dy[i], y0) * beta).max(abs_floor * 2.0);
        x_abs.push(gp.add_var(format!("x_abs{i}"), fx, Some(abs_floor), None));
        y_abs.push(gp.add_var(format!("y_abs{i}"), fy, Some(abs_floor), None));
    }
    let p: Vec<VarId> = (0..k).map(|i| gp.add_var(format!("p{i}"), p0, None, None)).collect();
    let u: Vec<VarId> = (0..k)
        .map(|i| {
            let fx = (floor_pair(dx[i], x0) * beta).max(abs_floor * 2.0);
            let fy = (floor_pair(dy[i], y0) * beta).max(abs_floor * 2.0);
            let u0 = 1.3 * (2.0 * fx * fy).powf(a4) * h.powf(a2) / delta;
            gp.add_var(format!("u{i}"), u0, None, None)
        })
        .collect();

    gp.set_objective(Posynomial::from_monomial(Monomial::new(1.0).pow(t, 1.0)));

    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(deployment.activation[i]).pow(p[i], 1.0).pow(t, -1.0),
        ));
    }
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(Monomial::new(cfg.p_min).pow(p[i], -1.0)));
    }
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(1.0 / cfg.p_max).pow(p[i], 1.0),
        ));
    }
    // footprint: (x~^2 + y~^2) / (h tan(theta_B/2))^2 <= 1
    let inv_f2 = 1.0 / (footprint * footprint);
    for i in 0..k {
        gp.add_constraint(Posynomial::new(vec![
            Monomial::new(inv_f2).pow(x_abs[i], 2.0),
            Monomial::new(inv_f2).pow(y_abs[i], 2.0),
        ]));
    }
    // AM-GM offset rows: (1/2) x_k x~^-1/2 x_uav^-1/2 and the mirrored
    // form with the roles of x_k and x_uav swapped; same for y.
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(0.5 * dx[i]).pow(x_abs[i], -0.5).pow(x_uav, -0.5),
        ));
    }
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(0.5 / dx[i].sqrt()).pow(x_uav, 1.0).pow(x_abs[i], -0.5),
        ));
    }
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(0.5 * dy[i]).pow(y_abs[i], -0.5).pow(y_uav, -0.5),
        ));
    }
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(0.5 / dy[i].sqrt()).pow(y_uav, 1.0).pow(y_abs[i], -0.5),
        ));
    }
    // SINR surrogate rows with r_j^{-a/2} replaced by (2 x~_j y~_j)^{-a/4}
    let g3 = antenna_gain(theta_b);
    for i in 0..k {
        let mut terms = Vec::with_capacity(k);
        for j in 0..k {
            if j != i {
                let coeff = cfg.gamma0
                    * delta
                    * deployment.activation[j]
                    * 2f64.powf(-a4)
                    * h.powf(-a2);
                terms.push(
                    Monomial::new(coeff)
                        .pow(p[j], 1.0)
                        .pow(x_abs[j], -a4)
                        .pow(y_abs[j], -a4)
                        .pow(p[i], -1.0)
                        .pow(u[i], 1.0),
                );
            }
        }
        let noise = cfg.gamma0 * cfg.sigma2 / g3;
        terms.push(Monomial::new(noise).pow(p[i], -1.0).pow(u[i], 1.0));
        gp.add_constraint(Posynomial::new(terms));
    }
    // gain-bound rows: 2^{a/4} h^{a/2} / delta * (x~ y~)^{a/4} u^-1 <= 1
    for i in 0..k {
        gp.add_constraint(Posynomial::from_monomial(
            Monomial::new(2f64.powf(a4) * h.powf(a2) / delta)
                .pow(x_abs[i], a4)
                .pow(y_abs[i], a4)
                .pow(u[i], -1.0),
        ));
    }

    (gp, P12Vars { x_uav, y_uav, t, x_abs, y_abs, p, u, shift })
}

/// Exact power LP at fixed placement: minimize t with c_i p_i <= t,
/// box rows, and the SINR rows built from the exact average gains.
/// Columns are scaled by p_max (powers) and p_max max_c (epigraph).
pub fn build_p13(
    deployment: &Deployment,
    env: &Environment,
    cfg: &SystemConfig,
    placement: &UavPlacement,
) -> Result<(LpProblem, P13Scale), PlannerError> {
    let k = deployment.len();
    let footprint = placement.footprint_radius();
    let mut gains = Vec::with_capacity(k);
    for i in 0..k {
        let r = ground_distance(placement, i, deployment).map_err(PlannerError::Model)?;
        if r > footprint * (1.0 + 1e-9) {
            return Err(PlannerError::DeviceOutsideFootprint { index: i });
        }
        gains.push(avg_channel_gain(placement, i, deployment, env, cfg).map_err(PlannerError::Model)?);
    }
    let g3 = antenna_gain(placement.theta_b);
    let max_c = deployment.max_activation();
    let p_scale = cfg.p_max;
    let t_scale = cfg.p_max * max_c;

    let n = k + 1;
    let mut rows = Vec::with_capacity(4 * k);
    let mut rhs = Vec::with_capacity(4 * k);
    // epigraph: (c_i / max_c) p~_i - t~ <= 0
    for i in 0..k {
        let mut row = vec![0.0; n];
        row[i] = deployment.activation[i] / max_c;
        row[k] = -1.0;
        rows.push(row);
        rhs.push(0.0);
    }
    // p~_i <= 1
    for i in 0..k {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        rows.push(row);
        rhs.push(1.0);
    }
    // -p~_i <= -p_min / p_max
    for i in 0..k {
        let mut row = vec![0.0; n];
        row[i] = -1.0;
        rows.push(row);
        rhs.push(-cfg.p_min / cfg.p_max);
    }
    // SINR: gamma0 sum_{j != i} c_j (g_j / g_i) p~_j - p~_i
    //         <= -gamma0 sigma^2 / (G g_i p_max)
    for i in 0..k {
        let mut row = vec![0.0; n];
        for j in 0..k {
            if j != i {
                row[j] = cfg.gamma0 * deployment.activation[j] * gains[j] / gains[i];
            }
        }
        row[i] -= 1.0;
        rows.push(row);
        rhs.push(-cfg.gamma0 * cfg.sigma2 / (g3 * gains[i] * p_scale));
    }

    let mut objective = vec![0.0; n];
    objective[k] = 1.0;
    Ok((LpProblem { objective, rows, rhs }, P13Scale { power: p_scale, objective: t_scale }))
}
