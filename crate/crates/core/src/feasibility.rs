//! Pre-solve feasibility analysis, post-solve constraint verification
//! against the original problem, and sub-problem size bookkeeping.

use serde::{Deserialize, Serialize};

use crate::channel::{
    self, footprint_required_theta, Deployment, Environment, SystemConfig, UavPlacement,
    MAIN_LOBE_GAIN_NUMERATOR,
};

/// Relative slack tolerance: a constraint g(x) <= 1 passes if
/// g(x) <= 1 + 1e-6.
pub const SLACK_REL_TOL: f64 = 1e-6;
/// Absolute slack floor for near-zero scales.
pub const SLACK_ABS_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Target-SINR bound
// ---------------------------------------------------------------------------

/// Result of the target-SINR screening bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// 1 / ((K-1) max_k c_k + sigma^2 theta0^2 / (8.83 p_max)), linear.
    pub gamma_max_tight: f64,
    /// 1 / ((K-1) max_k c_k); infinite for K = 1.
    pub gamma_max_relaxed: f64,
    /// The requested target, linear.
    pub gamma0: f64,
    /// gamma0 <= gamma_max_tight.
    pub feasible: bool,
    /// gamma_max_tight - gamma0.
    pub margin: f64,
}

/// Largest supportable target average SINR for a deployment.
///
/// A cheap necessary screen only: it assumes the solution equalizes the
/// per-device average energies and that all links see equal gain, so a
/// target above the bound is hopeless while one below it may still fail
/// for other reasons.
pub fn max_feasible_sinr(deployment: &Deployment, cfg: &SystemConfig) -> FeasibilityReport {
    let k = deployment.len() as f64;
    let max_c = deployment.max_activation();
    let noise_term =
        cfg.sigma2 * cfg.theta0 * cfg.theta0 / (MAIN_LOBE_GAIN_NUMERATOR * cfg.p_max);
    let interference_term = (k - 1.0) * max_c;
    let tight = 1.0 / (interference_term + noise_term);
    let relaxed = if interference_term > 0.0 { 1.0 / interference_term } else { f64::INFINITY };
    FeasibilityReport {
        gamma_max_tight: tight,
        gamma_max_relaxed: relaxed,
        gamma0: cfg.gamma0,
        feasible: cfg.gamma0 <= tight,
        margin: tight - cfg.gamma0,
    }
}

// ---------------------------------------------------------------------------
// Constraint verification
// ---------------------------------------------------------------------------

/// Slacks of a candidate solution against the original constraints,
/// computed with the exact channel model (no surrogate bounds).
///
/// Normalized slacks divide each raw slack by a characteristic scale
/// (target SINR, p_max, h_min, theta0) so a single tolerance applies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintSlacks {
    /// gamma_i - gamma0 per device.
    pub sinr: Vec<f64>,
    /// p_i - p_min per device.
    pub power_lower: Vec<f64>,
    /// p_max - p_i per device.
    pub power_upper: Vec<f64>,
    /// h - h_min.
    pub height: f64,
    /// theta_B - theta0.
    pub beamwidth: f64,
    /// theta_B - 2 atan(max_k r_k / h).
    pub footprint: f64,
    /// Smallest normalized slack across all constraints.
    pub min_normalized_slack: f64,
    /// All slacks within tolerance.
    pub feasible: bool,
}

/// Check a placement/power pair against the original constraint set.
/// Reports slacks; never fails on infeasibility.
pub fn verify_solution(
    placement: &UavPlacement,
    powers: &[f64],
    deployment: &Deployment,
    env: &Environment,
    cfg: &SystemConfig,
) -> ConstraintSlacks {
    let gammas = channel::sinr_unchecked(placement, deployment, env, cfg, powers)
        .expect("verify_solution requires matching power vector length");
    let sinr: Vec<f64> = gammas.iter().map(|g| g - cfg.gamma0).collect();
    let power_lower: Vec<f64> = powers.iter().map(|p| p - cfg.p_min).collect();
    let power_upper: Vec<f64> = powers.iter().map(|p| cfg.p_max - p).collect();
    let height = placement.h - cfg.h_min;
    let beamwidth = placement.theta_b - cfg.theta0;
    let required =
        footprint_required_theta(placement, deployment).expect("valid deployment indices");
    let footprint = placement.theta_b - required;

    let mut min_norm = f64::INFINITY;
    let mut feasible = true;
    let mut check = |raw: f64, scale: f64| {
        let norm = raw / scale;
        if norm < min_norm {
            min_norm = norm;
        }
        if !(norm >= -SLACK_REL_TOL || raw >= -SLACK_ABS_TOL) {
            feasible = false;
        }
    };
    for s in &sinr {
        check(*s, cfg.gamma0);
    }
    for s in &power_lower {
        check(*s, cfg.p_max);
    }
    for s in &power_upper {
        check(*s, cfg.p_max);
    }
    check(height, cfg.h_min);
    check(beamwidth, cfg.theta0);
    check(footprint, cfg.theta0);

    ConstraintSlacks {
        sinr,
        power_lower,
        power_upper,
        height,
        beamwidth,
        footprint,
        min_normalized_slack: min_norm,
        feasible,
    }
}

// ---------------------------------------------------------------------------
// Sub-problem sizes
// ---------------------------------------------------------------------------

/// The three sub-problems solved per planner run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subproblem {
    /// Height/beamwidth/power GP at fixed horizontal position.
    P11,
    /// Horizontal-position/power GP at fixed height and beamwidth.
    P12,
    /// Exact power LP at fixed placement.
    P13,
}

/// Constraint, monomial-term, and variable counts of a sub-problem,
/// plus interior-point effort estimates derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityCounts {
    /// Inequality constraints m.
    pub constraints: u64,
    /// Monomial terms n across the constraints (absent for the LP).
    pub monomial_terms: Option<u64>,
    /// Variables s.
    pub variables: u64,
}

impl ComplexityCounts {
    /// Iteration-count estimate. For the GPs this is
    /// sqrt(n + m) ln((n + m) / eps); for the LP, sqrt(m) ln(1 / eps).
    pub fn iteration_estimate(&self, eps: f64) -> f64 {
        let m = self.constraints as f64;
        match self.monomial_terms {
            Some(n) => {
                let nm = n as f64 + m;
                nm.sqrt() * (nm / eps).ln()
            }
            None => m.sqrt() * (1.0 / eps).ln(),
        }
    }

    /// Per-iteration arithmetic-operation estimate. For the GPs this is
    /// (m + s)(s + n) sqrt(m + n) ln((m + n) / eps); for the LP, s^2 m.
    pub fn per_iteration_ops(&self, eps: f64) -> f64 {
        let m = self.constraints as f64;
        let s = self.variables as f64;
        match self.monomial_terms {
            Some(n) => {
                let n = n as f64;
                (m + s) * (s + n) * (m + n).sqrt() * ((m + n) / eps).ln()
            }
            None => s * s * m,
        }
    }
}

/// Published sub-problem sizes as a function of the device count.
pub fn complexity_counts(k: usize, subproblem: Subproblem) -> ComplexityCounts {
    let k = k as u64;
    match subproblem {
        Subproblem::P11 => ComplexityCounts {
            constraints: 5 * k + 3,
            monomial_terms: Some(k * k + 4 * k + 3),
            variables: 2 * k + 3,
        },
        Subproblem::P12 => ComplexityCounts {
            constraints: 10 * k,
            monomial_terms: Some(k * k + 9 * k),
            variables: 6 * k + 1,
        },
        Subproblem::P13 => {
            ComplexityCounts { constraints: 4 * k, monomial_terms: None, variables: k + 1 }
        }
    }
}

// ===========================================================================
// Tests
// ===========================================================================
