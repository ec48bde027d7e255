//! Benchmark solvers operating directly on the original non-convex
//! problem: a seeded genetic algorithm and a log-barrier nonlinear
//! method with a smoothed min-max objective. Both evaluate candidates
//! with the exact channel model and share the planner's solution type.

mod ga;
mod nlp;

pub use ga::{solve_ga, GaConfig};
pub use nlp::{solve_nlp_ipm, NlpConfig};

use crate::channel::{Deployment, SystemConfig};

/// Box bounds of the direct-search decision vector
/// [x, y, h, theta_b, p_1..p_K].
pub(crate) fn decision_bounds(
    deployment: &Deployment,
    cfg: &SystemConfig,
) -> (Vec<f64>, Vec<f64>) {
    let min_x = deployment.positions.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = deployment.positions.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = deployment.positions.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = deployment.positions.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    // Pad the device bounding box so the disk edge stays reachable even
    // for clustered deployments.
    let pad_x = (0.1 * (max_x - min_x)).max(0.1 * cfg.r_disk);
    let pad_y = (0.1 * (max_y - min_y)).max(0.1 * cfg.r_disk);
    let k = deployment.len();
    let mut lower = Vec::with_capacity(4 + k);
    let mut upper = Vec::with_capacity(4 + k);
    lower.push(min_x - pad_x);
    upper.push(max_x + pad_x);
    lower.push(min_y - pad_y);
    upper.push(max_y + pad_y);
    lower.push(cfg.h_min);
    upper.push(cfg.h_max);
    lower.push(cfg.theta0);
    upper.push(std::f64::consts::PI * 0.999);
    for _ in 0..k {
        lower.push(cfg.p_min);
        upper.push(cfg.p_max);
    }
    (lower, upper)
}

/// Errors shared by the baseline solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineError {
    /// No strictly feasible starting point / individual was found.
    NoFeasiblePoint,
    /// Invalid inputs.
    Invalid(String),
}

impl std::fmt::Display for BaselineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaselineError::NoFeasiblePoint => write!(f, "no feasible point found"),
            BaselineError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for BaselineError {}
