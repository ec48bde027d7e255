//! Power-law fit tan(theta/2) ~ q1 theta^q2 used to keep the footprint
//! constraint monomial in the height/beamwidth GP.

use serde::{Deserialize, Serialize};

use super::PlannerError;

/// Least-squares power-law fit of the half-angle tangent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TanFit {
    pub q1: f64,
    pub q2: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    /// Largest |q1 theta^q2 / tan(theta/2) - 1| over a dense scan of the
    /// fit range.
    pub max_rel_error: f64,
}

impl TanFit {
    /// Fitted value q1 theta^q2.
    pub fn eval(&self, theta: f64) -> f64 {
        self.q1 * theta.powf(self.q2)
    }
}

/// Fit ln tan(theta/2) = ln q1 + q2 ln theta by least squares over
/// `samples` uniformly spaced angles in [theta_lo, theta_hi].
pub fn fit_tan_power(theta_lo: f64, theta_hi: f64, samples: usize) -> Result<TanFit, PlannerError> {
    if !(theta_lo > 0.0 && theta_hi < std::f64::consts::PI && theta_lo < theta_hi) {
        return Err(PlannerError::DegenerateFitRange { theta_lo, theta_hi });
    }
    if samples < 2 {
        return Err(PlannerError::DegenerateFitRange { theta_lo, theta_hi });
    }
    let n = samples as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..samples {
        let theta = theta_lo + (theta_hi - theta_lo) * i as f64 / (samples as f64 - 1.0);
        let x = theta.ln();
        let y = (theta / 2.0).tan().ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let q2 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let q1 = ((sy - q2 * sx) / n).exp();

    let mut max_rel_error = 0.0f64;
    let scan = 1024;
    for i in 0..=scan {
        let theta = theta_lo + (theta_hi - theta_lo) * i as f64 / scan as f64;
        let rel = (q1 * theta.powf(q2) / (theta / 2.0).tan() - 1.0).abs();
        max_rel_error = max_rel_error.max(rel);
    }
    Ok(TanFit { q1, q2, theta_lo, theta_hi, max_rel_error })
}

// ===========================================================================
// Tests
// ===========================================================================
