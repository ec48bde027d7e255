//! GP-to-convex transform: substituting x = scale * exp(w) turns each
//! posynomial into a log-sum-exp of affine forms in w, with analytic
//! gradients and Hessians.

use super::{GpError, GpProblem};

/// One exponential term exp(b + a . w) of a log-sum-exp function.
/// `a` is sparse: (variable index, exponent).
#[derive(Debug, Clone)]
pub struct LseTerm {
    pub b: f64,
    pub a: Vec<(usize, f64)>,
}

/// F(w) = ln sum_t exp(b_t + a_t . w); convex, smooth.
#[derive(Debug, Clone)]
pub struct LseFunction {
    pub terms: Vec<LseTerm>,
    /// Sorted union of variable indices across terms.
    pub support: Vec<usize>,
}

impl LseFunction {
    fn new(terms: Vec<LseTerm>) -> Self {
        let mut support: Vec<usize> = terms.iter().flat_map(|t| t.a.iter().map(|&(i, _)| i)).collect();
        support.sort_unstable();
        support.dedup();
        LseFunction { terms, support }
    }

    /// F(w).
    pub fn value(&self, w: &[f64]) -> f64 {
        let mut zmax = f64::NEG_INFINITY;
        for t in &self.terms {
            let z = t.b + t.a.iter().map(|&(i, e)| e * w[i]).sum::<f64>();
            if z > zmax {
                zmax = z;
            }
        }
        let s: f64 = self
            .terms
            .iter()
            .map(|t| {
                let z = t.b + t.a.iter().map(|&(i, e)| e * w[i]).sum::<f64>();
                (z - zmax).exp()
            })
            .sum();
        zmax + s.ln()
    }

    /// F(w) and its dense gradient accumulated into `grad` (overwritten
    /// on the support, so the caller passes a zeroed buffer).
    pub fn value_grad(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        let mut zs = Vec::with_capacity(self.terms.len());
        let mut zmax = f64::NEG_INFINITY;
        for t in &self.terms {
            let z = t.b + t.a.iter().map(|&(i, e)| e * w[i]).sum::<f64>();
            zs.push(z);
            if z > zmax {
                zmax = z;
            }
        }
        let mut s = 0.0;
        for z in zs.iter_mut() {
            *z = (*z - zmax).exp();
            s += *z;
        }
        for (t, lam) in self.terms.iter().zip(zs.iter()) {
            let lam = lam / s;
            for &(i, e) in &t.a {
                grad[i] += lam * e;
            }
        }
        zmax + s.ln()
    }

    /// Accumulate `w_lin * (sum_t lam_t a_t a_t^T)` and
    /// `w_rank1 * g g^T` into the dense lower triangle of `hess`,
    /// where g is this function's gradient and lam the softmax weights.
    /// Returns (value, gradient over support written into `grad`).
    pub fn value_grad_hess(
        &self,
        w: &[f64],
        grad: &mut [f64],
        hess: &mut [f64],
        n: usize,
        w_lin: f64,
        w_rank1: f64,
    ) -> f64 {
        let mut zs = Vec::with_capacity(self.terms.len());
        let mut zmax = f64::NEG_INFINITY;
        for t in &self.terms {
            let z = t.b + t.a.iter().map(|&(i, e)| e * w[i]).sum::<f64>();
            zs.push(z);
            if z > zmax {
                zmax = z;
            }
        }
        let mut s = 0.0;
        for z in zs.iter_mut() {
            *z = (*z - zmax).exp();
            s += *z;
        }
        for (t, lam) in self.terms.iter().zip(zs.iter()) {
            let lam = lam / s;
            for &(i, e) in &t.a {
                grad[i] += lam * e;
            }
            // lam * a a^T, lower triangle
            for (ai, &(i, ei)) in t.a.iter().enumerate() {
                let wi = w_lin * lam * ei;
                for &(j, ej) in t.a.iter().take(ai + 1) {
                    // i >= j by sorted order
                    hess[i * n + j] += wi * ej;
                }
            }
        }
        if w_rank1 != 0.0 {
            for (si, &i) in self.support.iter().enumerate() {
                let gi = w_rank1 * grad[i];
                for &j in self.support.iter().take(si + 1) {
                    hess[i * n + j] += gi * grad[j];
                }
            }
        }
        zmax + s.ln()
    }
}

/// The convex image of a [`GpProblem`]: minimize F0(w) subject to
/// F_i(w) <= 0, plus box bounds on w inherited from the registry.
#[derive(Debug, Clone)]
pub struct ConvexProgram {
    pub n: usize,
    pub objective: LseFunction,
    pub constraints: Vec<LseFunction>,
    /// Per-variable scale s_v; original value x_v = s_v * exp(w_v).
    pub scales: Vec<f64>,
    /// Box bounds in w space.
    pub w_lower: Vec<Option<f64>>,
    pub w_upper: Vec<Option<f64>>,
    /// Start point (w = 0 when inits are interior).
    pub w0: Vec<f64>,
}

impl ConvexProgram {
    /// Build the log-transformed program. Scales come from the registry
    /// inits, so the start point is the origin unless an init had to be
    /// pulled inside its box.
    pub fn from_gp(problem: &GpProblem) -> Result<ConvexProgram, GpError> {
        problem.validate()?;
        let n = problem.num_vars();
        let scales: Vec<f64> = problem.vars().iter().map(|v| v.init).collect();
        let mut w_lower = vec![None; n];
        let mut w_upper = vec![None; n];
        let mut w0: Vec<f64> = vec![0.0; n];
        for (i, v) in problem.vars().iter().enumerate() {
            let lo = v.lower.map(|l| (l / scales[i]).ln());
            let hi = v.upper.map(|u| (u / scales[i]).ln());
            w_lower[i] = lo;
            w_upper[i] = hi;
            // Pull the start strictly inside the box if the init sits on
            // or beyond a bound.
            let margin: f64 = 1e-3;
            if let (Some(l), Some(u)) = (lo, hi) {
                let m = margin.min((u - l) * 0.25);
                w0[i] = w0[i].clamp(l + m, u - m);
            } else if let Some(l) = lo {
                if w0[i] < l + margin {
                    w0[i] = l + margin;
                }
            } else if let Some(u) = hi {
                if w0[i] > u - margin {
                    w0[i] = u - margin;
                }
            }
        }

        let to_lse = |p: &super::Posynomial| -> LseFunction {
            let terms = p
                .terms
                .iter()
                .map(|m| {
                    let mut b = m.coeff.ln();
                    let mut a = Vec::with_capacity(m.exponents.len());
                    for &(super::VarId(i), e) in &m.exponents {
                        b += e * scales[i].ln();
                        a.push((i, e));
                    }
                    LseTerm { b, a }
                })
                .collect();
            LseFunction::new(terms)
        };

        Ok(ConvexProgram {
            n,
            objective: to_lse(problem.objective()),
            constraints: problem.constraints().iter().map(to_lse).collect(),
            scales,
            w_lower,
            w_upper,
            w0,
        })
    }

    /// Map a point in w space back to original variable values.
    pub fn to_original(&self, w: &[f64]) -> Vec<f64> {
        w.iter().zip(&self.scales).map(|(wi, s)| s * wi.exp()).collect()
    }
}

// ===========================================================================
// Tests
// ===========================================================================
