//! Log-barrier interior-point method for the log-transformed convex
//! program: Newton centering with Armijo backtracking inside a
//! geometrically increasing barrier-weight schedule, and a slack-based
//! phase I when the start point violates constraints.

use ndarray::{Array1, Array2};
use ndarray_linalg::cholesky::{CholeskyFactorized, FactorizeC, SolveC, UPLO};

use super::convex::ConvexProgram;
use super::{SolveOptions, SolveResult, SolveStatus};

/// Strict-feasibility margin used by phase I: a point is accepted once
/// every transformed constraint is below -PHASE1_MARGIN.
const PHASE1_MARGIN: f64 = 1e-6;

pub fn solve(prog: &ConvexProgram, opts: &SolveOptions) -> SolveResult {
    let mut w = prog.w0.clone();
    let mut iterations = 0usize;

    if !strictly_feasible(prog, &w) {
        match phase1(prog, opts, &w, &mut iterations) {
            Ok(feasible_w) => w = feasible_w,
            Err(status) => {
                return SolveResult {
                    status,
                    x: prog.to_original(&w),
                    objective: f64::NAN,
                    iterations,
                    kkt_residual: f64::NAN,
                    duality_gap: f64::NAN,
                    constraint_max: f64::NAN,
                }
            }
        }
    }

    let m_eff = (prog.constraints.len() + box_side_count(prog)) as f64;
    let mut t = opts.t0;
    let mut status = SolveStatus::Optimal;
    let mut stages = 0usize;
    let mut stalled = 0usize;
    let mut grad_norm_over_t = f64::NAN;

    loop {
        stages += 1;
        match center(prog, &mut w, t, opts, &mut iterations) {
            CenterOutcome::Converged { grad_inf } => {
                stalled = 0;
                grad_norm_over_t = grad_inf / t;
            }
            CenterOutcome::IterLimit { grad_inf } => {
                stalled += 1;
                grad_norm_over_t = grad_inf / t;
                if stalled >= 3 {
                    status = SolveStatus::MaxIterations;
                    break;
                }
            }
            CenterOutcome::Failed => {
                status = SolveStatus::NumericalFailure;
                break;
            }
        }
        if m_eff / t <= opts.tol {
            break;
        }
        if stages >= opts.max_stages {
            status = SolveStatus::MaxIterations;
            break;
        }
        t *= opts.mu;
    }

    let constraint_max =
        prog.constraints.iter().map(|c| c.value(&w)).fold(f64::NEG_INFINITY, f64::max);
    SolveResult {
        status,
        x: prog.to_original(&w),
        objective: prog.objective.value(&w).exp(),
        iterations,
        kkt_residual: grad_norm_over_t,
        duality_gap: m_eff / t,
        constraint_max,
    }
}

fn box_side_count(prog: &ConvexProgram) -> usize {
    prog.w_lower.iter().filter(|b| b.is_some()).count()
        + prog.w_upper.iter().filter(|b| b.is_some()).count()
}

fn strictly_feasible(prog: &ConvexProgram, w: &[f64]) -> bool {
    in_box(prog, w) && prog.constraints.iter().all(|c| c.value(w) < 0.0)
}

fn in_box(prog: &ConvexProgram, w: &[f64]) -> bool {
    w.iter().enumerate().all(|(i, &wi)| {
        prog.w_lower[i].map_or(true, |l| wi > l) && prog.w_upper[i].map_or(true, |u| wi < u)
    })
}

/// Barrier-augmented objective t * F0(w) + phi(w); +inf outside the domain.
fn psi(prog: &ConvexProgram, w: &[f64], t: f64) -> f64 {
    if !in_box(prog, w) {
        return f64::INFINITY;
    }
    let mut val = t * prog.objective.value(w);
    for c in &prog.constraints {
        let v = c.value(w);
        if v >= 0.0 {
            return f64::INFINITY;
        }
        val -= (-v).ln();
    }
    for i in 0..prog.n {
        if let Some(l) = prog.w_lower[i] {
            val -= (w[i] - l).ln();
        }
        if let Some(u) = prog.w_upper[i] {
            val -= (u - w[i]).ln();
        }
    }
    val
}

enum CenterOutcome {
    Converged { grad_inf: f64 },
    IterLimit { grad_inf: f64 },
    Failed,
}

/// Newton centering of psi_t from a strictly feasible start.
fn center(
    prog: &ConvexProgram,
    w: &mut Vec<f64>,
    t: f64,
    opts: &SolveOptions,
    iterations: &mut usize,
) -> CenterOutcome {
    let n = prog.n;
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n * n];
    let mut scratch = vec![0.0; n];
    let mut last_grad_inf = f64::NAN;

    for _ in 0..opts.max_newton_per_stage {
        grad.iter_mut().for_each(|g| *g = 0.0);
        hess.iter_mut().for_each(|h| *h = 0.0);

        // t * F0
        let w_ref: &[f64] = w;
        prog.objective.value_grad_hess(w_ref, &mut scratch, &mut hess, n, t, -t);
        for i in &prog.objective.support {
            grad[*i] += t * scratch[*i];
            scratch[*i] = 0.0;
        }
        // -sum ln(-F_i)
        let mut domain_ok = true;
        for c in &prog.constraints {
            let v = c.value(w_ref);
            if !(v < 0.0) || !v.is_finite() {
                domain_ok = false;
                break;
            }
            let w_lin = 1.0 / (-v);
            let w_rank1 = 1.0 / (v * v) + 1.0 / v;
            c.value_grad_hess(w_ref, &mut scratch, &mut hess, n, w_lin, w_rank1);
            for i in &c.support {
                grad[*i] += w_lin * scratch[*i];
                scratch[*i] = 0.0;
            }
        }
        if !domain_ok {
            return CenterOutcome::Failed;
        }
        // box barriers
        for i in 0..n {
            if let Some(l) = prog.w_lower[i] {
                let u = w[i] - l;
                grad[i] -= 1.0 / u;
                hess[i * n + i] += 1.0 / (u * u);
            }
            if let Some(u) = prog.w_upper[i] {
                let s = u - w[i];
                grad[i] += 1.0 / s;
                hess[i * n + i] += 1.0 / (s * s);
            }
        }

        last_grad_inf = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));

        let dir = match newton_direction(&hess, &grad, n) {
            Some(d) => d,
            None => return CenterOutcome::Failed,
        };
        // Newton decrement^2 = -g . d
        let decrement2: f64 = -grad.iter().zip(&dir).map(|(g, d)| g * d).sum::<f64>();
        if !decrement2.is_finite() {
            return CenterOutcome::Failed;
        }
        if decrement2 / 2.0 <= opts.newton_tol {
            return CenterOutcome::Converged { grad_inf: last_grad_inf };
        }

        *iterations += 1;
        let psi0 = psi(prog, w, t);
        let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> =
                w.iter().zip(&dir).map(|(wi, di)| wi + alpha * di).collect();
            let val = psi(prog, &trial, t);
            if val.is_finite() && val <= psi0 + opts.armijo_c * alpha * slope {
                *w = trial;
                accepted = true;
                break;
            }
            alpha *= opts.backtrack;
        }
        if !accepted {
            // Step collapsed; the point is as centered as arithmetic allows.
            return CenterOutcome::Converged { grad_inf: last_grad_inf };
        }
    }
    CenterOutcome::IterLimit { grad_inf: last_grad_inf }
}

/// Solve H d = -g with a Cholesky factorization, escalating a diagonal
/// ridge when the assembled Hessian is numerically indefinite.
fn newton_direction(hess: &[f64], grad: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut diag_scale = 0.0f64;
    for i in 0..n {
        diag_scale = diag_scale.max(hess[i * n + i].abs());
    }
    if diag_scale == 0.0 {
        diag_scale = 1.0;
    }
    let mut ridge = 0.0;
    for attempt in 0..6 {
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..=i {
                let v = hess[i * n + j];
                a[[i, j]] = v;
                a[[j, i]] = v;
            }
            a[[i, i]] += ridge;
        }
        match a.factorizec(UPLO::Lower) {
            Ok(f) => {
                let b = Array1::from_iter(grad.iter().map(|g| -g));
                if let Ok(d) = <CholeskyFactorized<_> as SolveC<f64>>::solvec(&f, &b) {
                    let d = d.to_vec();
                    if d.iter().all(|v| v.is_finite()) {
                        return Some(d);
                    }
                }
            }
            Err(_) => {}
        }
        ridge = if attempt == 0 { diag_scale * 1e-12 } else { ridge * 100.0 };
    }
    None
}

/// Phase I: minimize s subject to F_i(w) <= s and the box bounds,
/// stopping as soon as a strictly feasible w appears. Returns the
/// feasible point or `Infeasible`/`NumericalFailure`.
fn phase1(
    prog: &ConvexProgram,
    opts: &SolveOptions,
    w_start: &[f64],
    iterations: &mut usize,
) -> Result<Vec<f64>, SolveStatus> {
    let n = prog.n;
    let m = prog.constraints.len();
    let mut w = w_start.to_vec();
    let max_v = prog.constraints.iter().map(|c| c.value(&w)).fold(f64::NEG_INFINITY, f64::max);
    let mut s = max_v + 1.0;

    let m_eff = (m + box_side_count(prog)) as f64;
    let mut t = 1.0;
    let dim = n + 1;
    let mut grad = vec![0.0; dim];
    let mut hess = vec![0.0; dim * dim];
    let mut scratch = vec![0.0; n];

    let psi1 = |w: &[f64], s: f64, t: f64| -> f64 {
        if !in_box(prog, w) {
            return f64::INFINITY;
        }
        let mut val = t * s;
        for c in &prog.constraints {
            let u = s - c.value(w);
            if u <= 0.0 {
                return f64::INFINITY;
            }
            val -= u.ln();
        }
        for i in 0..n {
            if let Some(l) = prog.w_lower[i] {
                val -= (w[i] - l).ln();
            }
            if let Some(u) = prog.w_upper[i] {
                val -= (u - w[i]).ln();
            }
        }
        val
    };

    for _stage in 0..opts.max_stages {
        for _ in 0..opts.max_newton_per_stage {
            if prog.constraints.iter().all(|c| c.value(&w) < -PHASE1_MARGIN) {
                return Ok(w);
            }
            grad.iter_mut().for_each(|g| *g = 0.0);
            hess.iter_mut().for_each(|h| *h = 0.0);
            grad[n] = t;

            for c in &prog.constraints {
                let v = c.value(&w);
                let u = s - v;
                if u <= 0.0 {
                    return Err(SolveStatus::NumericalFailure);
                }
                // -ln(s - F_i): w-block (1/u) HessF + (1/u^2 - 1/u) g g^T,
                // cross column -(1/u^2) g, ss entry 1/u^2.
                c.value_grad_hess(
                    &w,
                    &mut scratch,
                    &mut hess,
                    dim,
                    1.0 / u,
                    1.0 / (u * u) - 1.0 / u,
                );
                for &i in &c.support {
                    let gi = scratch[i];
                    grad[i] += gi / u;
                    hess[n * dim + i] -= gi / (u * u);
                    scratch[i] = 0.0;
                }
                grad[n] -= 1.0 / u;
                hess[n * dim + n] += 1.0 / (u * u);
            }
            for i in 0..n {
                if let Some(l) = prog.w_lower[i] {
                    let u = w[i] - l;
                    grad[i] -= 1.0 / u;
                    hess[i * dim + i] += 1.0 / (u * u);
                }
                if let Some(u) = prog.w_upper[i] {
                    let sl = u - w[i];
                    grad[i] += 1.0 / sl;
                    hess[i * dim + i] += 1.0 / (sl * sl);
                }
            }

            let dir = match newton_direction(&hess, &grad, dim) {
                Some(d) => d,
                None => return Err(SolveStatus::NumericalFailure),
            };
            let decrement2: f64 = -grad.iter().zip(&dir).map(|(g, d)| g * d).sum::<f64>();
            if decrement2 / 2.0 <= opts.newton_tol {
                break;
            }
            *iterations += 1;
            let base = psi1(&w, s, t);
            let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let wt: Vec<f64> =
                    w.iter().zip(&dir[..n]).map(|(wi, di)| wi + alpha * di).collect();
                let st = s + alpha * dir[n];
                let val = psi1(&wt, st, t);
                if val.is_finite() && val <= base + opts.armijo_c * alpha * slope {
                    w = wt;
                    s = st;
                    accepted = true;
                    break;
                }
                alpha *= opts.backtrack;
            }
            if !accepted {
                break;
            }
        }
        if prog.constraints.iter().all(|c| c.value(&w) < -PHASE1_MARGIN) {
            return Ok(w);
        }
        if m_eff / t <= opts.tol {
            break;
        }
        t *= opts.mu;
    }
    if prog.constraints.iter().all(|c| c.value(&w) < 0.0) {
        Ok(w)
    } else {
        Err(SolveStatus::Infeasible)
    }
}

// ===========================================================================
// Tests
// ===========================================================================
