//! Dense two-phase simplex for small linear programs:
//! minimize c^T x subject to A x <= b, x >= 0.
//!
//! Bland's pivoting rule keeps the method deterministic and cycle-free;
//! problem sizes here (a few hundred rows) need nothing fancier.

/// minimize `objective . x` s.t. `rows[i] . x <= rhs[i]`, `x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
}

const EPS: f64 = 1e-11;

pub fn solve_lp(p: &LpProblem) -> LpSolution {
    let n = p.objective.len();
    let m = p.rows.len();
    debug_assert!(p.rows.iter().all(|r| r.len() == n));
    debug_assert_eq!(p.rhs.len(), m);

    // Tableau columns: n structural + m slacks + (phase-1 artificials).
    // Rows with negative rhs are negated so b >= 0, turning their slack
    // coefficient to -1 and requiring an artificial basis column.
    let mut need_artificial = Vec::new();
    for (i, &b) in p.rhs.iter().enumerate() {
        if b < 0.0 {
            need_artificial.push(i);
        }
    }
    let n_art = need_artificial.len();
    let cols = n + m + n_art;

    let mut a = vec![vec![0.0f64; cols]; m];
    let mut b = vec![0.0f64; m];
    let mut basis = vec![0usize; m];
    let mut art_col = n + m;
    for i in 0..m {
        let neg = p.rhs[i] < 0.0;
        let sign = if neg { -1.0 } else { 1.0 };
        for j in 0..n {
            a[i][j] = sign * p.rows[i][j];
        }
        a[i][n + i] = sign; // slack
        b[i] = sign * p.rhs[i];
        if neg {
            a[i][art_col] = 1.0;
            basis[i] = art_col;
            art_col += 1;
        } else {
            basis[i] = n + i;
        }
    }

    if n_art > 0 {
        // Phase 1: minimize the sum of artificials.
        let mut cost = vec![0.0f64; cols];
        for j in (n + m)..cols {
            cost[j] = 1.0;
        }
        let status = run_simplex(&mut a, &mut b, &mut basis, &cost, cols);
        if status == LpStatus::Unbounded {
            // Cannot happen for a bounded-below phase-1 objective.
            return LpSolution { status: LpStatus::Infeasible, x: vec![0.0; n], objective: f64::NAN };
        }
        let phase1_obj: f64 = (0..m)
            .filter(|&i| basis[i] >= n + m)
            .map(|i| b[i])
            .sum();
        if phase1_obj > 1e-7 {
            return LpSolution { status: LpStatus::Infeasible, x: vec![0.0; n], objective: f64::NAN };
        }
        // Drive any degenerate artificial out of the basis.
        for i in 0..m {
            if basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| a[i][j].abs() > 1e-9) {
                    pivot(&mut a, &mut b, &mut basis, i, j, cols);
                }
            }
        }
    }

    // Phase 2 on the structural objective; artificial columns frozen.
    let mut cost = vec![0.0f64; cols];
    cost[..n].copy_from_slice(&p.objective);
    for j in (n + m)..cols {
        cost[j] = f64::INFINITY; // never re-enter
    }
    let status = run_simplex(&mut a, &mut b, &mut basis, &cost, cols);
    if status == LpStatus::Unbounded {
        return LpSolution { status, x: vec![0.0; n], objective: f64::NEG_INFINITY };
    }

    let mut x = vec![0.0f64; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = b[i];
        }
    }
    let objective = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpSolution { status: LpStatus::Optimal, x, objective }
}

/// Bland-rule simplex on the current tableau. `cost` may contain
/// +inf to block columns from entering.
fn run_simplex(
    a: &mut [Vec<f64>],
    b: &mut [f64],
    basis: &mut [usize],
    cost: &[f64],
    cols: usize,
) -> LpStatus {
    let m = a.len();
    // Reduced costs are computed from scratch each pivot; dimensions are
    // small enough that refactorization tricks are not worth the code.
    loop {
        // y = c_B applied to the current basis inverse is implicit in the
        // tableau form: reduced cost_j = cost_j - sum_i cost_basis(i) * a[i][j].
        let mut entering = None;
        for j in 0..cols {
            if cost[j].is_infinite() || basis.contains(&j) {
                continue;
            }
            let mut rc = cost[j];
            for i in 0..m {
                let cb = cost[basis[i]];
                if cb != 0.0 && !cb.is_infinite() {
                    rc -= cb * a[i][j];
                }
            }
            if rc < -EPS {
                entering = Some(j); // Bland: first improving index
                break;
            }
        }
        let Some(j) = entering else {
            return LpStatus::Optimal;
        };
        // Ratio test, Bland tie-break on the smallest basis index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if a[i][j] > EPS {
                let ratio = b[i] / a[i][j];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS
                            || ((ratio - lr).abs() <= EPS && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return LpStatus::Unbounded;
        };
        pivot(a, b, basis, i, j, cols);
    }
}

fn pivot(a: &mut [Vec<f64>], b: &mut [f64], basis: &mut [usize], row: usize, col: usize, cols: usize) {
    let m = a.len();
    let piv = a[row][col];
    for j in 0..cols {
        a[row][j] /= piv;
    }
    b[row] /= piv;
    for i in 0..m {
        if i != row {
            let f = a[i][col];
            if f != 0.0 {
                for j in 0..cols {
                    a[i][j] -= f * a[row][j];
                }
                b[i] -= f * b[row];
            }
        }
    }
    basis[row] = col;
}

// ===========================================================================
// Tests
// ===========================================================================
