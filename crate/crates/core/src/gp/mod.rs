//! Geometric-programming machinery: monomial/posynomial algebra,
//! standard-form problems, the log-variable convex transform, a
//! log-barrier interior-point solver, and a dense simplex LP solver.

pub mod barrier;
pub mod convex;
pub mod lp;

use std::fmt;

pub use convex::ConvexProgram;
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus};

/// Index of a variable in a [`GpProblem`] registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Registry entry for one positive decision variable.
///
/// `init` doubles as the scaling hint: the solver normalizes the
/// variable by it before the log transform, so a well-chosen init keeps
/// the Newton system conditioned across disparate physical magnitudes.
#[derive(Debug, Clone)]
pub struct VarSpec {
    pub name: String,
    /// Strictly positive initial value and scale.
    pub init: f64,
    /// Optional positive box bounds enforced by the solver barrier
    /// (not counted among the problem constraints).
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// coefficient * prod var^exp with a strictly positive coefficient.
#[derive(Debug, Clone)]
pub struct Monomial {
    pub coeff: f64,
    /// Sparse exponent map, kept sorted by variable id.
    pub exponents: Vec<(VarId, f64)>,
}

impl Monomial {
    pub fn new(coeff: f64) -> Self {
        Monomial { coeff, exponents: Vec::new() }
    }

    /// Multiply in `var^exp`. Exponents on the same variable accumulate.
    pub fn pow(mut self, var: VarId, exp: f64) -> Self {
        if exp != 0.0 {
            match self.exponents.binary_search_by_key(&var, |e| e.0) {
                Ok(i) => {
                    self.exponents[i].1 += exp;
                    if self.exponents[i].1 == 0.0 {
                        self.exponents.remove(i);
                    }
                }
                Err(i) => self.exponents.insert(i, (var, exp)),
            }
        }
        self
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut v = self.coeff;
        for &(VarId(i), e) in &self.exponents {
            v *= x[i].powf(e);
        }
        v
    }
}

/// Sum of monomials; at least one term, all coefficients positive.
#[derive(Debug, Clone)]
pub struct Posynomial {
    pub terms: Vec<Monomial>,
}

impl Posynomial {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Posynomial { terms }
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Posynomial { terms: vec![m] }
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval_unchecked(x)).sum()
    }
}

/// Structural and solve-time errors of the GP layer.
#[derive(Debug, Clone, PartialEq)]
pub enum GpError {
    /// A monomial coefficient is not strictly positive.
    NonPositiveCoefficient { constraint: Option<usize>, coeff: f64 },
    /// A term references a variable id outside the registry.
    UnknownVariable { id: usize, registry: usize },
    /// A posynomial has no terms.
    EmptyPosynomial { constraint: Option<usize> },
    /// A registry init/bound is not strictly positive or is inconsistent.
    BadVariableSpec { name: String, detail: String },
    /// Evaluation received a non-positive or missing assignment.
    BadAssignment { detail: String },
}

impl fmt::Display for GpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GpError::NonPositiveCoefficient { constraint, coeff } => match constraint {
                Some(i) => write!(f, "constraint {i}: coefficient {coeff} is not positive"),
                None => write!(f, "objective: coefficient {coeff} is not positive"),
            },
            GpError::UnknownVariable { id, registry } => {
                write!(f, "variable id {id} outside registry of size {registry}")
            }
            GpError::EmptyPosynomial { constraint } => match constraint {
                Some(i) => write!(f, "constraint {i} has no terms"),
                None => write!(f, "objective has no terms"),
            },
            GpError::BadVariableSpec { name, detail } => {
                write!(f, "variable `{name}`: {detail}")
            }
            GpError::BadAssignment { detail } => write!(f, "bad assignment: {detail}"),
        }
    }
}

impl std::error::Error for GpError {}

/// A geometric program in standard form: minimize a posynomial subject
/// to posynomial constraints, each meaning `<= 1`.
#[derive(Debug, Clone)]
pub struct GpProblem {
    vars: Vec<VarSpec>,
    objective: Posynomial,
    constraints: Vec<Posynomial>,
}

impl GpProblem {
    pub fn new() -> Self {
        GpProblem {
            vars: Vec::new(),
            objective: Posynomial::new(vec![]),
            constraints: Vec::new(),
        }
    }

    /// Register a variable with init/scale and optional box bounds.
    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        init: f64,
        lower: Option<f64>,
        upper: Option<f64>,
    ) -> VarId {
        let id = VarId(self.vars.len());
        self.vars.push(VarSpec { name: name.into(), init, lower, upper });
        id
    }

    pub fn set_objective(&mut self, objective: Posynomial) {
        self.objective = objective;
    }

    /// Add `posy <= 1`.
    pub fn add_constraint(&mut self, posy: Posynomial) {
        self.constraints.push(posy);
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Total monomial terms across the constraints (the objective is
    /// not counted).
    pub fn num_constraint_terms(&self) -> usize {
        self.constraints.iter().map(|c| c.terms.len()).sum()
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.vars
    }

    pub fn objective(&self) -> &Posynomial {
        &self.objective
    }

    pub fn constraints(&self) -> &[Posynomial] {
        &self.constraints
    }

    pub fn var_name(&self, id: VarId) -> &str {
        &self.vars[id.0].name
    }

    /// Standard-form validation: positive coefficients, known variable
    /// ids, non-empty posynomials, strictly positive inits and bounds.
    pub fn validate(&self) -> Result<(), GpError> {
        for (i, v) in self.vars.iter().enumerate() {
            if !(v.init > 0.0 && v.init.is_finite()) {
                return Err(GpError::BadVariableSpec {
                    name: v.name.clone(),
                    detail: format!("init must be a positive finite number, got {}", v.init),
                });
            }
            let lo = v.lower.unwrap_or(0.0);
            if let Some(l) = v.lower {
                if !(l > 0.0) {
                    return Err(GpError::BadVariableSpec {
                        name: v.name.clone(),
                        detail: format!("lower bound must be positive, got {l}"),
                    });
                }
            }
            if let Some(u) = v.upper {
                if !(u > lo) {
                    return Err(GpError::BadVariableSpec {
                        name: v.name.clone(),
                        detail: format!("upper bound {u} not above lower bound {lo}"),
                    });
                }
            }
            let _ = i;
        }
        self.check_posy(&self.objective, None)?;
        for (i, c) in self.constraints.iter().enumerate() {
            self.check_posy(c, Some(i))?;
        }
        Ok(())
    }

    fn check_posy(&self, p: &Posynomial, constraint: Option<usize>) -> Result<(), GpError> {
        if p.terms.is_empty() {
            return Err(GpError::EmptyPosynomial { constraint });
        }
        for t in &p.terms {
            if !(t.coeff > 0.0 && t.coeff.is_finite()) {
                return Err(GpError::NonPositiveCoefficient { constraint, coeff: t.coeff });
            }
            for &(VarId(id), _) in &t.exponents {
                if id >= self.vars.len() {
                    return Err(GpError::UnknownVariable { id, registry: self.vars.len() });
                }
            }
        }
        Ok(())
    }

    /// Evaluate a posynomial at a full positive assignment (one value
    /// per registry variable).
    pub fn eval(&self, posy: &Posynomial, assignment: &[f64]) -> Result<f64, GpError> {
        if assignment.len() != self.vars.len() {
            return Err(GpError::BadAssignment {
                detail: format!(
                    "assignment length {} != registry size {}",
                    assignment.len(),
                    self.vars.len()
                ),
            });
        }
        for (i, &v) in assignment.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GpError::BadAssignment {
                    detail: format!("variable `{}` assigned non-positive {v}", self.vars[i].name),
                });
            }
        }
        self.check_posy(posy, None)?;
        Ok(posy.eval_unchecked(assignment))
    }

    /// Human-readable dump, one constraint per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str("min: ");
        self.dump_posy(&self.objective, &mut out);
        out.push('\n');
        for c in &self.constraints {
            out.push_str("s.t. ");
            self.dump_posy(c, &mut out);
            out.push_str(" <= 1\n");
        }
        out
    }

    fn dump_posy(&self, p: &Posynomial, out: &mut String) {
        use fmt::Write;
        for (i, t) in p.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            write!(out, "{:.6e}", t.coeff).unwrap();
            for &(id, e) in &t.exponents {
                write!(out, " * {}^{}", self.var_name(id), e).unwrap();
            }
        }
    }
}

impl Default for GpProblem {
    fn default() -> Self {
        Self::new()
    }
}

/// Solver knobs. Defaults: barrier weight starts at 1 and grows tenfold
/// per outer stage, Newton with Armijo backtracking (c = 0.01, step
/// shrink 0.5), duality-gap and KKT tolerance 1e-8.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Duality-gap and feasibility tolerance.
    pub tol: f64,
    /// Initial barrier weight.
    pub t0: f64,
    /// Barrier weight multiplier per outer stage.
    pub mu: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_c: f64,
    /// Backtracking shrink factor.
    pub backtrack: f64,
    /// Newton-decrement^2 / 2 threshold that ends a centering stage.
    pub newton_tol: f64,
    pub max_newton_per_stage: usize,
    pub max_stages: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            t0: 1.0,
            mu: 10.0,
            armijo_c: 0.01,
            backtrack: 0.5,
            newton_tol: 1e-10,
            max_newton_per_stage: 60,
            max_stages: 64,
        }
    }
}

/// Terminal state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIterations,
    NumericalFailure,
}

/// Outcome of [`solve_gp`] / [`solve_lp`]-style solves.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Variable values in original (exponentiated, unscaled) space.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Total Newton iterations across barrier stages.
    pub iterations: usize,
    /// Infinity norm of the scaled dual residual at exit.
    pub kkt_residual: f64,
    /// Barrier duality-gap estimate m / t at exit.
    pub duality_gap: f64,
    /// Largest constraint value (<= 1 + tol when optimal).
    pub constraint_max: f64,
}

/// Solve a standard-form GP with the log-barrier interior-point method
/// on the log-transformed convex program.
pub fn solve_gp(problem: &GpProblem, opts: &SolveOptions) -> Result<SolveResult, GpError> {
    problem.validate()?;
    let prog = convex::ConvexProgram::from_gp(problem)?;
    let mut result = barrier::solve(&prog, opts);
    if matches!(result.status, SolveStatus::Optimal | SolveStatus::MaxIterations) {
        // Report the original-space objective and worst constraint.
        result.objective = problem.objective.eval_unchecked(&result.x);
        result.constraint_max = problem
            .constraints
            .iter()
            .map(|c| c.eval_unchecked(&result.x))
            .fold(f64::NEG_INFINITY, f64::max);
    }
    Ok(result)
}

// ===========================================================================
// Tests
// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_eval() {
        let mut p = GpProblem::new();
        let x = p.add_var("x", 1.0, None, None);
        let m = Posynomial::from_monomial(Monomial::new(2.0).pow(x, 1.0));
        assert_eq!(p.eval(&m, &[3.0]).unwrap(), 6.0);
    }

    #[test]
    fn posynomial_eval_x_plus_inv_x() {
        let mut p = GpProblem::new();
        let x = p.add_var("x", 1.0, None, None);
        let posy = Posynomial::new(vec![
            Monomial::new(1.0).pow(x, 1.0),
            Monomial::new(1.0).pow(x, -1.0),
        ]);
        assert_eq!(p.eval(&posy, &[1.0]).unwrap(), 2.0);
        assert_eq!(p.eval(&posy, &[2.0]).unwrap(), 2.5);
    }

    #[test]
    fn posynomial_eval_matches_naive_oracle() {
        use rand::prelude::*;
        use rand_chacha::ChaCha20Rng;
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut p = GpProblem::new();
        let ids: Vec<VarId> = (0..4).map(|i| p.add_var(format!("x{i}"), 1.0, None, None)).collect();
        for _ in 0..100 {
            let mut terms = Vec::new();
            let mut oracle_terms: Vec<(f64, Vec<f64>)> = Vec::new();
            for _ in 0..3 {
                let coeff = rng.gen_range(0.1..5.0);
                let exps: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let mut m = Monomial::new(coeff);
                for (i, &e) in exps.iter().enumerate() {
                    m = m.pow(ids[i], e);
                }
                terms.push(m);
                oracle_terms.push((coeff, exps));
            }
            let posy = Posynomial::new(terms);
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(0.2..4.0)).collect();
            // independent term-by-term evaluation
            let oracle: f64 = oracle_terms
                .iter()
                .map(|(c, exps)| {
                    c * exps.iter().zip(&x).map(|(e, v)| v.powf(*e)).product::<f64>()
                })
                .sum();
            let got = p.eval(&posy, &x).unwrap();
            assert!(((got - oracle) / oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_rejects_bad_assignments() {
        let mut p = GpProblem::new();
        let x = p.add_var("x", 1.0, None, None);
        let posy = Posynomial::from_monomial(Monomial::new(1.0).pow(x, 2.0));
        assert!(matches!(p.eval(&posy, &[]), Err(GpError::BadAssignment { .. })));
        assert!(matches!(p.eval(&posy, &[-1.0]), Err(GpError::BadAssignment { .. })));
    }

    #[test]
    fn validate_flags_structural_errors() {
        let mut p = GpProblem::new();
        let x = p.add_var("x", 1.0, None, None);
        p.set_objective(Posynomial::from_monomial(Monomial::new(1.0).pow(x, 1.0)));
        p.add_constraint(Posynomial::new(vec![Monomial::new(-2.0).pow(x, 1.0)]));
        assert!(matches!(
            p.validate(),
            Err(GpError::NonPositiveCoefficient { constraint: Some(0), .. })
        ));

        let mut p = GpProblem::new();
        let x = p.add_var("x", 1.0, None, None);
        p.set_objective(Posynomial::from_monomial(Monomial::new(1.0).pow(x, 1.0)));
        p.add_constraint(Posynomial::from_monomial(Monomial::new(1.0).pow(VarId(5), 1.0)));
        assert!(matches!(p.validate(), Err(GpError::UnknownVariable { id: 5, .. })));

        let mut p = GpProblem::new();
        let _ = p.add_var("x", -1.0, None, None);
        assert!(matches!(p.validate(), Err(GpError::BadVariableSpec { .. })));
    }

    #[test]
    fn monomial_pow_accumulates_exponents() {
        let mut p = GpProblem::new();
        let x = p.add_var("x", 1.0, None, None);
        let m = Monomial::new(3.0).pow(x, 1.5).pow(x, 0.5);
        assert_eq!(m.exponents, vec![(x, 2.0)]);
        let m = Monomial::new(3.0).pow(x, 1.0).pow(x, -1.0);
        assert!(m.exponents.is_empty());
    }

    #[test]
    fn dump_golden() {
        let mut p = GpProblem::new();
        let x = p.add_var("x", 1.0, None, None);
        let y = p.add_var("y", 1.0, None, None);
        p.set_objective(Posynomial::from_monomial(Monomial::new(1.0).pow(y, 1.0)));
        p.add_constraint(Posynomial::new(vec![
            Monomial::new(0.5).pow(x, 2.0).pow(y, -1.0),
            Monomial::new(3.0).pow(x, -1.0),
        ]));
        let expected = "min: 1.000000e0 * y^1\n\
                        s.t. 5.000000e-1 * x^2 * y^-1 + 3.000000e0 * x^-1 <= 1\n";
        assert_eq!(p.dump(), expected);
    }
}
