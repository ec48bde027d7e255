//! Parameter sweeps and method benchmarks with CSV output.
//!
//! A sweep runs (parameter value x deployment kind x seed x method)
//! points in a parallel pool and assembles a deterministic CSV: rows
//! are post-sorted by (value order, seed, method, kind), floats are
//! written with the shortest round-trip formatting, and wall-times stay
//! zero unless timing is requested (bench rows always carry timing).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::baselines::{solve_ga, solve_nlp_ipm, GaConfig, NlpConfig};
use crate::planner::{run_algorithm1, PlannerOptions, Solution};
use crate::scenario::{DeploymentKind, Overrides, Scenario};

/// Solvers a sweep can dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Alg1,
    Ga,
    NlpIpm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Alg1 => write!(f, "alg1"),
            Method::Ga => write!(f, "ga"),
            Method::NlpIpm => write!(f, "nlp_ipm"),
        }
    }
}

/// Which scenario parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Gamma0Db,
    K,
    R,
    Environment,
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepParam::Gamma0Db => write!(f, "gamma0_db"),
            SweepParam::K => write!(f, "k"),
            SweepParam::R => write!(f, "r"),
            SweepParam::Environment => write!(f, "environment"),
        }
    }
}

/// One swept value: numeric for gamma0/K/R, a preset name for the
/// environment axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Num(f64),
    Name(String),
}

impl std::fmt::Display for SweepValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepValue::Num(v) => write!(f, "{v}"),
            SweepValue::Name(s) => write!(f, "{s}"),
        }
    }
}

/// Sweep description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<SweepValue>,
    /// Seeds per point: seed0, seed0+1, ...
    pub repetitions: usize,
    pub methods: Vec<Method>,
    pub kinds: Vec<DeploymentKind>,
    /// Base scenario shape; the swept parameter overrides its field.
    pub k: usize,
    pub r: f64,
    pub env: String,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default)]
    pub seed0: u64,
    /// Record wall-times. Off by default so sweep CSVs stay
    /// byte-deterministic; use `bench` for timing studies.
    #[serde(default)]
    pub timing: bool,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: String,
    pub kind: String,
    pub param: String,
    pub value: String,
    pub seed: u64,
    pub objective_w: Option<f64>,
    pub h_m: Option<f64>,
    pub theta_b_rad: Option<f64>,
    pub iters: Option<u64>,
    pub walltime_s: f64,
    pub feasible: bool,
}

pub const CSV_HEADER: &str =
    "method,kind,param,value,seed,objective_w,h_m,theta_b_rad,iters,walltime_s,feasible";

/// Run one solve and wrap it as a row. Failures become infeasible rows.
fn run_point(
    scenario: &Scenario,
    method: Method,
    param: &SweepParam,
    value: &SweepValue,
    timing: bool,
) -> SweepRow {
    let clock = Instant::now();
    let outcome: Result<Solution, String> = match method {
        Method::Alg1 => run_algorithm1(
            &scenario.deployment,
            &scenario.env,
            &scenario.cfg,
            &PlannerOptions::default(),
        )
        .map_err(|e| e.to_string()),
        Method::Ga => solve_ga(
            &scenario.deployment,
            &scenario.env,
            &scenario.cfg,
            &GaConfig { seed: scenario.seed, ..GaConfig::default() },
        )
        .map_err(|e| e.to_string()),
        Method::NlpIpm => solve_nlp_ipm(
            &scenario.deployment,
            &scenario.env,
            &scenario.cfg,
            &NlpConfig { seed: scenario.seed, ..NlpConfig::default() },
        )
        .map_err(|e| e.to_string()),
    };
    let walltime = clock.elapsed().as_secs_f64();
    let walltime_s = if timing { walltime } else { 0.0 };
    match outcome {
        Ok(sol) => SweepRow {
            method: method.to_string(),
            kind: scenario.kind.to_string(),
            param: param.to_string(),
            value: value.to_string(),
            seed: scenario.seed,
            objective_w: Some(sol.objective_w),
            h_m: Some(sol.placement.h),
            theta_b_rad: Some(sol.placement.theta_b),
            iters: Some(sol.trace.len() as u64),
            walltime_s,
            feasible: true,
        },
        Err(_) => SweepRow {
            method: method.to_string(),
            kind: scenario.kind.to_string(),
            param: param.to_string(),
            value: value.to_string(),
            seed: scenario.seed,
            objective_w: None,
            h_m: None,
            theta_b_rad: None,
            iters: None,
            walltime_s,
            feasible: false,
        },
    }
}

fn scenario_for(spec: &SweepSpec, value: &SweepValue, kind: DeploymentKind, seed: u64) -> Result<Scenario, String> {
    let mut k = spec.k;
    let mut r = spec.r;
    let mut env = spec.env.clone();
    let mut overrides = spec.overrides.clone();
    match (spec.param, value) {
        (SweepParam::Gamma0Db, SweepValue::Num(v)) => overrides.gamma0_db = Some(*v),
        (SweepParam::K, SweepValue::Num(v)) => k = *v as usize,
        (SweepParam::R, SweepValue::Num(v)) => r = *v,
        (SweepParam::Environment, SweepValue::Name(name)) => env = name.clone(),
        (p, v) => return Err(format!("value {v} does not fit parameter {p}")),
    }
    Scenario::generate(kind, k, r, seed, &env, &overrides).map_err(|e| e.to_string())
}

/// Execute a sweep. Points run in a parallel pool; the returned rows
/// are sorted by (value position, seed, method, kind) regardless of
/// completion order.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let mut points = Vec::new();
    for (vi, value) in spec.values.iter().enumerate() {
        for seed_off in 0..spec.repetitions.max(1) {
            for method in &spec.methods {
                for kind in &spec.kinds {
                    points.push((vi, value.clone(), spec.seed0 + seed_off as u64, *method, *kind));
                }
            }
        }
    }
    let mut rows: Vec<(usize, SweepRow)> = points
        .par_iter()
        .map(|(vi, value, seed, method, kind)| {
            let row = match scenario_for(spec, value, *kind, *seed) {
                Ok(scenario) => run_point(&scenario, *method, &spec.param, value, spec.timing),
                Err(_) => SweepRow {
                    method: method.to_string(),
                    kind: kind.to_string(),
                    param: spec.param.to_string(),
                    value: value.to_string(),
                    seed: *seed,
                    objective_w: None,
                    h_m: None,
                    theta_b_rad: None,
                    iters: None,
                    walltime_s: 0.0,
                    feasible: false,
                },
            };
            (*vi, row)
        })
        .collect();
    rows.sort_by(|(vi_a, a), (vi_b, b)| {
        vi_a.cmp(vi_b)
            .then(a.seed.cmp(&b.seed))
            .then(a.method.cmp(&b.method))
            .then(a.kind.cmp(&b.kind))
    });
    rows.into_iter().map(|(_, r)| r).collect()
}

/// Benchmark wall-times: like a K sweep with timing always on.
pub fn run_bench(
    ks: &[usize],
    methods: &[Method],
    repetitions: usize,
    base: &SweepSpec,
) -> Vec<SweepRow> {
    let spec = SweepSpec {
        param: SweepParam::K,
        values: ks.iter().map(|k| SweepValue::Num(*k as f64)).collect(),
        repetitions,
        methods: methods.to_vec(),
        kinds: base.kinds.clone(),
        k: base.k,
        r: base.r,
        env: base.env.clone(),
        overrides: base.overrides.clone(),
        seed0: base.seed0,
        timing: true,
    };
    run_sweep(&spec)
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

/// Render rows as CSV (LF line endings, `.` decimal separator).
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.method,
            r.kind,
            r.param,
            r.value,
            r.seed,
            fmt_opt(r.objective_w),
            fmt_opt(r.h_m),
            fmt_opt(r.theta_b_rad),
            r.iters.map(|i| i.to_string()).unwrap_or_default(),
            r.walltime_s,
            r.feasible,
        ));
    }
    out
}

/// Parse CSV produced by [`rows_to_csv`]; the round trip is lossless.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?;
    if header != CSV_HEADER {
        return Err(format!("unexpected header: {header}"));
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(format!("line {}: expected 11 fields, got {}", ln + 2, fields.len()));
        }
        let parse_opt = |s: &str| -> Result<Option<f64>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|e| e.to_string())
            }
        };
        rows.push(SweepRow {
            method: fields[0].to_string(),
            kind: fields[1].to_string(),
            param: fields[2].to_string(),
            value: fields[3].to_string(),
            seed: fields[4].parse().map_err(|e: std::num::ParseIntError| e.to_string())?,
            objective_w: parse_opt(fields[5])?,
            h_m: parse_opt(fields[6])?,
            theta_b_rad: parse_opt(fields[7])?,
            iters: if fields[8].is_empty() {
                None
            } else {
                Some(fields[8].parse().map_err(|e: std::num::ParseIntError| e.to_string())?)
            },
            walltime_s: fields[9].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?,
            feasible: fields[10].parse().map_err(|e: std::str::ParseBoolError| e.to_string())?,
        });
    }
    Ok(rows)
}

/// Mean of the objective over feasible rows matching a predicate.
pub fn mean_objective<F: Fn(&SweepRow) -> bool>(rows: &[SweepRow], pred: F) -> Option<f64> {
    let picked: Vec<f64> =
        rows.iter().filter(|r| r.feasible && pred(r)).filter_map(|r| r.objective_w).collect();
    if picked.is_empty() {
        None
    } else {
        Some(picked.iter().sum::<f64>() / picked.len() as f64)
    }
}

// ===========================================================================
// Tests
// ===========================================================================
