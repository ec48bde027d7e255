//! Energy-fair configuration of a UAV-assisted IoT uplink.
//!
//! The library plans the 3D position and antenna half beamwidth of a
//! rotary-wing UAV base station together with the uplink transmit powers
//! of the IoT devices it serves, minimizing the worst-case average
//! energy consumption `max_k c_k p_k` subject to average-SINR QoS
//! constraints. The planner alternates two geometric programs (height /
//! beamwidth, then horizontal position) and finishes with an exact
//! linear-programming power refinement.
//!
//! Modules:
//! - [`channel`]: air-to-ground geometry and average-channel model
//! - [`feasibility`]: pre-solve SINR-target bound, post-solve constraint
//!   verification, and sub-problem size bookkeeping
//! - [`gp`]: monomial/posynomial algebra, the GP-to-convex transform, a
//!   log-barrier interior-point solver, and a dense simplex LP solver
//! - [`planner`]: the three sub-problem builders and the alternating
//!   optimization loop
//! - [`baselines`]: genetic-algorithm and nonlinear interior-point
//!   benchmarks operating on the original non-convex problem
//! - [`scenario`]: deterministic/random deployments and seeded scenarios
//! - [`sweep`]: parameter sweeps, method benchmarks, and CSV output

pub mod baselines;
pub mod channel;
pub mod error;
pub mod feasibility;
pub mod gp;
pub mod planner;
pub mod scenario;
pub mod sweep;

pub use channel::{Deployment, Environment, SystemConfig, UavPlacement};
pub use error::ModelError;
pub use feasibility::{ComplexityCounts, ConstraintSlacks, FeasibilityReport, Subproblem};
pub use planner::{PlannerError, PlannerOptions, Solution};
pub use scenario::{DeploymentKind, Scenario};
