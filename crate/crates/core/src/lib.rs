//! Solver library for convex inequality systems: find a point `x` with
//! `f_i(x) <= 0` for every member of a finite family of convex constraints,
//! by repeatedly stepping against a subgradient of a violated constraint.
//!
//! When a strict-interior certificate `(s, sigma, L)` is available — a point
//! with `f_i(s) <= -sigma < 0` and a bound `L` on subgradient norms — every
//! step with positive decrease budget `delta_k = alpha_k (2 sigma - alpha_k
//! L^2)` pulls the iterate closer to `s` by at least `delta_k` in squared
//! distance. That yields an a-priori update bound ([`iteration_bound`]) and
//! runtime monitors that verify the descent on every recorded step.
//!
//! Without strict feasibility the method can stall or cycle; the [`repro`]
//! module packages exact, self-checking demonstrations, and [`perceptron`]
//! covers the linear case, where the unit-step iteration is the classical
//! perceptron.

pub mod error;
pub mod functions;
pub mod gen;
pub mod perceptron;
pub mod problem;
pub mod repro;
pub mod schedules;
pub mod solver;
pub mod space;
pub mod trace;

pub use error::{Error, Result};
pub use functions::ConstraintOracle;
pub use problem::{CertificateIssue, CertificateReport, FeasibilityProblem, SlaterCertificate};
pub use schedules::{iteration_bound, validate_constant, StepSchedule, TailRule};
pub use solver::{
    detect_cycle, monitor_one_step, solve, step, FlagTotals, IterationRecord, MonitorFlags,
    SelectionRule, Selector, SolveOptions, SolveOutcome, Verdict,
};
pub use space::{float_slack, Vector};
