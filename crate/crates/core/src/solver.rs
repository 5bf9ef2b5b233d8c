//! The main iteration: check feasibility, pick a violated constraint, step
//! along its negated subgradient, record, and stop on one of three verdicts.
//!
//! With a certificate attached the solver also monitors, per step, the
//! descent estimate `‖x_{k+1} - s‖^2 <= ‖x_k - s‖^2 - delta_k`, the margin
//! inequality `<x_k - s, g_k> > sigma`, and the declared subgradient bound.
//! Fired monitors are diagnostics carried in the trace, never aborts: runs
//! that break the hypotheses are exactly the ones worth inspecting.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::{FeasibilityProblem, SlaterCertificate};
use crate::schedules::{delta_for, iteration_bound, StepSchedule};
use crate::space::{float_slack, Vector};

/// How the violated constraint index `i_k` is chosen among all constraints
/// with `f_i(x_k) > tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Lowest violated index (the default).
    FirstViolated,
    /// Largest violation; ties resolve to the lowest index.
    MostViolated,
    /// Round-robin scan resuming after the previously chosen index.
    Cyclic,
    /// Uniformly random violated index from a seeded generator.
    Random { seed: u64 },
}

/// Stateful selector built from a rule at the start of a solve.
#[derive(Debug, Clone)]
pub struct Selector {
    rule: SelectionRule,
    cursor: usize,
    rng: Option<ChaCha8Rng>,
}

impl Selector {
    pub fn new(rule: SelectionRule) -> Self {
        let rng = match rule {
            SelectionRule::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self {
            rule,
            cursor: 0,
            rng,
        }
    }

    /// Index of the constraint to step on, or `None` if nothing is violated.
    pub fn select(&mut self, residuals: &[f64], tolerance: f64) -> Option<usize> {
        self.select_where(residuals, |v| v > tolerance)
    }

    /// Same traversal and tie-breaking, with a caller-supplied membership
    /// test on the scores. The classical perceptron admits boundary rows
    /// (`score >= 0`) that the solver's strict test excludes.
    pub(crate) fn select_where(
        &mut self,
        scores: &[f64],
        candidate: impl Fn(f64) -> bool,
    ) -> Option<usize> {
        let violated = |i: usize| candidate(scores[i]);
        match self.rule {
            SelectionRule::FirstViolated => (0..scores.len()).find(|&i| violated(i)),
            SelectionRule::MostViolated => {
                let mut best: Option<usize> = None;
                for i in 0..scores.len() {
                    if violated(i) && best.is_none_or(|b| scores[i] > scores[b]) {
                        best = Some(i);
                    }
                }
                best
            }
            SelectionRule::Cyclic => {
                let m = scores.len();
                let found = (0..m)
                    .map(|off| (self.cursor + off) % m)
                    .find(|&i| violated(i));
                if let Some(i) = found {
                    self.cursor = (i + 1) % m;
                }
                found
            }
            SelectionRule::Random { .. } => {
                let candidates: Vec<usize> = (0..scores.len()).filter(|&i| violated(i)).collect();
                if candidates.is_empty() {
                    return None;
                }
                let rng = self.rng.as_mut().expect("random rule carries a generator");
                Some(candidates[rng.gen_range(0..candidates.len())])
            }
        }
    }
}

/// Diagnostics attached to one step. All default to clear.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MonitorFlags {
    /// `‖x_{k+1} - s‖^2 > ‖x_k - s‖^2 - delta_k` beyond float slack.
    pub one_step_estimate: bool,
    /// `<x_k - s, g_k> <= sigma`.
    pub slater_margin: bool,
    /// `‖g_k‖ > L` beyond float slack.
    pub subgrad_bound: bool,
    /// The step's decrease budget `delta_k` was negative.
    pub negative_delta: bool,
}

impl MonitorFlags {
    pub fn any(&self) -> bool {
        self.one_step_estimate || self.slater_margin || self.subgrad_bound || self.negative_delta
    }

    /// Stable flag names, used verbatim in trace output.
    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.one_step_estimate {
            out.push("one_step_estimate");
        }
        if self.slater_margin {
            out.push("slater_margin");
        }
        if self.subgrad_bound {
            out.push("subgrad_bound");
        }
        if self.negative_delta {
            out.push("negative_delta");
        }
        out
    }
}

/// Totals of fired flags across a whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlagTotals {
    pub one_step_estimate: u64,
    pub slater_margin: u64,
    pub subgrad_bound: u64,
    pub negative_delta: u64,
}

impl FlagTotals {
    fn absorb(&mut self, flags: &MonitorFlags) {
        self.one_step_estimate += flags.one_step_estimate as u64;
        self.slater_margin += flags.slater_margin as u64;
        self.subgrad_bound += flags.subgrad_bound as u64;
        self.negative_delta += flags.negative_delta as u64;
    }
}

/// One non-terminal step of the iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: u64,
    /// Iterate before the update.
    pub x: Vector,
    /// Chosen violated constraint index (zero-based).
    pub i: usize,
    /// `f_i(x_k)` for the chosen index.
    pub f_value: f64,
    /// Subgradient of the chosen constraint at `x_k`.
    pub g: Vector,
    pub g_norm: f64,
    pub alpha: f64,
    /// Decrease budget; present only when a certificate is attached.
    pub delta: Option<f64>,
    pub flags: MonitorFlags,
}

/// Terminal state of a solve.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// The iterate passed the feasibility test after `steps` updates.
    Feasible { x: Vector, steps: u64 },
    /// The budget ran out with the last iterate still infeasible.
    BudgetExhausted { x_last: Vector, steps: u64 },
    /// The iterates repeat exactly with the given period.
    CycleDetected {
        period: usize,
        x_last: Vector,
        steps: u64,
    },
}

impl Verdict {
    pub fn steps(&self) -> u64 {
        match self {
            Verdict::Feasible { steps, .. }
            | Verdict::BudgetExhausted { steps, .. }
            | Verdict::CycleDetected { steps, .. } => *steps,
        }
    }

    pub fn final_point(&self) -> &Vector {
        match self {
            Verdict::Feasible { x, .. } => x,
            Verdict::BudgetExhausted { x_last, .. } => x_last,
            Verdict::CycleDetected { x_last, .. } => x_last,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible { .. })
    }
}

/// Result of a solve: verdict, per-step records, flag totals, and the
/// a-priori bound used to default the budget (when one was computed).
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    pub trace: Vec<IterationRecord>,
    pub flag_totals: FlagTotals,
    pub bound_used: Option<u64>,
}

/// Knobs for `solve`. The defaults match the documented behavior: exact
/// feasibility test, monitors on, cycle detection on for constant steps
/// with a 64-iterate window, and budget defaulting to the a-priori bound
/// plus slack when one exists, else one million.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Feasibility tolerance: `x` is accepted iff every `f_i(x) <= tolerance`.
    pub tolerance: f64,
    /// Maximum number of updates; `None` picks the default.
    pub budget: Option<u64>,
    pub monitors: bool,
    /// Engage exact-cycle detection (constant schedules only).
    pub cycle_detection: bool,
    /// Largest period searched for.
    pub cycle_window: usize,
    /// Keep per-step records. Flag totals are counted either way.
    pub record_trace: bool,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_CYCLE_WINDOW: usize = 64;
pub const BUDGET_SLACK: u64 = 10;

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.0,
            budget: None,
            monitors: true,
            cycle_detection: true,
            cycle_window: DEFAULT_CYCLE_WINDOW,
            record_trace: true,
        }
    }
}

/// One update from `x`: pick a violated index per the selector, take the
/// subgradient step `x - alpha_k g_k`, and report the record.
pub fn step(
    problem: &FeasibilityProblem,
    x: &Vector,
    selector: &mut Selector,
    sched: &StepSchedule,
    k: u64,
    tolerance: f64,
) -> Result<(Vector, IterationRecord)> {
    let residuals = problem.residual(x)?;
    step_inner(problem, x, &residuals, selector, sched, k, tolerance)
}

fn step_inner(
    problem: &FeasibilityProblem,
    x: &Vector,
    residuals: &[f64],
    selector: &mut Selector,
    sched: &StepSchedule,
    k: u64,
    tolerance: f64,
) -> Result<(Vector, IterationRecord)> {
    let i = selector
        .select(residuals, tolerance)
        .ok_or(Error::NoViolatedConstraint)?;
    let g = problem.constraints()[i].subgradient(x)?;
    let g_norm = g.norm();
    let alpha = sched.alpha(k, g_norm)?;
    let delta = problem.slater().map(|cert| delta_for(alpha, cert));
    let x_next = x.sub_scaled(alpha, &g)?;
    let record = IterationRecord {
        k,
        x: x.clone(),
        i,
        f_value: residuals[i],
        g,
        g_norm,
        alpha,
        delta,
        flags: MonitorFlags::default(),
    };
    Ok((x_next, record))
}

/// Evaluates the per-step monitors for a completed record against a
/// certificate and the next iterate.
pub fn monitor_one_step(
    record: &IterationRecord,
    cert: &SlaterCertificate,
    x_next: &Vector,
) -> Result<MonitorFlags> {
    let mut flags = MonitorFlags::default();
    let dist_sq = record.x.sub(&cert.s)?.norm_sq();
    let next_dist_sq = x_next.sub(&cert.s)?.norm_sq();
    let delta = delta_for(record.alpha, cert);
    if next_dist_sq > dist_sq - delta + float_slack(dist_sq) {
        flags.one_step_estimate = true;
    }
    let margin = record.x.sub(&cert.s)?.inner(&record.g)?;
    if margin <= cert.sigma {
        flags.slater_margin = true;
    }
    if record.g_norm > cert.subgrad_bound + float_slack(cert.subgrad_bound) {
        flags.subgrad_bound = true;
    }
    Ok(flags)
}

/// Runs the iteration from `x0` until feasibility, budget exhaustion, or an
/// exact cycle.
pub fn solve(
    problem: &FeasibilityProblem,
    x0: &Vector,
    rule: SelectionRule,
    sched: &StepSchedule,
    opts: &SolveOptions,
) -> Result<SolveOutcome> {
    let mut bound_used = None;
    let budget = match opts.budget {
        Some(b) => b,
        None => match problem.slater() {
            Some(cert) => match iteration_bound(x0, cert, sched)? {
                Some(bound) => {
                    bound_used = Some(bound);
                    bound.saturating_add(BUDGET_SLACK)
                }
                None => DEFAULT_BUDGET,
            },
            None => DEFAULT_BUDGET,
        },
    };

    let detect = opts.cycle_detection && sched.is_constant() && opts.cycle_window > 0;
    let mut recent: VecDeque<Vector> = VecDeque::new();
    if detect {
        recent.push_back(x0.clone());
    }

    let mut selector = Selector::new(rule);
    let mut trace = Vec::new();
    let mut flag_totals = FlagTotals::default();
    let mut x = x0.clone();

    for k in 0..=budget {
        let residuals = problem.residual(&x)?;
        if residuals.iter().all(|&v| v <= opts.tolerance) {
            return Ok(SolveOutcome {
                verdict: Verdict::Feasible { x, steps: k },
                trace,
                flag_totals,
                bound_used,
            });
        }
        if k == budget {
            return Ok(SolveOutcome {
                verdict: Verdict::BudgetExhausted { x_last: x, steps: k },
                trace,
                flag_totals,
                bound_used,
            });
        }

        let (x_next, mut record) =
            step_inner(problem, &x, &residuals, &mut selector, sched, k, opts.tolerance)?;

        if let Some(cert) = problem.slater() {
            if opts.monitors {
                record.flags = monitor_one_step(&record, cert, &x_next)?;
            }
            if record.delta.is_some_and(|d| d < 0.0) {
                record.flags.negative_delta = true;
            }
        }
        flag_totals.absorb(&record.flags);
        if opts.record_trace {
            trace.push(record);
        }

        x = x_next;

        if detect {
            if recent.len() == 2 * opts.cycle_window {
                recent.pop_front();
            }
            recent.push_back(x.clone());
            if let Some(period) = cycle_period(recent.make_contiguous(), opts.cycle_window) {
                return Ok(SolveOutcome {
                    verdict: Verdict::CycleDetected {
                        period,
                        x_last: x,
                        steps: k + 1,
                    },
                    trace,
                    flag_totals,
                    bound_used,
                });
            }
        }
    }
    unreachable!("loop returns at or before k == budget");
}

/// Smallest period `p <= window` such that the last `2p` iterates of the
/// trace form two bitwise-identical blocks, if any.
pub fn detect_cycle(trace: &[IterationRecord], window: usize) -> Option<usize> {
    let xs: Vec<Vector> = trace.iter().map(|r| r.x.clone()).collect();
    detect_cycle_points(&xs, window)
}

/// The same probe on a bare point sequence.
pub fn detect_cycle_points(xs: &[Vector], window: usize) -> Option<usize> {
    cycle_period(xs, window)
}

pub(crate) fn cycle_period(xs: &[Vector], window: usize) -> Option<usize> {
    let n = xs.len();
    for p in 1..=window {
        if 2 * p > n {
            break;
        }
        // Cheap probe on the newest pair before verifying the whole block.
        if !xs[n - 1].bits_eq(&xs[n - 1 - p]) {
            continue;
        }
        if (1..p).all(|t| xs[n - 1 - t].bits_eq(&xs[n - 1 - t - p])) {
            return Some(p);
        }
    }
    None
}
