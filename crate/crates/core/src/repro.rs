//! Named, self-checking reproduction scenarios.
//!
//! Each case runs the solver on a small problem whose exact trajectory is
//! known in closed form, and reports one pass/fail line per assertion:
//!
//! * `remark-2-6` — a single smoothed-absolute-value constraint whose only
//!   feasible point has no strict interior: the iterates `1/(k+1)` converge
//!   to it but never land on it, so no budget ever yields a feasible verdict.
//! * `example-2-7` — a one-sided variant paired with an affine constraint:
//!   lowest-index selection keeps stepping on the first constraint and the
//!   iterates converge to a point that still violates the second.
//! * `example-3-1` — two opposing half-lines under a constant step: the
//!   iterates alternate between two values exactly, and the cycle detector
//!   reports period 2.

use crate::error::{Error, Result};
use crate::functions::ConstraintOracle;
use crate::perceptron::{build_problem, LinearDataset};
use crate::problem::FeasibilityProblem;
use crate::schedules::StepSchedule;
use crate::solver::{detect_cycle, solve, SelectionRule, SolveOptions, Verdict};
use crate::space::Vector;

/// Relative tolerance for matching the harmonic closed forms; rounding
/// drift over ten thousand steps stays far below this.
pub const CLOSED_FORM_RTOL: f64 = 1e-12;

/// One checked statement of a reproduction case.
#[derive(Debug, Clone)]
pub struct ReproAssertion {
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail report of one case.
#[derive(Debug, Clone)]
pub struct ReproReport {
    pub case: &'static str,
    pub assertions: Vec<ReproAssertion>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    fn check(&mut self, label: &'static str, passed: bool, detail: String) {
        self.assertions.push(ReproAssertion {
            label,
            passed,
            detail,
        });
    }
}

fn rel_matches(x: f64, expected: f64) -> bool {
    (x - expected).abs() <= CLOSED_FORM_RTOL * expected.abs()
}

/// Checks every recorded iterate plus the final point against `1/(k+1)`.
/// Returns the first mismatch, if any.
fn check_harmonic_curve(
    trace_xs: &[(u64, f64)],
) -> std::result::Result<(), (u64, f64, f64)> {
    for &(k, x) in trace_xs {
        let expected = 1.0 / (k as f64 + 1.0);
        if !rel_matches(x, expected) {
            return Err((k, x, expected));
        }
    }
    Ok(())
}

fn collect_curve(
    out: &crate::solver::SolveOutcome,
    steps: u64,
) -> Vec<(u64, f64)> {
    let mut xs: Vec<(u64, f64)> = out.trace.iter().map(|r| (r.k, r.x[0])).collect();
    xs.push((steps, out.verdict.final_point()[0]));
    xs
}

/// Single smoothed-absolute-value constraint, start 1, steps `1/(k+2)`:
/// the iterates trace `1/(k+1)`, never reaching the sole feasible point.
pub fn run_remark_2_6(steps: u64) -> Result<ReproReport> {
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    let problem = FeasibilityProblem::new(1, vec![ConstraintOracle::huber(0)], None)?;
    let sched = StepSchedule::harmonic(2.0)?;
    let opts = SolveOptions {
        budget: Some(steps),
        ..SolveOptions::default()
    };
    let out = solve(
        &problem,
        &Vector::from_slice(&[1.0])?,
        SelectionRule::FirstViolated,
        &sched,
        &opts,
    )?;

    let mut report = ReproReport {
        case: "remark-2-6",
        assertions: Vec::new(),
    };

    match check_harmonic_curve(&collect_curve(&out, steps)) {
        Ok(()) => report.check(
            "iterates match 1/(k+1)",
            true,
            format!("all {} iterates within rtol {CLOSED_FORM_RTOL:.0e}", steps + 1),
        ),
        Err((k, x, e)) => report.check(
            "iterates match 1/(k+1)",
            false,
            format!("k={k}: x={x:.17e}, expected {e:.17e}"),
        ),
    }

    let mut infeasible = true;
    for (k, x) in collect_curve(&out, steps) {
        let value = problem.residual(&Vector::from_slice(&[x])?)?[0];
        if value <= 0.0 {
            infeasible = false;
            report.check(
                "every iterate stays infeasible",
                false,
                format!("k={k}: residual {value:.3e} <= 0"),
            );
            break;
        }
    }
    if infeasible {
        report.check(
            "every iterate stays infeasible",
            true,
            "residual stayed positive at every step".into(),
        );
    }

    let exhausted = matches!(out.verdict, Verdict::BudgetExhausted { .. });
    report.check(
        "verdict is budget_exhausted, never feasible",
        exhausted,
        format!("verdict after {steps} steps: {:?}", out.verdict),
    );

    Ok(report)
}

/// One-sided constraint first, affine `x + 1` second. Lowest-index
/// selection keeps choosing the first even though the second is more
/// violated, and the limit point 0 still violates the second.
pub fn run_example_2_7(steps: u64) -> Result<ReproReport> {
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    let problem = example_2_7_problem()?;
    let sched = StepSchedule::harmonic(2.0)?;
    let opts = SolveOptions {
        budget: Some(steps),
        ..SolveOptions::default()
    };
    let x0 = Vector::from_slice(&[1.0])?;
    let out = solve(&problem, &x0, SelectionRule::FirstViolated, &sched, &opts)?;

    let mut report = ReproReport {
        case: "example-2-7",
        assertions: Vec::new(),
    };

    let wrong = out.trace.iter().find(|r| r.i != 0);
    report.check(
        "selected index is always the first constraint",
        wrong.is_none(),
        match wrong {
            None => format!("all {} selections hit index 0", out.trace.len()),
            Some(r) => format!("k={}: selected index {}", r.k, r.i),
        },
    );

    match check_harmonic_curve(&collect_curve(&out, steps)) {
        Ok(()) => report.check(
            "iterates match 1/(k+1)",
            true,
            format!("all {} iterates within rtol {CLOSED_FORM_RTOL:.0e}", steps + 1),
        ),
        Err((k, x, e)) => report.check(
            "iterates match 1/(k+1)",
            false,
            format!("k={k}: x={x:.17e}, expected {e:.17e}"),
        ),
    }

    let mut both_violated = true;
    for r in &out.trace {
        let res = problem.residual(&r.x)?;
        if !(res[0] > 0.0 && res[1] > 0.0) {
            both_violated = false;
            report.check(
                "both constraints violated at every step",
                false,
                format!("k={}: residual {:?}", r.k, res),
            );
            break;
        }
    }
    if both_violated {
        report.check(
            "both constraints violated at every step",
            true,
            "second residual is x + 1 > 1 at every visited point".into(),
        );
    }

    let limit_res = problem.residual(&Vector::from_slice(&[0.0])?)?;
    report.check(
        "residual at the limit point 0 is [0, 1] exactly",
        limit_res == vec![0.0, 1.0],
        format!("residual(0) = {limit_res:?}"),
    );

    let exhausted = matches!(out.verdict, Verdict::BudgetExhausted { .. });
    report.check(
        "verdict is budget_exhausted, never feasible",
        exhausted,
        format!("verdict after {steps} steps: {:?}", out.verdict),
    );

    // Contrast: chasing the largest violation instead walks left past -1
    // and terminates feasible.
    let contrast_opts = SolveOptions {
        budget: Some(10_000),
        ..SolveOptions::default()
    };
    let contrast = solve(
        &problem,
        &x0,
        SelectionRule::MostViolated,
        &sched,
        &contrast_opts,
    )?;
    let ok = contrast.verdict.is_feasible() && contrast.verdict.final_point()[0] <= -1.0;
    report.check(
        "most-violated selection instead terminates feasible at x <= -1",
        ok,
        format!(
            "verdict {:?} after {} steps",
            contrast.verdict,
            contrast.verdict.steps()
        ),
    );

    Ok(report)
}

pub(crate) fn example_2_7_problem() -> Result<FeasibilityProblem> {
    FeasibilityProblem::new(
        1,
        vec![
            ConstraintOracle::truncated_huber(0),
            ConstraintOracle::linear(Vector::from_slice(&[1.0])?, 1.0)?,
        ],
        None,
    )
}

/// Number of exact periods checked by `run_example_3_1`.
pub const CYCLE_PERIODS_CHECKED: u64 = 100;

/// Opposing rows `1` and `-1` under constant step `alpha` from
/// `x0 in ]0, alpha[`: even iterates equal `x0` and odd iterates equal
/// `x0 - alpha`, bit for bit, and the cycle detector reports period 2.
pub fn run_example_3_1(alpha: f64, x0: f64) -> Result<ReproReport> {
    if !(alpha.is_finite() && x0.is_finite() && 0.0 < x0 && x0 < alpha) {
        return Err(Error::Precondition(format!(
            "x0 must lie strictly between 0 and alpha; got x0={x0}, alpha={alpha}"
        )));
    }
    let ds = LinearDataset::from_rows(vec![
        Vector::from_slice(&[1.0])?,
        Vector::from_slice(&[-1.0])?,
    ])?;
    let problem = build_problem(&ds)?;
    let sched = StepSchedule::constant(alpha)?;
    let start = Vector::from_slice(&[x0])?;

    let mut report = ReproReport {
        case: "example-3-1",
        assertions: Vec::new(),
    };

    // Full trajectory with detection off, long enough for the periods.
    let budget = 2 * CYCLE_PERIODS_CHECKED + 2;
    let opts = SolveOptions {
        budget: Some(budget),
        cycle_detection: false,
        ..SolveOptions::default()
    };
    let out = solve(&problem, &start, SelectionRule::FirstViolated, &sched, &opts)?;

    let low = x0 - alpha;
    let mut exact = true;
    for r in &out.trace {
        let expected = if r.k % 2 == 0 { x0 } else { low };
        if r.x[0].to_bits() != expected.to_bits() {
            exact = false;
            report.check(
                "period-2 trajectory is exact bit for bit",
                false,
                format!("k={}: x={:.17e}, expected {expected:.17e}", r.k, r.x[0]),
            );
            break;
        }
    }
    if exact {
        report.check(
            "period-2 trajectory is exact bit for bit",
            true,
            format!("x_2k = {x0}, x_2k+1 = {low} over {CYCLE_PERIODS_CHECKED} periods"),
        );
    }

    report.check(
        "run never terminates",
        matches!(out.verdict, Verdict::BudgetExhausted { .. }),
        format!("verdict {:?}", out.verdict),
    );

    let period = detect_cycle(&out.trace, 8);
    report.check(
        "cycle detector reports period 2",
        period == Some(2),
        format!("detect_cycle over window 8: {period:?}"),
    );

    // With detection on the solve itself stops on the cycle.
    let detect_opts = SolveOptions {
        budget: Some(budget),
        ..SolveOptions::default()
    };
    let detected = solve(
        &problem,
        &start,
        SelectionRule::FirstViolated,
        &sched,
        &detect_opts,
    )?;
    let ok = matches!(detected.verdict, Verdict::CycleDetected { period: 2, .. });
    report.check(
        "solve verdict is cycle_detected with period 2",
        ok,
        format!("verdict {:?}", detected.verdict),
    );

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remark_2_6_small_curve() {
        let report = run_remark_2_6(3).unwrap();
        assert!(report.passed(), "{:#?}", report.assertions);

        // x = [1, 1/2, 1/3, 1/4].
        let problem =
            FeasibilityProblem::new(1, vec![ConstraintOracle::huber(0)], None).unwrap();
        let sched = StepSchedule::harmonic(2.0).unwrap();
        let opts = SolveOptions {
            budget: Some(3),
            ..SolveOptions::default()
        };
        let out = solve(
            &problem,
            &Vector::from_slice(&[1.0]).unwrap(),
            SelectionRule::FirstViolated,
            &sched,
            &opts,
        )
        .unwrap();
        let xs: Vec<f64> = collect_curve(&out, 3).iter().map(|&(_, x)| x).collect();
        for (x, expected) in xs.iter().zip([1.0, 0.5, 1.0 / 3.0, 0.25]) {
            assert!((x - expected).abs() <= 1e-12 * expected);
        }
        // x_0 is the unchanged starting point.
        assert_eq!(xs[0], 1.0);
    }

    #[test]
    fn remark_2_6_longer_run_stays_infeasible() {
        let report = run_remark_2_6(1000).unwrap();
        assert!(report.passed(), "{:#?}", report.assertions);
    }

    #[test]
    fn example_2_7_selects_first_and_escapes_with_most_violated() {
        let report = run_example_2_7(1000).unwrap();
        assert!(report.passed(), "{:#?}", report.assertions);

        // Independent count for the most-violated contrast: x walks down by
        // 1/(k+2) from 1 until it passes -1.
        let mut x = 1.0f64;
        let mut k = 0u64;
        while x > -1.0 {
            x -= 1.0 / (k as f64 + 2.0);
            k += 1;
        }
        assert_eq!(k, 10);

        let problem = example_2_7_problem().unwrap();
        let sched = StepSchedule::harmonic(2.0).unwrap();
        let opts = SolveOptions {
            budget: Some(100),
            ..SolveOptions::default()
        };
        let out = solve(
            &problem,
            &Vector::from_slice(&[1.0]).unwrap(),
            SelectionRule::MostViolated,
            &sched,
            &opts,
        )
        .unwrap();
        assert_eq!(out.verdict.steps(), k);
        assert_eq!(out.verdict.final_point()[0], x);
    }

    #[test]
    fn example_3_1_dyadic_pairs_are_exact() {
        let report = run_example_3_1(1.0, 0.5).unwrap();
        assert!(report.passed(), "{:#?}", report.assertions);

        let report = run_example_3_1(0.25, 0.125).unwrap();
        assert!(report.passed(), "{:#?}", report.assertions);
    }

    #[test]
    fn example_3_1_preconditions() {
        assert!(run_example_3_1(1.0, 1.0).is_err());
        assert!(run_example_3_1(1.0, 0.0).is_err());
        assert!(run_example_3_1(1.0, 1.5).is_err());
        assert!(run_example_3_1(1.0, -0.5).is_err());
        assert!(run_remark_2_6(0).is_err());
        assert!(run_example_2_7(0).is_err());
    }
}
