//! The linear specialization: constraints `f_i(x) = <x, -a_i>` built from
//! data rows, strict-interior certificates derived from a known separator,
//! and the classical perceptron trainer.
//!
//! With unit step size the subgradient update on a violated row is exactly
//! `x <- x + a_i`. The trainer implements that update (and the classical
//! mistake test `<x, a_i> <= 0`, which also fires on the boundary) in its
//! own loop; on runs where no iterate has an exact zero margin its trace is
//! bit-for-bit the generic solver's on the assembled linear problem.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::functions::ConstraintOracle;
use crate::problem::{FeasibilityProblem, SlaterCertificate};
use crate::solver::{
    cycle_period, FlagTotals, IterationRecord, MonitorFlags, SelectionRule, Selector,
    SolveOutcome, Verdict, DEFAULT_CYCLE_WINDOW,
};
use crate::space::Vector;
use crate::trace::format_float;

/// Rows `a_i` of a homogeneous linear feasibility problem: find `x` with
/// `<x, a_i> >= 0` for all `i` (strict positivity is what the trainer
/// reaches). Labeled data `(p_i, y_i)` reduces to rows `a_i = y_i p_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDataset {
    rows: Vec<Vector>,
    dim: usize,
}

impl LinearDataset {
    pub fn from_rows(rows: Vec<Vector>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDataset("no rows".into()));
        }
        let dim = rows[0].dim();
        for (index, row) in rows.iter().enumerate() {
            if row.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.dim(),
                });
            }
            if row.norm_sq() == 0.0 {
                return Err(Error::ZeroRow { index });
            }
        }
        Ok(Self { rows, dim })
    }

    /// Homogeneous reduction of labeled points: `a_i = y_i p_i`.
    pub fn from_labeled(points: Vec<Vector>, labels: &[f64]) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != 1.0 && y != -1.0 {
                return Err(Error::InvalidDataset(format!(
                    "label {y} at row {i}; labels must be +1 or -1"
                )));
            }
        }
        let rows = points
            .into_iter()
            .zip(labels)
            .map(|(p, &y)| if y == 1.0 { p } else { p.neg() })
            .collect();
        Self::from_rows(rows)
    }

    /// Parses the CSV form: one row of `.`-decimal reals per line, commas
    /// between columns. A leading `#labeled` line switches to labeled
    /// parsing, where the final column is the label in `{+1, -1}`. Other
    /// `#` lines are comments.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut labeled = false;
        let mut seen_data = false;
        let mut points: Vec<Vector> = Vec::new();
        let mut labels: Vec<f64> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(tag) = line.strip_prefix('#') {
                if tag.trim() == "labeled" {
                    if seen_data {
                        return Err(Error::InvalidDataset(format!(
                            "line {}: #labeled must precede the data",
                            lineno + 1
                        )));
                    }
                    labeled = true;
                }
                continue;
            }
            seen_data = true;
            let mut fields: Vec<f64> = Vec::new();
            for field in line.split(',') {
                let field = field.trim();
                let value: f64 = field.parse().map_err(|_| {
                    Error::InvalidDataset(format!(
                        "line {}: cannot parse `{field}` as a real",
                        lineno + 1
                    ))
                })?;
                fields.push(value);
            }
            if labeled {
                let label = fields.pop().ok_or_else(|| {
                    Error::InvalidDataset(format!("line {}: empty row", lineno + 1))
                })?;
                points.push(Vector::new(fields).map_err(|e| {
                    Error::InvalidDataset(format!("line {}: {e}", lineno + 1))
                })?);
                labels.push(label);
            } else {
                points.push(Vector::new(fields).map_err(|e| {
                    Error::InvalidDataset(format!("line {}: {e}", lineno + 1))
                })?);
            }
        }
        if labeled {
            Self::from_labeled(points, &labels)
        } else {
            Self::from_rows(points)
        }
    }

    /// Unlabeled CSV with round-trip-exact reals.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let line: Vec<String> = row.as_slice().iter().map(|&c| format_float(c)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one row by construction
    }

    /// `max_i ‖a_i‖`, the global subgradient bound of the linear problem.
    pub fn subgrad_bound(&self) -> f64 {
        self.rows.iter().map(Vector::norm).fold(0.0, f64::max)
    }

    /// `<x, a_i>` for every row.
    pub fn margins(&self, x: &Vector) -> Result<Vec<f64>> {
        self.rows.iter().map(|a| a.inner(x)).collect()
    }
}

/// A strict separator `z` with its margin data, from which scaled
/// certificates are derived: `s = rho (L^2 / mu) z` has slack exactly
/// `sigma = rho L^2`, so larger `rho` buys room for larger constant steps.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginCertificate {
    pub z: Vector,
    /// `min_i <z, a_i>`, strictly positive.
    pub mu: f64,
    /// `max_i ‖a_i‖`.
    pub subgrad_bound: f64,
    pub rho: f64,
}

impl MarginCertificate {
    pub fn derive(ds: &LinearDataset, z: &Vector, rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::CertificateNotPositive {
                field: "rho",
                value: rho,
            });
        }
        let margins = ds.margins(z)?;
        let mut mu = f64::INFINITY;
        for (index, &margin) in margins.iter().enumerate() {
            if margin <= 0.0 {
                return Err(Error::NotASeparator { index, margin });
            }
            mu = mu.min(margin);
        }
        Ok(Self {
            z: z.clone(),
            mu,
            subgrad_bound: ds.subgrad_bound(),
            rho,
        })
    }

    /// The scaled strict-interior certificate for the linear problem.
    pub fn slater(&self) -> Result<SlaterCertificate> {
        let l = self.subgrad_bound;
        let s = self.z.scale(self.rho * l * l / self.mu);
        SlaterCertificate::new(s, self.rho * l * l, l)
    }
}

/// Convenience: derive the scaled certificate in one call.
pub fn derive_certificate(ds: &LinearDataset, z: &Vector, rho: f64) -> Result<SlaterCertificate> {
    MarginCertificate::derive(ds, z, rho)?.slater()
}

/// Assembles the feasibility problem with constraints `f_i = <., -a_i>`.
pub fn build_problem(ds: &LinearDataset) -> Result<FeasibilityProblem> {
    let constraints = ds
        .rows
        .iter()
        .map(|a| ConstraintOracle::linear(a.neg(), 0.0))
        .collect::<Result<Vec<_>>>()?;
    FeasibilityProblem::new(ds.dim, constraints, None)
}

/// Runs the classical perceptron: while some row has `<x, a_i> <= 0`, pick
/// one per the selection rule and update `x <- x + alpha * a_i`. Stops when
/// all margins are strictly positive, the budget runs out, or the iterates
/// cycle exactly.
pub fn train_perceptron(
    ds: &LinearDataset,
    x0: &Vector,
    alpha: f64,
    budget: u64,
    rule: SelectionRule,
) -> Result<SolveOutcome> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidStepSize {
            value: alpha,
            reason: "perceptron step must be positive",
        });
    }
    if x0.dim() != ds.dim {
        return Err(Error::DimensionMismatch {
            expected: ds.dim,
            found: x0.dim(),
        });
    }

    let window = DEFAULT_CYCLE_WINDOW;
    let mut recent: VecDeque<Vector> = VecDeque::new();
    recent.push_back(x0.clone());

    let mut selector = Selector::new(rule);
    let mut trace = Vec::new();
    let mut x = x0.clone();

    for k in 0..=budget {
        let margins = ds.margins(&x)?;
        // Violations as the generic solver would score them: f_i = -<x, a_i>,
        // with a trailing `+ 0.0` normalizing a negative zero.
        let f_values: Vec<f64> = margins.iter().map(|m| -m + 0.0).collect();

        if margins.iter().all(|&m| m > 0.0) {
            return Ok(outcome(Verdict::Feasible { x, steps: k }, trace));
        }
        if k == budget {
            return Ok(outcome(Verdict::BudgetExhausted { x_last: x, steps: k }, trace));
        }

        let i = selector
            .select_where(&f_values, |f| f >= 0.0)
            .expect("some margin is <= 0");
        let g = ds.rows[i].neg();
        let g_norm = g.norm();
        let x_next = x.add_scaled(alpha, &ds.rows[i])?;
        trace.push(IterationRecord {
            k,
            x: x.clone(),
            i,
            f_value: f_values[i],
            g,
            g_norm,
            alpha,
            delta: None,
            flags: MonitorFlags::default(),
        });
        x = x_next;

        if recent.len() == 2 * window {
            recent.pop_front();
        }
        recent.push_back(x.clone());
        if let Some(period) = cycle_period(recent.make_contiguous(), window) {
            return Ok(outcome(
                Verdict::CycleDetected {
                    period,
                    x_last: x,
                    steps: k + 1,
                },
                trace,
            ));
        }
    }
    unreachable!("loop returns at or before k == budget");
}

fn outcome(verdict: Verdict, trace: Vec<IterationRecord>) -> SolveOutcome {
    SolveOutcome {
        verdict,
        trace,
        flag_totals: FlagTotals::default(),
        bound_used: None,
    }
}

/// Budget for the separator search in `estimate_margin`.
pub const ESTIMATE_BUDGET: u64 = 100_000;

/// Searches for a strict separator by training from the origin with unit
/// steps, then normalizing the result. Returns the separator and its
/// verified margin `min_i <z, a_i> > 0`, or `None` when the search fails
/// (in particular whenever no separator exists).
pub fn estimate_margin(ds: &LinearDataset) -> Result<Option<(Vector, f64)>> {
    let x0 = Vector::zeros(ds.dim)?;
    let out = train_perceptron(ds, &x0, 1.0, ESTIMATE_BUDGET, SelectionRule::FirstViolated)?;
    let x = match out.verdict {
        Verdict::Feasible { x, .. } => x,
        _ => return Ok(None),
    };
    let norm = x.norm();
    if norm == 0.0 {
        return Ok(None);
    }
    let z = x.scale(1.0 / norm);
    let mu = ds
        .margins(&z)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if mu > 0.0 {
        Ok(Some((z, mu)))
    } else {
        Ok(None)
    }
}

/// The scale grid `2^-3 ..= 2^10` scanned when minimizing the a-priori
/// update bound over certificate scalings.
pub fn rho_grid() -> Vec<f64> {
    (-3..=10).map(|e| (e as f64).exp2()).collect()
}
