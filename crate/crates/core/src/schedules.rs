//! Step-size schedules and the a-priori update bound they induce.
//!
//! A schedule produces the nonnegative step `alpha_k`; together with a
//! certificate `(s, sigma, L)` each step carries the decrease budget
//! `delta_k = alpha_k * (2 sigma - alpha_k L^2)`. While the decrease
//! budgets stay nonnegative, every update shrinks `‖x_k - s‖^2` by at
//! least `delta_k`, which is what makes the update bound a-priori.

use crate::error::{Error, Result};
use crate::problem::SlaterCertificate;
use crate::space::Vector;

/// What an explicit schedule does once its list runs out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Surface exhaustion as an error (the default).
    Error,
    /// Keep returning the last listed value.
    RepeatLast,
    /// Return zero from there on.
    Zero,
}

/// Rule producing the step size `alpha_k >= 0` for each step index.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSchedule {
    /// `alpha_k = alpha` for every `k`.
    Constant(f64),
    /// `alpha_k = 1 / (k + offset)`; diverging sum, square-summable.
    Harmonic { offset: f64 },
    /// A finite list of steps plus a tail rule.
    Explicit { values: Vec<f64>, tail: TailRule },
    /// Wraps an inner schedule, dividing each step by `max(1, ‖g_k‖)`.
    Normalized(Box<StepSchedule>),
}

impl StepSchedule {
    pub fn constant(alpha: f64) -> Result<Self> {
        check_step(alpha)?;
        Ok(Self::Constant(alpha))
    }

    pub fn harmonic(offset: f64) -> Result<Self> {
        if !offset.is_finite() || offset <= 0.0 {
            return Err(Error::InvalidScheduleOffset(offset));
        }
        Ok(Self::Harmonic { offset })
    }

    pub fn explicit(values: Vec<f64>, tail: TailRule) -> Result<Self> {
        for &v in &values {
            check_step(v)?;
        }
        Ok(Self::Explicit { values, tail })
    }

    pub fn normalized(inner: StepSchedule) -> Self {
        Self::Normalized(Box::new(inner))
    }

    /// The step size for step `k`. `g_norm` is consulted only by
    /// `Normalized` schedules and ignored otherwise.
    pub fn alpha(&self, k: u64, g_norm: f64) -> Result<f64> {
        match self {
            Self::Constant(alpha) => Ok(*alpha),
            Self::Harmonic { offset } => Ok(1.0 / (k as f64 + offset)),
            Self::Explicit { values, tail } => match values.get(usize::try_from(k).unwrap_or(usize::MAX)) {
                Some(&v) => Ok(v),
                None => match tail {
                    TailRule::Error => Err(Error::ScheduleExhausted { step: k }),
                    TailRule::RepeatLast => Ok(values.last().copied().unwrap_or(0.0)),
                    TailRule::Zero => Ok(0.0),
                },
            },
            Self::Normalized(inner) => Ok(inner.alpha(k, g_norm)? / g_norm.max(1.0)),
        }
    }

    /// Decrease budget `delta_k = alpha_k (2 sigma - alpha_k L^2)`.
    /// May be negative; the solver records that as a diagnostic.
    pub fn delta(&self, k: u64, cert: &SlaterCertificate, g_norm: f64) -> Result<f64> {
        let alpha = self.alpha(k, g_norm)?;
        Ok(delta_for(alpha, cert))
    }

    /// Whether the produced steps are a single constant (the only case in
    /// which exact cycling is possible and cycle detection engages).
    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }

    /// Whether `delta_k` can be computed without runtime subgradient
    /// norms.
    fn delta_is_a_priori(&self) -> bool {
        !matches!(self, Self::Normalized(_))
    }
}

fn check_step(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::InvalidStepSize {
            value: alpha,
            reason: "not finite",
        });
    }
    if alpha < 0.0 {
        return Err(Error::InvalidStepSize {
            value: alpha,
            reason: "negative",
        });
    }
    Ok(())
}

pub(crate) fn delta_for(alpha: f64, cert: &SlaterCertificate) -> f64 {
    alpha * (2.0 * cert.sigma - alpha * cert.subgrad_bound * cert.subgrad_bound)
}

/// A constant step is admissible iff `0 < alpha < 2 sigma / L^2`, which
/// makes `delta` a positive constant.
pub fn validate_constant(alpha: f64, cert: &SlaterCertificate) -> bool {
    alpha > 0.0 && alpha < 2.0 * cert.sigma / (cert.subgrad_bound * cert.subgrad_bound)
}

/// Partial-sum accumulation cap; past this many terms the bound is
/// reported as unknown rather than searched further.
pub const ITERATION_BOUND_CAP: u64 = 1_000_000_000;

/// Smallest `n` with `sum_{k=0}^{n-1} delta_k > ‖x0 - s‖^2`, if one can be
/// exhibited within the cap. The iteration must stop inside the feasible
/// set within `n` updates: were `x_0..x_{n-1}` all infeasible, the per-step
/// decrease would telescope `‖x_n - s‖^2` below zero.
///
/// `None` when the schedule's `delta_k` depends on runtime subgradient
/// norms (`Normalized`), when the partial sums do not exceed the target
/// within the cap, or when an explicit schedule ends first.
pub fn iteration_bound(
    x0: &Vector,
    cert: &SlaterCertificate,
    sched: &StepSchedule,
) -> Result<Option<u64>> {
    let dist_sq = x0.sub(&cert.s)?.norm_sq();
    if !sched.delta_is_a_priori() {
        return Ok(None);
    }
    match sched {
        StepSchedule::Constant(alpha) => {
            let delta = delta_for(*alpha, cert);
            if delta <= 0.0 {
                return Ok(None);
            }
            let n = (dist_sq / delta).floor() + 1.0;
            if n.is_finite() && n <= ITERATION_BOUND_CAP as f64 {
                Ok(Some(n as u64))
            } else {
                Ok(None)
            }
        }
        _ => {
            let mut sum = 0.0;
            for n in 1..=ITERATION_BOUND_CAP {
                match sched.delta(n - 1, cert, 0.0) {
                    Ok(d) => sum += d,
                    // An explicit schedule that errors out on exhaustion
                    // cannot certify anything past its end.
                    Err(Error::ScheduleExhausted { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
                if sum > dist_sq {
                    return Ok(Some(n));
                }
                // Once the tail is identically zero the sum is final.
                if let StepSchedule::Explicit { values, tail } = sched {
                    if *tail == TailRule::Zero && n as usize >= values.len() {
                        return Ok(None);
                    }
                }
            }
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Vector;

    fn cert(s: &[f64], sigma: f64, bound: f64) -> SlaterCertificate {
        SlaterCertificate::new(Vector::from_slice(s).unwrap(), sigma, bound).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let h = StepSchedule::harmonic(2.0).unwrap();
        assert_eq!(h.alpha(0, 0.0).unwrap(), 0.5);
        assert_eq!(h.alpha(1, 0.0).unwrap(), 1.0 / 3.0);

        let c = StepSchedule::constant(1.0).unwrap();
        for k in [0, 7, 123_456] {
            assert_eq!(c.alpha(k, 99.0).unwrap(), 1.0);
        }

        let n = StepSchedule::normalized(StepSchedule::constant(1.0).unwrap());
        assert_eq!(n.alpha(0, 4.0).unwrap(), 0.25);
        // Norms below one do not inflate the step.
        assert_eq!(n.alpha(0, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn delta_examples() {
        let c1 = cert(&[0.0], 1.0, 1.0);
        let s = StepSchedule::constant(1.0).unwrap();
        assert_eq!(s.delta(0, &c1, 0.0).unwrap(), 1.0);

        // alpha = 2 sigma / L^2 is the root of the quadratic.
        let s2 = StepSchedule::constant(2.0).unwrap();
        assert_eq!(s2.delta(5, &c1, 0.0).unwrap(), 0.0);

        // sigma = rho L^2 with rho = 1, L = 1.
        let scaled = cert(&[0.0], 1.0, 1.0);
        assert_eq!(StepSchedule::constant(1.0).unwrap().delta(0, &scaled, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn validate_constant_boundaries() {
        let c = cert(&[0.0], 1.0, 1.0);
        assert!(validate_constant(1.0, &c));
        assert!(!validate_constant(2.0, &c));
        assert!(!validate_constant(0.0, &c));
        assert!(!validate_constant(-0.5, &c));
        assert!(validate_constant(1.9999, &c));
    }

    #[test]
    fn iteration_bound_constant() {
        // delta = 1, distance^2 = 9: first n with n * 1 > 9 is 10.
        let c = cert(&[4.0], 1.0, 1.0);
        let x0 = Vector::from_slice(&[1.0]).unwrap();
        let s = StepSchedule::constant(1.0).unwrap();
        assert_eq!(iteration_bound(&x0, &c, &s).unwrap(), Some(10));

        // Boundary step: delta = 0, never exceeds.
        let s0 = StepSchedule::constant(2.0).unwrap();
        assert_eq!(iteration_bound(&x0, &c, &s0).unwrap(), None);

        // Tiny positive delta whose bound exceeds the cap.
        let near = cert(&[1.0], 1.0, 1.0);
        let s1 = StepSchedule::constant(1e-12).unwrap(); // delta ~ 2e-12
        assert_eq!(
            iteration_bound(&Vector::from_slice(&[0.0]).unwrap(), &near, &s1).unwrap(),
            None
        );
    }

    #[test]
    fn iteration_bound_harmonic() {
        // Accumulate delta_k = (2/(k+1)) - (1/(k+1))^2 until the sum
        // exceeds 1: delta_0 = 1, delta_1 = 0.75, so n = 2.
        let c = cert(&[1.0], 1.0, 1.0);
        let x0 = Vector::from_slice(&[0.0]).unwrap();
        let s = StepSchedule::harmonic(1.0).unwrap();

        // Independent accumulation.
        let mut sum = 0.0;
        let mut expected = None;
        for n in 1u64..1000 {
            let alpha = 1.0 / n as f64;
            sum += alpha * (2.0 - alpha);
            if sum > 1.0 {
                expected = Some(n);
                break;
            }
        }
        assert_eq!(expected, Some(2));
        assert_eq!(iteration_bound(&x0, &c, &s).unwrap(), expected);
    }

    #[test]
    fn iteration_bound_normalized_is_unknown() {
        let c = cert(&[1.0], 1.0, 1.0);
        let x0 = Vector::from_slice(&[0.0]).unwrap();
        let s = StepSchedule::normalized(StepSchedule::constant(1.0).unwrap());
        assert_eq!(iteration_bound(&x0, &c, &s).unwrap(), None);
    }

    #[test]
    fn constant_bound_matches_closed_form() {
        let c = cert(&[3.0, 0.0], 0.7, 1.3);
        let x0 = Vector::from_slice(&[-1.5, 2.0]).unwrap();
        for alpha in [0.1, 0.3, 0.87] {
            if !validate_constant(alpha, &c) {
                continue;
            }
            let delta = alpha * (2.0 * 0.7 - alpha * 1.3 * 1.3);
            let dist_sq = x0.sub(&c.s).unwrap().norm_sq();
            let expected = (dist_sq / delta).floor() as u64 + 1;
            let s = StepSchedule::constant(alpha).unwrap();
            assert_eq!(iteration_bound(&x0, &c, &s).unwrap(), Some(expected));
        }
    }

    #[test]
    fn explicit_schedules() {
        let e = StepSchedule::explicit(vec![0.5, 0.25], TailRule::Error).unwrap();
        assert_eq!(e.alpha(1, 0.0).unwrap(), 0.25);
        assert_eq!(e.alpha(2, 0.0), Err(Error::ScheduleExhausted { step: 2 }));

        let r = StepSchedule::explicit(vec![0.5, 0.25], TailRule::RepeatLast).unwrap();
        assert_eq!(r.alpha(100, 0.0).unwrap(), 0.25);

        let z = StepSchedule::explicit(vec![0.5, 0.25], TailRule::Zero).unwrap();
        assert_eq!(z.alpha(100, 0.0).unwrap(), 0.0);

        assert!(StepSchedule::explicit(vec![0.5, -0.1], TailRule::Error).is_err());

        // Bound through an explicit schedule: repeat-last can certify,
        // error/zero tails cannot certify past the end.
        let c = cert(&[2.0], 1.0, 1.0);
        let x0 = Vector::from_slice(&[0.0]).unwrap();
        // delta(1.0) = 1 per step under repeat; distance^2 = 4 -> n = 5.
        let rep = StepSchedule::explicit(vec![1.0], TailRule::RepeatLast).unwrap();
        assert_eq!(iteration_bound(&x0, &c, &rep).unwrap(), Some(5));
        let err_tail = StepSchedule::explicit(vec![1.0], TailRule::Error).unwrap();
        assert_eq!(iteration_bound(&x0, &c, &err_tail).unwrap(), None);
        let zero_tail = StepSchedule::explicit(vec![1.0], TailRule::Zero).unwrap();
        assert_eq!(iteration_bound(&x0, &c, &zero_tail).unwrap(), None);
    }

    #[test]
    fn harmonic_offset_must_be_positive() {
        assert!(StepSchedule::harmonic(0.0).is_err());
        assert!(StepSchedule::harmonic(-1.0).is_err());
        assert!(StepSchedule::constant(-1.0).is_err());
    }
}
