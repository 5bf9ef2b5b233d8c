//! Built-in convex constraint functions.
//!
//! Every constraint is an oracle exposing an exact value and one
//! deterministic subgradient at any point, plus a bound on subgradient
//! norms. The one-dimensional kinds act on a designated coordinate and are
//! lifted to `R^n` with zero subgradient elsewhere; they accept an optional
//! affine reparametrization `t = x[coordinate] - shift` and an additive
//! `offset`, which leaves slopes (and therefore the bound) untouched.

use crate::error::{Error, Result};
use crate::space::Vector;

/// A convex constraint `f` with a value/subgradient oracle.
///
/// Subgradients are deterministic: ties at kinks are resolved by fixed
/// rules (`Max` picks the lowest-index maximizer; the piecewise kinds are
/// differentiable, so no tie arises).
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintOracle {
    /// `f(x) = <a, x> + b`. Subgradient is `a` everywhere; bound `‖a‖`.
    Linear { a: Vector, b: f64 },
    /// Quadratic near the kink parameter, linear beyond:
    /// `h(t) = t^2/2` for `|t| <= 1`, `|t| - 1/2` for `|t| >= 1`,
    /// applied to `t = x[coordinate] - shift`, plus `offset`.
    /// Slope `clamp(t, -1, 1)`; bound 1.
    Huber {
        coordinate: usize,
        shift: f64,
        offset: f64,
    },
    /// One-sided variant: `0` for `t <= 0`, `t^2/2` on `[0, 1]`,
    /// `t - 1/2` beyond. Slope `clamp(t, 0, 1)`; bound 1.
    TruncatedHuber {
        coordinate: usize,
        shift: f64,
        offset: f64,
    },
    /// Pointwise maximum of the children. The subgradient comes from the
    /// lowest-index child attaining the maximum; bound is the children's max.
    Max { children: Vec<ConstraintOracle> },
}

fn huber_value(t: f64) -> f64 {
    if t.abs() <= 1.0 {
        0.5 * t * t
    } else {
        t.abs() - 0.5
    }
}

fn huber_slope(t: f64) -> f64 {
    t.clamp(-1.0, 1.0)
}

fn truncated_huber_value(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t <= 1.0 {
        0.5 * t * t
    } else {
        t - 0.5
    }
}

fn truncated_huber_slope(t: f64) -> f64 {
    t.clamp(0.0, 1.0)
}

impl ConstraintOracle {
    pub fn linear(a: Vector, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::NonFinite {
                context: "linear offset",
            });
        }
        Ok(Self::Linear { a, b })
    }

    /// The plain kind acting on `x[coordinate]`.
    pub fn huber(coordinate: usize) -> Self {
        Self::Huber {
            coordinate,
            shift: 0.0,
            offset: 0.0,
        }
    }

    pub fn huber_shifted(coordinate: usize, shift: f64, offset: f64) -> Result<Self> {
        if !shift.is_finite() || !offset.is_finite() {
            return Err(Error::NonFinite {
                context: "huber parameters",
            });
        }
        Ok(Self::Huber {
            coordinate,
            shift,
            offset,
        })
    }

    pub fn truncated_huber(coordinate: usize) -> Self {
        Self::TruncatedHuber {
            coordinate,
            shift: 0.0,
            offset: 0.0,
        }
    }

    pub fn truncated_huber_shifted(coordinate: usize, shift: f64, offset: f64) -> Result<Self> {
        if !shift.is_finite() || !offset.is_finite() {
            return Err(Error::NonFinite {
                context: "truncated huber parameters",
            });
        }
        Ok(Self::TruncatedHuber {
            coordinate,
            shift,
            offset,
        })
    }

    pub fn max(children: Vec<ConstraintOracle>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::EmptyMax);
        }
        Ok(Self::Max { children })
    }

    /// Checks that the oracle fits an ambient dimension `n`.
    pub fn check_dimension(&self, n: usize) -> Result<()> {
        match self {
            Self::Linear { a, .. } => {
                if a.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: a.dim(),
                    });
                }
                Ok(())
            }
            Self::Huber { coordinate, .. } | Self::TruncatedHuber { coordinate, .. } => {
                if *coordinate >= n {
                    return Err(Error::CoordinateOutOfRange {
                        coordinate: *coordinate,
                        dimension: n,
                    });
                }
                Ok(())
            }
            Self::Max { children } => children.iter().try_for_each(|c| c.check_dimension(n)),
        }
    }

    /// Exact function value at `x`.
    pub fn value(&self, x: &Vector) -> Result<f64> {
        match self {
            Self::Linear { a, b } => Ok(a.inner(x)? + b),
            Self::Huber {
                coordinate,
                shift,
                offset,
            } => {
                self.check_dimension(x.dim())?;
                Ok(huber_value(x[*coordinate] - shift) + offset)
            }
            Self::TruncatedHuber {
                coordinate,
                shift,
                offset,
            } => {
                self.check_dimension(x.dim())?;
                Ok(truncated_huber_value(x[*coordinate] - shift) + offset)
            }
            Self::Max { children } => {
                let mut best = f64::NEG_INFINITY;
                for child in children {
                    best = best.max(child.value(x)?);
                }
                Ok(best)
            }
        }
    }

    /// One member of the subdifferential at `x`, per the deterministic rules.
    pub fn subgradient(&self, x: &Vector) -> Result<Vector> {
        match self {
            Self::Linear { a, .. } => {
                self.check_dimension(x.dim())?;
                Ok(a.clone())
            }
            Self::Huber {
                coordinate, shift, ..
            } => {
                self.check_dimension(x.dim())?;
                lift_slope(x.dim(), *coordinate, huber_slope(x[*coordinate] - shift))
            }
            Self::TruncatedHuber {
                coordinate, shift, ..
            } => {
                self.check_dimension(x.dim())?;
                lift_slope(
                    x.dim(),
                    *coordinate,
                    truncated_huber_slope(x[*coordinate] - shift),
                )
            }
            Self::Max { children } => {
                // Lowest index among maximizers.
                let mut best_index = 0;
                let mut best_value = children[0].value(x)?;
                for (i, child) in children.iter().enumerate().skip(1) {
                    let v = child.value(x)?;
                    if v > best_value {
                        best_value = v;
                        best_index = i;
                    }
                }
                children[best_index].subgradient(x)
            }
        }
    }

    /// Declared upper bound on `‖subgradient(x)‖` over all of `R^n`.
    pub fn subgrad_bound(&self) -> f64 {
        match self {
            Self::Linear { a, .. } => a.norm(),
            Self::Huber { .. } | Self::TruncatedHuber { .. } => 1.0,
            Self::Max { children } => children
                .iter()
                .map(|c| c.subgrad_bound())
                .fold(0.0, f64::max),
        }
    }
}

fn lift_slope(dim: usize, coordinate: usize, slope: f64) -> Result<Vector> {
    let mut coords = vec![0.0; dim];
    coords[coordinate] = slope;
    Vector::new(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v1(x: f64) -> Vector {
        Vector::from_slice(&[x]).unwrap()
    }

    #[test]
    fn huber_values() {
        let h = ConstraintOracle::huber(0);
        assert_eq!(h.value(&v1(1.0)).unwrap(), 0.5);
        assert_eq!(h.value(&v1(0.0)).unwrap(), 0.0);
        assert_eq!(h.value(&v1(-4.0)).unwrap(), 3.5);
        assert_eq!(h.value(&v1(2.0)).unwrap(), 1.5);
    }

    #[test]
    fn truncated_huber_values() {
        let t = ConstraintOracle::truncated_huber(0);
        assert_eq!(t.value(&v1(-3.0)).unwrap(), 0.0);
        assert_eq!(t.value(&v1(0.5)).unwrap(), 0.125);
        assert_eq!(t.value(&v1(2.0)).unwrap(), 1.5);
        assert_eq!(t.value(&v1(1.0)).unwrap(), 0.5);
    }

    #[test]
    fn subgradients_are_the_clamped_slopes() {
        let t = ConstraintOracle::truncated_huber(0);
        assert_eq!(t.subgradient(&v1(0.5)).unwrap().as_slice(), &[0.5]);
        assert_eq!(t.subgradient(&v1(-7.0)).unwrap().as_slice(), &[0.0]);
        assert_eq!(t.subgradient(&v1(9.0)).unwrap().as_slice(), &[1.0]);

        let h = ConstraintOracle::huber(0);
        assert_eq!(h.subgradient(&v1(-4.0)).unwrap().as_slice(), &[-1.0]);
        assert_eq!(h.subgradient(&v1(0.25)).unwrap().as_slice(), &[0.25]);

        let a = Vector::from_slice(&[-1.0]).unwrap();
        let lin = ConstraintOracle::linear(a, 0.0).unwrap();
        for x in [-3.0, 0.0, 11.5] {
            assert_eq!(lin.subgradient(&v1(x)).unwrap().as_slice(), &[-1.0]);
        }
    }

    #[test]
    fn subgrad_bounds() {
        assert_eq!(ConstraintOracle::huber(0).subgrad_bound(), 1.0);
        assert_eq!(ConstraintOracle::truncated_huber(0).subgrad_bound(), 1.0);
        let lin =
            ConstraintOracle::linear(Vector::from_slice(&[3.0, 4.0]).unwrap(), 0.0).unwrap();
        assert_eq!(lin.subgrad_bound(), 5.0);
        let m = ConstraintOracle::max(vec![lin, {
            ConstraintOracle::linear(Vector::from_slice(&[6.0, 0.0]).unwrap(), 1.0).unwrap()
        }])
        .unwrap();
        assert_eq!(m.subgrad_bound(), 6.0);
    }

    #[test]
    fn max_picks_lowest_index_on_ties() {
        let up = ConstraintOracle::linear(v1(1.0), 0.0).unwrap();
        let down = ConstraintOracle::linear(v1(-1.0), 0.0).unwrap();
        let m = ConstraintOracle::max(vec![up.clone(), down.clone()]).unwrap();
        // At 0 both children are 0; the first child's gradient wins.
        assert_eq!(m.subgradient(&v1(0.0)).unwrap().as_slice(), &[1.0]);
        assert_eq!(m.subgradient(&v1(2.0)).unwrap().as_slice(), &[1.0]);
        assert_eq!(m.subgradient(&v1(-2.0)).unwrap().as_slice(), &[-1.0]);
        assert_eq!(m.value(&v1(-2.0)).unwrap(), 2.0);
    }

    #[test]
    fn lift_acts_on_the_designated_coordinate() {
        let h = ConstraintOracle::huber(1);
        let x = Vector::from_slice(&[9.0, 0.5, -3.0]).unwrap();
        assert_eq!(h.value(&x).unwrap(), 0.125);
        assert_eq!(h.subgradient(&x).unwrap().as_slice(), &[0.0, 0.5, 0.0]);
    }

    #[test]
    fn shifted_lift_moves_the_kink_and_level() {
        let h = ConstraintOracle::huber_shifted(0, 2.0, -0.5).unwrap();
        assert_eq!(h.value(&v1(2.0)).unwrap(), -0.5);
        assert_eq!(h.value(&v1(3.0)).unwrap(), 0.0);
        assert_eq!(h.subgradient(&v1(5.0)).unwrap().as_slice(), &[1.0]);
        assert_eq!(h.subgrad_bound(), 1.0);
    }

    #[test]
    fn dimension_checks() {
        let h = ConstraintOracle::huber(3);
        assert!(h.check_dimension(3).is_err());
        assert!(h.check_dimension(4).is_ok());
        let lin = ConstraintOracle::linear(v1(1.0), 0.0).unwrap();
        assert!(lin
            .value(&Vector::from_slice(&[1.0, 2.0]).unwrap())
            .is_err());
    }
}
