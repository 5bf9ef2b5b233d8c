//! Problem assembly: a finite family of constraint oracles over one ambient
//! dimension, optionally carrying a strict-interior certificate.

use crate::error::{Error, Result};
use crate::functions::ConstraintOracle;
use crate::space::{float_slack, Vector};

/// Certificate of strict feasibility: a point `s` with `f_i(s) <= -sigma`
/// for every constraint, together with a global subgradient-norm bound.
///
/// `sigma` may be conservative (smaller than the true slack); the bound
/// must dominate every subgradient norm seen during a solve, which the
/// runtime monitors check.
#[derive(Debug, Clone, PartialEq)]
pub struct SlaterCertificate {
    pub s: Vector,
    pub sigma: f64,
    pub subgrad_bound: f64,
}

impl SlaterCertificate {
    pub fn new(s: Vector, sigma: f64, subgrad_bound: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::CertificateNotPositive {
                field: "sigma",
                value: sigma,
            });
        }
        if !subgrad_bound.is_finite() || subgrad_bound <= 0.0 {
            return Err(Error::CertificateNotPositive {
                field: "subgrad_bound",
                value: subgrad_bound,
            });
        }
        Ok(Self {
            s,
            sigma,
            subgrad_bound,
        })
    }
}

/// A reason a certificate fails validation against a problem.
#[derive(Debug, Clone, PartialEq)]
pub enum CertificateIssue {
    /// `f_i(s) >= 0`: the point is not strictly inside constraint `i`.
    NotStrictlyFeasible { index: usize, value: f64 },
    /// Claimed `sigma` exceeds the actual slack `min_i -f_i(s)`.
    SigmaExceedsSlack { sigma: f64, max_allowed: f64 },
    /// `sigma <= 0`.
    SigmaNotPositive { sigma: f64 },
}

/// Outcome of checking a certificate against a problem's oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    /// `f_i(s)` per constraint, in constraint order.
    pub values: Vec<f64>,
    /// The actual slack `min_i -f_i(s)`.
    pub slack: f64,
    pub issues: Vec<CertificateIssue>,
}

impl CertificateReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// The feasibility problem: find `x` with `f_i(x) <= tolerance` for all `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityProblem {
    dimension: usize,
    constraints: Vec<ConstraintOracle>,
    slater: Option<SlaterCertificate>,
}

impl FeasibilityProblem {
    pub fn new(
        dimension: usize,
        constraints: Vec<ConstraintOracle>,
        slater: Option<SlaterCertificate>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::EmptyVector);
        }
        if constraints.is_empty() {
            return Err(Error::NoConstraints);
        }
        for c in &constraints {
            c.check_dimension(dimension)?;
        }
        if let Some(cert) = &slater {
            if cert.s.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: cert.s.dim(),
                });
            }
        }
        Ok(Self {
            dimension,
            constraints,
            slater,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn constraints(&self) -> &[ConstraintOracle] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        false // m >= 1 by construction
    }

    pub fn slater(&self) -> Option<&SlaterCertificate> {
        self.slater.as_ref()
    }

    /// Replaces the attached certificate.
    pub fn with_slater(mut self, cert: SlaterCertificate) -> Result<Self> {
        if cert.s.dim() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: cert.s.dim(),
            });
        }
        self.slater = Some(cert);
        Ok(self)
    }

    /// All constraint values at `x`, in constraint order.
    /// `x` is feasible iff every entry is `<= tolerance`.
    pub fn residual(&self, x: &Vector) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.constraints.iter().map(|c| c.value(x)).collect()
    }

    pub fn is_feasible(&self, x: &Vector, tolerance: f64) -> Result<bool> {
        Ok(self.residual(x)?.iter().all(|&v| v <= tolerance))
    }

    fn check_point(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Checks a certificate against this problem's oracles.
    ///
    /// Valid iff every `f_i(s)` is strictly negative and the claimed
    /// `sigma` is positive and no larger than the actual slack
    /// `min_i -f_i(s)` (up to float slack, so that a certificate derived
    /// with exact equality is not rejected for a final rounding).
    pub fn validate_certificate(&self, cert: &SlaterCertificate) -> Result<CertificateReport> {
        let values = self.residual(&cert.s)?;
        let mut issues = Vec::new();
        for (index, &value) in values.iter().enumerate() {
            if value >= 0.0 {
                issues.push(CertificateIssue::NotStrictlyFeasible { index, value });
            }
        }
        let slack = values.iter().map(|v| -v).fold(f64::INFINITY, f64::min);
        if cert.sigma <= 0.0 {
            issues.push(CertificateIssue::SigmaNotPositive { sigma: cert.sigma });
        } else if cert.sigma > slack + float_slack(slack) {
            issues.push(CertificateIssue::SigmaExceedsSlack {
                sigma: cert.sigma,
                max_allowed: slack,
            });
        }
        Ok(CertificateReport {
            values,
            slack,
            issues,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> Vector {
        Vector::from_slice(coords).unwrap()
    }

    /// f_1 = truncated Huber, f_2(x) = x + 1.
    fn escape_problem() -> FeasibilityProblem {
        FeasibilityProblem::new(
            1,
            vec![
                ConstraintOracle::truncated_huber(0),
                ConstraintOracle::linear(v(&[1.0]), 1.0).unwrap(),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn residual_examples() {
        let p = escape_problem();
        assert_eq!(p.residual(&v(&[0.0])).unwrap(), vec![0.0, 1.0]);
        assert!(!p.is_feasible(&v(&[0.0]), 0.0).unwrap());
        assert_eq!(p.residual(&v(&[-1.0])).unwrap(), vec![0.0, 0.0]);
        assert!(p.is_feasible(&v(&[-1.0]), 0.0).unwrap());

        let huber_only =
            FeasibilityProblem::new(1, vec![ConstraintOracle::huber(0)], None).unwrap();
        assert_eq!(huber_only.residual(&v(&[0.0])).unwrap(), vec![0.0]);
        assert!(huber_only.is_feasible(&v(&[0.0]), 0.0).unwrap());
    }

    #[test]
    fn certificate_accepted_for_strict_interior() {
        // f_1(x) = -x; s = 1 gives slack 1.
        let p = FeasibilityProblem::new(
            1,
            vec![ConstraintOracle::linear(v(&[-1.0]), 0.0).unwrap()],
            None,
        )
        .unwrap();
        let cert = SlaterCertificate::new(v(&[1.0]), 1.0, 1.0).unwrap();
        let report = p.validate_certificate(&cert).unwrap();
        assert!(report.is_valid());
        assert_eq!(report.values, vec![-1.0]);
        assert_eq!(report.slack, 1.0);

        // A conservative sigma is fine; an inflated one is not.
        let conservative = SlaterCertificate::new(v(&[1.0]), 0.5, 1.0).unwrap();
        assert!(p.validate_certificate(&conservative).unwrap().is_valid());
        let inflated = SlaterCertificate::new(v(&[1.0]), 1.5, 1.0).unwrap();
        let report = p.validate_certificate(&inflated).unwrap();
        assert!(!report.is_valid());
        assert!(matches!(
            report.issues[0],
            CertificateIssue::SigmaExceedsSlack { .. }
        ));
    }

    #[test]
    fn certificate_rejected_without_strict_interior() {
        // The plain Huber constraint is nonnegative everywhere, so no point
        // is strictly inside.
        let p = FeasibilityProblem::new(1, vec![ConstraintOracle::huber(0)], None).unwrap();
        let cert = SlaterCertificate::new(v(&[0.0]), 0.5, 1.0).unwrap();
        let report = p.validate_certificate(&cert).unwrap();
        assert!(!report.is_valid());
        assert!(matches!(
            report.issues[0],
            CertificateIssue::NotStrictlyFeasible { index: 0, value } if value == 0.0
        ));
    }

    #[test]
    fn opposing_halfspaces_admit_no_certificate() {
        // f_1(x) = -x and f_2(x) = x: the feasible set is {0}, with empty
        // interior, so every candidate point fails on some constraint.
        let p = FeasibilityProblem::new(
            1,
            vec![
                ConstraintOracle::linear(v(&[-1.0]), 0.0).unwrap(),
                ConstraintOracle::linear(v(&[1.0]), 0.0).unwrap(),
            ],
            None,
        )
        .unwrap();
        for s in [-2.0, 0.0, 0.3] {
            let cert = SlaterCertificate::new(v(&[s]), 0.1, 1.0).unwrap();
            assert!(!p.validate_certificate(&cert).unwrap().is_valid());
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            FeasibilityProblem::new(1, vec![], None),
            Err(Error::NoConstraints)
        );
        let wrong_dim = ConstraintOracle::linear(v(&[1.0, 2.0]), 0.0).unwrap();
        assert!(FeasibilityProblem::new(1, vec![wrong_dim], None).is_err());
        assert!(SlaterCertificate::new(v(&[1.0]), 0.0, 1.0).is_err());
        assert!(SlaterCertificate::new(v(&[1.0]), 1.0, -1.0).is_err());
    }
}
