//! The JSON problem-file schema and its conversion into core types.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "constraints": [
//!     {"kind": "linear", "a": [0.6, 0.8], "b": -1.0},
//!     {"kind": "huber", "coordinate": 0, "shift": 0.5, "offset": -0.8},
//!     {"kind": "truncated_huber", "coordinate": 1},
//!     {"kind": "max", "children": [ ... ]}
//!   ],
//!   "slater": {"s": [0.0, 0.0], "sigma": 0.5, "L": 1.0},
//!   "defaults": {"tolerance": 0.0, "budget": 1000}
//! }
//! ```
//!
//! A `slater` block, when present, must validate against the constraints at
//! load time; an inflated or non-interior certificate is an input error.

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use feas_core::{ConstraintOracle, FeasibilityProblem, SlaterCertificate, Vector};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default)]
    pub slater: Option<SlaterSpec>,
    #[serde(default)]
    pub defaults: Option<DefaultsSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintSpec {
    Linear {
        a: Vec<f64>,
        #[serde(default)]
        b: f64,
    },
    Huber {
        #[serde(default)]
        coordinate: usize,
        #[serde(default)]
        shift: f64,
        #[serde(default)]
        offset: f64,
    },
    TruncatedHuber {
        #[serde(default)]
        coordinate: usize,
        #[serde(default)]
        shift: f64,
        #[serde(default)]
        offset: f64,
    },
    Max {
        children: Vec<ConstraintSpec>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlaterSpec {
    pub s: Vec<f64>,
    pub sigma: f64,
    #[serde(rename = "L")]
    pub subgrad_bound: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefaultsSpec {
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub budget: Option<u64>,
}

fn build_constraint(spec: &ConstraintSpec) -> Result<ConstraintOracle> {
    Ok(match spec {
        ConstraintSpec::Linear { a, b } => {
            ConstraintOracle::linear(Vector::from_slice(a)?, *b)?
        }
        ConstraintSpec::Huber {
            coordinate,
            shift,
            offset,
        } => ConstraintOracle::huber_shifted(*coordinate, *shift, *offset)?,
        ConstraintSpec::TruncatedHuber {
            coordinate,
            shift,
            offset,
        } => ConstraintOracle::truncated_huber_shifted(*coordinate, *shift, *offset)?,
        ConstraintSpec::Max { children } => {
            let children = children
                .iter()
                .map(build_constraint)
                .collect::<Result<Vec<_>>>()?;
            ConstraintOracle::max(children)?
        }
    })
}

/// Parses a problem file and assembles the problem, validating any
/// certificate against the oracles.
pub fn load_problem(text: &str) -> Result<(FeasibilityProblem, DefaultsSpec)> {
    let file: ProblemFile =
        serde_json::from_str(text).context("cannot parse the problem file")?;
    let constraints = file
        .constraints
        .iter()
        .enumerate()
        .map(|(i, spec)| build_constraint(spec).with_context(|| format!("constraint {i}")))
        .collect::<Result<Vec<_>>>()?;
    let mut problem = FeasibilityProblem::new(file.dimension, constraints, None)?;
    if let Some(spec) = &file.slater {
        let cert = SlaterCertificate::new(
            Vector::from_slice(&spec.s)?,
            spec.sigma,
            spec.subgrad_bound,
        )?;
        let report = problem.validate_certificate(&cert)?;
        if !report.is_valid() {
            bail!(
                "the slater block does not validate: {:?} (constraint values at s: {:?})",
                report.issues,
                report.values
            );
        }
        problem = problem.with_slater(cert)?;
    }
    Ok((problem, file.defaults.unwrap_or_default()))
}
