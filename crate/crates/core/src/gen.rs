//! Seeded generators for test workloads: random feasibility problems with a
//! planted strict-interior point, and separable linear datasets with a
//! planted margin. Identical seeds produce identical instances on every
//! platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::functions::ConstraintOracle;
use crate::perceptron::LinearDataset;
use crate::problem::{FeasibilityProblem, SlaterCertificate};
use crate::space::Vector;

/// A generated problem together with its exact certificate and a start.
///
/// `sigma` is the exact slack `min_i -f_i(s)` evaluated through the
/// oracles, and the bound is the exact `max_i` of per-constraint bounds,
/// so the certificate always validates.
#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub problem: FeasibilityProblem,
    pub certificate: SlaterCertificate,
    pub x0: Vector,
}

/// Mixed linear / kinked-piecewise problem with a planted interior point.
/// Dimension up to 10, up to 20 constraints.
pub fn random_problem(seed: u64) -> GeneratedProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(1..=10usize);
    let m = rng.gen_range(1..=20usize);
    build_random_problem(&mut rng, dim, m).expect("generated problems are well formed")
}

fn build_random_problem(
    rng: &mut ChaCha8Rng,
    dim: usize,
    m: usize,
) -> Result<GeneratedProblem> {
    // Planted interior point.
    let s = Vector::new((0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())?;

    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let margin = rng.gen_range(0.2..1.0);
        let kind = rng.gen_range(0..10u32);
        let oracle = match kind {
            // Unit-norm affine half-space with slack `margin` at s.
            0..=4 => affine_with_slack(rng, &s, margin)?,
            // Kinked one-dimensional pieces, shifted so f(s) = -margin.
            5 | 6 => {
                let coordinate = rng.gen_range(0..dim);
                let shift = s[coordinate] + rng.gen_range(-1.0..1.0);
                let base = ConstraintOracle::huber_shifted(coordinate, shift, 0.0)?;
                let at_s = base.value(&s)?;
                ConstraintOracle::huber_shifted(coordinate, shift, -(at_s + margin))?
            }
            7 | 8 => {
                let coordinate = rng.gen_range(0..dim);
                let shift = s[coordinate] + rng.gen_range(-1.0..1.0);
                let base = ConstraintOracle::truncated_huber_shifted(coordinate, shift, 0.0)?;
                let at_s = base.value(&s)?;
                ConstraintOracle::truncated_huber_shifted(coordinate, shift, -(at_s + margin))?
            }
            // Max of two affine pieces, both strictly negative at s.
            _ => {
                let second_margin = rng.gen_range(0.2..1.0);
                let a = affine_with_slack(rng, &s, margin)?;
                let b = affine_with_slack(rng, &s, second_margin)?;
                ConstraintOracle::max(vec![a, b])?
            }
        };
        constraints.push(oracle);
    }

    let problem = FeasibilityProblem::new(dim, constraints, None)?;

    // Exact slack and exact bound, read back from the oracles.
    let values = problem.residual(&s)?;
    let sigma = values.iter().map(|v| -v).fold(f64::INFINITY, f64::min);
    debug_assert!(sigma > 0.0);
    let bound = problem
        .constraints()
        .iter()
        .map(ConstraintOracle::subgrad_bound)
        .fold(0.0, f64::max);
    let certificate = SlaterCertificate::new(s.clone(), sigma, bound)?;
    let problem = problem.with_slater(certificate.clone())?;

    // Start within moderate distance of the planted point.
    let x0 = Vector::new(
        (0..dim)
            .map(|j| s[j] + rng.gen_range(-2.0..2.0))
            .collect(),
    )?;

    Ok(GeneratedProblem {
        problem,
        certificate,
        x0,
    })
}

fn affine_with_slack(
    rng: &mut ChaCha8Rng,
    s: &Vector,
    margin: f64,
) -> Result<ConstraintOracle> {
    let dim = s.dim();
    let a = loop {
        let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = Vector::new(raw)?;
        let norm = v.norm();
        if norm > 1e-3 {
            break v.scale(1.0 / norm);
        }
    };
    let b = -(a.inner(s)? + margin);
    ConstraintOracle::linear(a, b)
}

/// A generated separable dataset with the separator it was planted around.
#[derive(Debug, Clone)]
pub struct GeneratedDataset {
    pub dataset: LinearDataset,
    /// Unit separator; every row satisfies `<z, a_i> >= margin`.
    pub separator: Vector,
    /// The planted lower bound on margins (the exact minimum may be larger).
    pub margin: f64,
}

/// Separable rows around a random unit separator. Dimension up to 20, up
/// to 200 rows, planted margin in `[0.05, 0.5]`.
pub fn separable_dataset(seed: u64) -> GeneratedDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(2..=20usize);
    let m = rng.gen_range(2..=200usize);
    let margin = rng.gen_range(0.05..0.5);
    build_separable(&mut rng, dim, m, margin).expect("generated datasets are well formed")
}

/// Same construction with explicit shape parameters (the CLI generator).
pub fn separable_dataset_with(
    seed: u64,
    dim: usize,
    rows: usize,
    margin: f64,
) -> Result<GeneratedDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build_separable(&mut rng, dim, rows, margin)
}

fn build_separable(
    rng: &mut ChaCha8Rng,
    dim: usize,
    rows: usize,
    margin: f64,
) -> Result<GeneratedDataset> {
    use crate::error::Error;
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::Precondition(format!(
            "planted margin must be positive, got {margin}"
        )));
    }
    let z = loop {
        let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = Vector::new(raw)?;
        let norm = v.norm();
        if norm > 1e-3 {
            break v.scale(1.0 / norm);
        }
    };
    let mut rows_out = Vec::with_capacity(rows);
    for _ in 0..rows {
        let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut row = Vector::new(raw)?;
        let along = row.inner(&z)?;
        if along < margin {
            // Push the row up along the separator until the margin holds.
            row = row.add_scaled(margin - along, &z)?;
        }
        rows_out.push(row);
    }
    let dataset = LinearDataset::from_rows(rows_out)?;
    Ok(GeneratedDataset {
        dataset,
        separator: z,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problems_have_valid_exact_certificates() {
        for seed in 0..25 {
            let g = random_problem(seed);
            let report = g
                .problem
                .validate_certificate(&g.certificate)
                .unwrap();
            assert!(report.is_valid(), "seed {seed}: {:?}", report.issues);
            // Sigma is the exact minimum slack.
            assert_eq!(report.slack, g.certificate.sigma);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_problem(42);
        let b = random_problem(42);
        assert_eq!(a.problem, b.problem);
        assert!(a.x0.bits_eq(&b.x0));
        let d1 = separable_dataset(42);
        let d2 = separable_dataset(42);
        assert_eq!(d1.dataset, d2.dataset);
    }

    #[test]
    fn datasets_respect_the_planted_margin() {
        for seed in 0..25 {
            let g = separable_dataset(seed);
            for (i, row) in g.dataset.rows().iter().enumerate() {
                let m = g.separator.inner(row).unwrap();
                assert!(
                    m >= g.margin - 1e-12,
                    "seed {seed}, row {i}: margin {m} below planted {}",
                    g.margin
                );
            }
        }
    }
}
