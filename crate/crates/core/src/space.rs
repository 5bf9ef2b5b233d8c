//! The ambient space: fixed-dimension real vectors with the standard dot
//! product. Everything else in the crate touches coordinates only through
//! the operations defined here.

use crate::error::{Error, Result};

/// A point of `R^n`. Coordinates are finite by construction and the
/// dimension is fixed; all vectors taking part in one solve share it.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    /// Builds a vector, rejecting empty or non-finite coordinate lists.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "vector coordinate",
            });
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    /// The origin of `R^dim`.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(Self {
            coords: vec![0.0; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Standard dot product `sum_j x_j y_j`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Squared norm `<x, x>`; zero iff `x = 0`.
    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// `self - t * g`, the subgradient step.
    pub fn sub_scaled(&self, t: f64, g: &Self) -> Result<Self> {
        self.check_dim(g)?;
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(&g.coords)
                .map(|(a, b)| a - t * b)
                .collect(),
        })
    }

    /// `self + t * g`.
    pub fn add_scaled(&self, t: f64, g: &Self) -> Result<Self> {
        self.check_dim(g)?;
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(&g.coords)
                .map(|(a, b)| a + t * b)
                .collect(),
        })
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|a| a * t).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    /// Exact bit-level equality, distinguishing `0.0` from `-0.0`.
    /// Cycle detection uses this rather than numeric equality.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// Comparison slack for invariant checks: `1e-9` scaled by the magnitude of
/// the quantities involved, never below `1e-9` itself.
pub fn float_slack(scale: f64) -> f64 {
    1e-9 * scale.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_matches_dot_product() {
        let x = Vector::from_slice(&[1.0, 2.0]).unwrap();
        let y = Vector::from_slice(&[3.0, 4.0]).unwrap();
        assert_eq!(x.inner(&y).unwrap(), 11.0);
        assert_eq!(y.inner(&x).unwrap(), 11.0);

        let z = Vector::zeros(2).unwrap();
        assert_eq!(z.inner(&y).unwrap(), 0.0);

        let a = Vector::from_slice(&[1.0]).unwrap();
        let b = Vector::from_slice(&[-1.0]).unwrap();
        assert_eq!(a.inner(&b).unwrap(), -1.0);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let x = Vector::from_slice(&[1.0, 2.0]).unwrap();
        let y = Vector::from_slice(&[1.0]).unwrap();
        assert_eq!(
            x.inner(&y),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn norm_sq_examples() {
        assert_eq!(
            Vector::from_slice(&[3.0, 4.0]).unwrap().norm_sq(),
            25.0
        );
        assert_eq!(Vector::from_slice(&[0.0]).unwrap().norm_sq(), 0.0);
        assert_eq!(
            Vector::from_slice(&[1.0, 1.0, 1.0, 1.0]).unwrap().norm_sq(),
            4.0
        );
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(Vector::new(vec![]), Err(Error::EmptyVector));
        assert!(Vector::new(vec![f64::NAN]).is_err());
        assert!(Vector::new(vec![1.0, f64::INFINITY]).is_err());
        assert_eq!(Vector::zeros(0), Err(Error::EmptyVector));
    }

    #[test]
    fn bits_eq_distinguishes_signed_zero() {
        let a = Vector::from_slice(&[0.0]).unwrap();
        let b = Vector::from_slice(&[-0.0]).unwrap();
        assert_eq!(a, b);
        assert!(!a.bits_eq(&b));
        assert!(a.bits_eq(&a));
    }

    #[test]
    fn step_arithmetic() {
        let x = Vector::from_slice(&[1.0, -2.0]).unwrap();
        let g = Vector::from_slice(&[0.5, 1.0]).unwrap();
        let y = x.sub_scaled(2.0, &g).unwrap();
        assert_eq!(y.as_slice(), &[0.0, -4.0]);
        let z = y.add_scaled(2.0, &g).unwrap();
        assert_eq!(z.as_slice(), &[1.0, -2.0]);
    }
}
