use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector {
    amps: Vec<Complex64>,
}

impl UnitVector {
    /// Accepts amplitudes whose squared norm is within 1e-12 of 1.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!("squared norm {n2} is not 1")));
        }
        Ok(UnitVector { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidArgument("zero vector cannot be normalized".into()));
        }
        Ok(UnitVector { amps: amps.into_iter().map(|a| a / n).collect() })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|j>`.
    pub fn basis(d: usize, j: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        amps[j] = Complex64::new(1.0, 0.0);
        UnitVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &UnitVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|self><self|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| self.amps[i] * self.amps[j].conj())
    }

    pub fn tensor(&self, other: &UnitVector) -> UnitVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        UnitVector { amps }
    }

    pub fn with_phase(&self, alpha: f64) -> UnitVector {
        let ph = Complex64::from_polar(1.0, alpha);
        UnitVector { amps: self.amps.iter().map(|a| a * ph).collect() }
    }

    /// Applies a unitary; the result is renormalized to absorb rounding.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<UnitVector> {
        UnitVector::normalized(u.apply(&self.amps)?)
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &UnitVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Column matrix `|self>`.
    pub fn to_column(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), 1, |i, _| self.amps[i])
    }
}

impl Serialize for UnitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.amps.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let amps = Vec::<Complex64>::deserialize(d)?;
        UnitVector::new(amps).map_err(serde::de::Error::custom)
    }
}

/// Common qubit states.
pub mod qubit {
    use super::UnitVector;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn zero() -> UnitVector {
        UnitVector::basis(2, 0)
    }
    pub fn one() -> UnitVector {
        UnitVector::basis(2, 1)
    }
    pub fn plus() -> UnitVector {
        UnitVector::new(vec![Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)]).unwrap()
    }
    pub fn minus() -> UnitVector {
        UnitVector::new(vec![Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)]).unwrap()
    }
    pub fn plus_i() -> UnitVector {
        UnitVector::new(vec![Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)]).unwrap()
    }
    pub fn minus_i() -> UnitVector {
        UnitVector::new(vec![Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, -FRAC_1_SQRT_2)]).unwrap()
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn from_bloch_angles(theta: f64, phi: f64) -> UnitVector {
        UnitVector::normalized(vec![
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ])
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        assert!(UnitVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
        assert!(UnitVector::normalized(vec![Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn tensor_of_basis_vectors() {
        let v = UnitVector::basis(2, 0).tensor(&UnitVector::basis(2, 1));
        assert_eq!(v, UnitVector::basis(4, 1));
    }
}
