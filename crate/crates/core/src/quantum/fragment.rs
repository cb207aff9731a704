use indexmap::IndexMap;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::povm::Povm;
use super::vector::UnitVector;
use crate::error::{unknown, Error, Result};

/// Prepare-and-measure fragment: a dimension with named states and POVMs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PMFragment {
    pub dim: usize,
    pub states: IndexMap<String, ComplexMatrix>,
    pub measurements: IndexMap<String, Povm>,
}

impl PMFragment {
    pub fn new(dim: usize) -> Self {
        PMFragment { dim, states: IndexMap::new(), measurements: IndexMap::new() }
    }

    pub fn with_pure_state(mut self, name: impl Into<String>, psi: &UnitVector) -> Self {
        self.states.insert(name.into(), psi.projector());
        self
    }

    pub fn with_state(mut self, name: impl Into<String>, rho: ComplexMatrix) -> Self {
        self.states.insert(name.into(), rho);
        self
    }

    pub fn with_measurement(mut self, name: impl Into<String>, povm: Povm) -> Self {
        self.measurements.insert(name.into(), povm);
        self
    }

    pub fn state(&self, name: &str) -> Result<&ComplexMatrix> {
        self.states.get(name).ok_or_else(|| unknown("state", name))
    }

    pub fn measurement(&self, name: &str) -> Result<&Povm> {
        self.measurements.get(name).ok_or_else(|| unknown("measurement", name))
    }

    /// Shape, trace and positivity checks.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (name, rho) in &self.states {
            if !rho.is_square() || rho.rows() != self.dim {
                return Err(Error::Dimension(format!("state `{name}` is not {0}x{0}", self.dim)));
            }
            let tr = rho.trace();
            if (tr - Complex64::new(1.0, 0.0)).norm() > tol {
                return Err(Error::InvalidArgument(format!("state `{name}` has trace {tr}")));
            }
            if !rho.is_psd(tol) {
                return Err(Error::InvalidArgument(format!("state `{name}` is not positive semidefinite")));
            }
        }
        for (name, m) in &self.measurements {
            if m.dim() != self.dim {
                return Err(Error::Dimension(format!("measurement `{name}` acts on dimension {}", m.dim())));
            }
            let report = super::ops::validate_povm(m, tol);
            if !report.verified {
                return Err(Error::InvalidArgument(format!("measurement `{name}` is not a POVM")));
            }
        }
        Ok(())
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self, name: &str) -> Result<f64> {
        let rho = self.state(name)?;
        Ok(rho.try_mul(rho)?.trace().re)
    }

    pub fn is_pure(&self, name: &str, tol: f64) -> Result<bool> {
        Ok((self.purity(name)? - 1.0).abs() <= tol)
    }

    /// Names of pure states, in fragment order.
    pub fn pure_state_names(&self, tol: f64) -> Vec<String> {
        self.states.keys().filter(|n| self.is_pure(n, tol).unwrap_or(false)).cloned().collect()
    }

    /// Vector representative of a pure state (defined up to phase).
    pub fn pure_vector(&self, name: &str, tol: f64) -> Result<UnitVector> {
        if !self.is_pure(name, tol)? {
            return Err(Error::InvalidArgument(format!("state `{name}` is mixed")));
        }
        let (_, v) = self.state(name)?.hermitian_eigen().into_iter().next().expect("nonempty spectrum");
        UnitVector::normalized(v)
    }

    /// Measurements containing an effect equal to `effect` within `tol`,
    /// with the matching outcome index.
    pub fn contexts_of(&self, effect: &ComplexMatrix, tol: f64) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        for (name, m) in &self.measurements {
            for (k, o) in m.outcomes().iter().enumerate() {
                if o.effect.approx_eq(effect, tol) {
                    out.push((name.clone(), k));
                }
            }
        }
        out
    }
}
