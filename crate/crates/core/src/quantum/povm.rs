use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::vector::UnitVector;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub label: String,
    pub effect: ComplexMatrix,
}

/// Ordered list of labelled effects on a common space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Povm {
    outcomes: Vec<Outcome>,
}

impl Povm {
    /// Checks shapes only; positivity and completeness are reported by
    /// [`crate::quantum::validate_povm`].
    pub fn new(outcomes: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        let Some((_, first)) = outcomes.first() else {
            return Err(Error::InvalidArgument("POVM needs at least one outcome".into()));
        };
        let d = first.rows();
        for (label, e) in &outcomes {
            if !e.is_square() || e.rows() != d {
                return Err(Error::Dimension(format!("effect `{label}` is {}x{}, expected {d}x{d}", e.rows(), e.cols())));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (label, _) in &outcomes {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate outcome label `{label}`")));
            }
        }
        Ok(Povm { outcomes: outcomes.into_iter().map(|(label, effect)| Outcome { label, effect }).collect() })
    }

    /// Projective measurement onto the given vectors.
    pub fn projective<S: Into<String>>(labelled: impl IntoIterator<Item = (S, UnitVector)>) -> Result<Self> {
        Self::new(labelled.into_iter().map(|(l, v)| (l.into(), v.projector())).collect())
    }

    /// Computational-basis measurement with outcomes `"0"`, `"1"`, ...
    pub fn computational(d: usize) -> Self {
        Self::projective((0..d).map(|j| (j.to_string(), UnitVector::basis(d, j)))).expect("basis measurement")
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].effect.rows()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|o| o.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o.label == label)
    }

    pub fn effect(&self, label: &str) -> Option<&ComplexMatrix> {
        self.outcomes.iter().find(|o| o.label == label).map(|o| &o.effect)
    }

    /// Conjugates every effect: `E -> U E U^dagger`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Povm> {
        let ud = u.adjoint();
        let outcomes = self
            .outcomes
            .iter()
            .map(|o| Ok(Outcome { label: o.label.clone(), effect: u.try_mul(&o.effect)?.try_mul(&ud)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Povm { outcomes })
    }

    /// Sum of all effects.
    pub fn total(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for o in &self.outcomes {
            acc = &acc + &o.effect;
        }
        acc
    }
}
