use indexmap::IndexMap;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::onto::{EpistemicState, FiniteResponse, OnticSpace, OntologicalModel, ResponseFunction};
use crate::prob::FiniteDistribution;
use crate::quantum::{ComplexMatrix, PMFragment, Povm, UnitVector};

/// Name of the uniform superposition state.
pub const PPM_PSI: &str = "psi";

/// Name of `phi_j`, the uniform superposition of every basis vector but `j`.
pub fn ppm_phi(j: usize) -> String {
    format!("phi{j}")
}

/// `|psi> = sum_k |k> / sqrt(d)`.
pub fn ppm_psi_vector(d: usize) -> UnitVector {
    UnitVector::from_real(&vec![1.0; d]).expect("nonzero")
}

/// `|phi_j> = sum_{k != j} |k> / sqrt(d - 1)`.
pub fn ppm_phi_vector(d: usize, j: usize) -> UnitVector {
    let v: Vec<f64> = (0..d).map(|k| if k == j { 0.0 } else { 1.0 }).collect();
    UnitVector::from_real(&v).expect("nonzero")
}

/// Rank-one projector with all entries `1/n` on the index set `keep`,
/// written entrywise so that its diagonal is exactly `1/n`.
fn flat_projector(d: usize, keep: impl Fn(usize) -> bool) -> ComplexMatrix {
    let n = (0..d).filter(|&k| keep(k)).count() as f64;
    ComplexMatrix::from_fn(d, d, |i, j| if keep(i) && keep(j) { Complex64::new(1.0 / n, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// Fragment with `psi`, `phi_0..phi_{d-1}` and the computational basis `M`.
pub fn ppm_fragment(d: usize) -> Result<PMFragment> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("PPM fragment needs d >= 3, got {d}")));
    }
    let mut f = PMFragment::new(d).with_state(PPM_PSI, flat_projector(d, |_| true));
    for j in 0..d {
        f = f.with_state(ppm_phi(j), flat_projector(d, |k| k != j));
    }
    Ok(f.with_measurement("M", Povm::computational(d)))
}

/// Ball-and-boxes model: `Lambda = {0..d-1}`, `mu_psi` uniform, `mu_phi_j`
/// uniform off `j`, `Pr(k|M, j) = delta_jk`.
pub fn ppm_natural_model(d: usize) -> Result<OntologicalModel> {
    let fragment = ppm_fragment(d)?;
    let labels: Vec<String> = (0..d).map(|k| k.to_string()).collect();
    let mut delta = IndexMap::new();
    delta.insert(PPM_PSI.to_string(), vec![EpistemicState::from(FiniteDistribution::uniform(labels.clone())?)]);
    for j in 0..d {
        let w = 1.0 / (d - 1) as f64;
        let mu = FiniteDistribution::new(labels.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, l)| (l.clone(), w)))?;
        delta.insert(ppm_phi(j), vec![mu.into()]);
    }
    let r = FiniteResponse::deterministic(labels.clone(), labels.iter().enumerate().map(|(k, l)| (l.clone(), k)))?;
    let mut xi = IndexMap::new();
    xi.insert("M".to_string(), vec![ResponseFunction::from(r)]);
    OntologicalModel::new(OnticSpace::finite(labels)?, delta, xi, Some(fragment))
}
