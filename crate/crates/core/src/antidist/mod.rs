//! Antidistinguishing measurements: a POVM `{E_j}` with `Tr(E_j rho_j) = 0`
//! for every `j`, so that outcome `j` rules out preparation `j`.

mod hardy;
mod pbr;

use std::f64::consts::PI;

use serde::Serialize;

pub use hardy::{hardy_construction, hardy_phase_vector, hardy_phases, HardyConstruction};
pub use pbr::{
    pbr_kraus, pbr_overlap_witness, pbr_overlap_witness_for, pbr_povm, pbr_qubit_basis, tensor_power,
    tensor_power_for_overlap, tensor_power_reduction, PbrOverlapWitness, PBR_OUTCOMES,
};

use crate::error::{Error, Result};
use crate::models::BlochVector;
use crate::quantum::{validate_povm, ComplexMatrix, Povm};
use crate::report::Report;

/// States, the measurement that excludes them, and the evidence.
#[derive(Clone, Debug, Serialize)]
pub struct AntidistinguishingCertificate {
    pub states: Vec<ComplexMatrix>,
    pub povm: Povm,
    /// `|Tr(E_j rho_j)|` per index.
    pub residuals: Vec<f64>,
    pub valid_povm: Report,
    pub tolerance: f64,
    pub valid: bool,
}

impl AntidistinguishingCertificate {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }

    /// Completeness residual `max|sum E - I|`.
    pub fn completeness(&self) -> f64 {
        self.valid_povm.checks.iter().find(|c| c.id == "completeness").map_or(f64::NAN, |c| c.residual)
    }

    /// One check per excluded pair plus the POVM checks.
    pub fn to_report(&self) -> Report {
        let mut r = Report::new("antidistinguishes", self.tolerance);
        for (o, res) in self.povm.outcomes().iter().zip(&self.residuals) {
            r.check_residual(format!("exclude:{}", o.label), 0.0, *res, *res);
        }
        r.absorb("povm", self.valid_povm.clone());
        r
    }
}

/// Residuals `|Tr(E_j rho_j)|` and POVM validity. The certificate is valid
/// when both are within `tol`.
pub fn verify_antidistinguishes(povm: &Povm, states: &[ComplexMatrix], tol: f64) -> Result<AntidistinguishingCertificate> {
    if povm.len() != states.len() {
        return Err(Error::InvalidArgument(format!("{} outcomes for {} states", povm.len(), states.len())));
    }
    let mut residuals = Vec::with_capacity(states.len());
    for (o, rho) in povm.outcomes().iter().zip(states) {
        if rho.rows() != povm.dim() || !rho.is_square() {
            return Err(Error::Dimension(format!("state is {}x{}, POVM acts on {}", rho.rows(), rho.cols(), povm.dim())));
        }
        residuals.push(o.effect.try_mul(rho)?.trace().re.abs());
    }
    let valid_povm = validate_povm(povm, tol);
    let valid = valid_povm.verified && residuals.iter().all(|r| *r <= tol);
    Ok(AntidistinguishingCertificate { states: states.to_vec(), povm: povm.clone(), residuals, valid_povm, tolerance: tol, valid })
}

/// Three real qubit states with Bloch vectors `2 pi j / 3` apart in the x-z
/// plane, excluded by `(2/3)` times the projectors onto their antipodes.
pub fn trine_example(tol: f64) -> Result<AntidistinguishingCertificate> {
    let dirs: Vec<BlochVector> = (0..3).map(|j| BlochVector::from_angles(2.0 * PI * j as f64 / 3.0, 0.0)).collect();
    let states: Vec<ComplexMatrix> = dirs.iter().map(BlochVector::projector).collect();
    let povm = Povm::new(
        dirs.iter()
            .enumerate()
            .map(|(j, b)| (format!("not{j}"), b.antipode().projector().scale_real(2.0 / 3.0)))
            .collect(),
    )?;
    verify_antidistinguishes(&povm, &states, tol)
}

/// Overlap ceiling `L <= eta` for a measurement that reports no outcome with
/// probability at most `eta`.
pub fn inefficiency_overlap_bound(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::ProbabilityOutOfRange(eta));
    }
    Ok(eta)
}
