use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::povm::Povm;
use super::vector::UnitVector;
use crate::error::{Error, Result};
use crate::report::Report;

/// Slack around [0, 1] that Born probabilities are clamped from.
pub const BORN_CLAMP: f64 = 1e-10;

/// `Tr(E rho)`, real part, clamped to [0, 1] when within 1e-10 of it.
pub fn born_rule(rho: &ComplexMatrix, effect: &ComplexMatrix) -> Result<f64> {
    let d = rho.rows();
    if !rho.is_square() || !effect.is_square() || effect.rows() != d {
        return Err(Error::Dimension(format!(
            "state {}x{} with effect {}x{}",
            rho.rows(),
            rho.cols(),
            effect.rows(),
            effect.cols()
        )));
    }
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            tr += effect.get(i, j) * rho.get(j, i);
        }
    }
    clamp_probability(tr.re)
}

pub(crate) fn clamp_probability(p: f64) -> Result<f64> {
    if !(-BORN_CLAMP..=1.0 + BORN_CLAMP).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `|<phi|psi>|^2`.
pub fn pure_overlap(psi: &UnitVector, phi: &UnitVector) -> Result<f64> {
    Ok(phi.inner(psi)?.norm_sqr())
}

/// Kronecker composition, `|j> (x) |k> -> j * d_b + k`.
pub trait Tensor: Sized {
    fn tensor_with(&self, other: &Self) -> Self;
}

impl Tensor for ComplexMatrix {
    fn tensor_with(&self, other: &Self) -> Self {
        self.kron(other)
    }
}

impl Tensor for UnitVector {
    fn tensor_with(&self, other: &Self) -> Self {
        self.tensor(other)
    }
}

pub fn tensor_product<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor_with(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced operator on the kept subsystem.
pub fn partial_trace(rho_ab: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if !rho_ab.is_square() || rho_ab.rows() != n {
        return Err(Error::Dimension(format!(
            "{}x{} operator does not factor as {da}x{db}",
            rho_ab.rows(),
            rho_ab.cols()
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| rho_ab.get(i * db + k, j * db + k)).sum()),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|k| rho_ab.get(k * db + i, k * db + j)).sum()),
    })
}

/// Steering: `rho_{B|E} = Tr_A((E (x) I) rho_AB) / Tr((E (x) I) rho_AB)`.
pub fn conditional_state(
    rho_ab: &ComplexMatrix,
    effect_on_a: &ComplexMatrix,
    dims: (usize, usize),
) -> Result<(ComplexMatrix, f64)> {
    let (da, db) = dims;
    if !effect_on_a.is_square() || effect_on_a.rows() != da {
        return Err(Error::Dimension(format!("effect is {}x{}, subsystem A has dimension {da}", effect_on_a.rows(), effect_on_a.cols())));
    }
    let lifted = effect_on_a.kron(&ComplexMatrix::identity(db));
    let prob = born_rule(rho_ab, &lifted)?;
    if prob <= 1e-12 {
        return Err(Error::ZeroProbability(prob));
    }
    let unnorm = partial_trace(&lifted.try_mul(rho_ab)?, dims, Subsystem::B)?;
    Ok((unnorm.scale_real(1.0 / prob).hermitian_part(), prob))
}

/// PSD eigen-floor per effect plus the completeness residual `max|sum E - I|`.
pub fn validate_povm(povm: &Povm, tol: f64) -> Report {
    let mut report = Report::new("validate_povm", tol);
    for o in povm.outcomes() {
        let herm = o.effect.max_abs_diff(&o.effect.adjoint());
        report.check_residual(format!("hermitian:{}", o.label), 0.0, herm, herm);
        let floor = o.effect.min_eigenvalue().min(0.0);
        report.check(format!("psd:{}", o.label), 0.0, floor);
    }
    let completeness = povm.total().max_abs_diff(&ComplexMatrix::identity(povm.dim()));
    report.check_residual("completeness", 0.0, completeness, completeness);
    report
}

/// Returns `e^{i a} psi` with `<phi| e^{i a} psi>` real and nonnegative.
pub fn phase_align(psi: &UnitVector, phi: &UnitVector) -> Result<UnitVector> {
    let z = phi.inner(psi)?;
    let r = z.norm();
    if r <= crate::ZERO_WEIGHT {
        return Ok(psi.clone());
    }
    let ph = z.conj() / r;
    UnitVector::normalized(psi.amps().iter().map(|a| a * ph).collect())
}

/// `(1/sqrt d) sum_j |j>|j>`.
pub fn maximally_entangled(d: usize) -> Result<UnitVector> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("maximally entangled state needs d >= 2, got {d}")));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    let a = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        amps[j * d + j] = Complex64::new(a, 0.0);
    }
    UnitVector::normalized(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::qubit;

    #[test]
    fn born_examples() {
        assert!((born_rule(&qubit::zero().projector(), &qubit::plus().projector()).unwrap() - 0.5).abs() < 1e-15);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        let p = qubit::from_bloch_angles(1.1, 0.3).projector();
        assert!((born_rule(&mixed, &p).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn born_rejects_invalid_pairs() {
        let rho = ComplexMatrix::identity(2).scale_real(2.0);
        assert!(matches!(born_rule(&rho, &ComplexMatrix::identity(2)), Err(Error::ProbabilityOutOfRange(_))));
        assert!(matches!(born_rule(&rho, &ComplexMatrix::identity(3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn born_clamps_tiny_excursions() {
        let rho = ComplexMatrix::identity(1).scale_real(1.0 + 1e-12);
        assert_eq!(born_rule(&rho, &ComplexMatrix::identity(1)).unwrap(), 1.0);
    }

    #[test]
    fn overlap_examples() {
        assert!((pure_overlap(&qubit::zero(), &qubit::plus()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(pure_overlap(&qubit::zero(), &qubit::one()).unwrap(), 0.0);
        assert!((pure_overlap(&qubit::plus_i(), &qubit::plus_i()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_and_bell_state() {
        let ra = qubit::from_bloch_angles(0.4, 1.0).projector();
        let rb = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        let kept = partial_trace(&ra.kron(&rb), (2, 3), Subsystem::A).unwrap();
        assert!(kept.approx_eq(&ra, 1e-15));
        let phi = maximally_entangled(2).unwrap().projector();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(partial_trace(&phi, (2, 2), Subsystem::A).unwrap().approx_eq(&half, 1e-15));
    }

    #[test]
    fn partial_trace_rejects_bad_factorisation() {
        assert!(partial_trace(&ComplexMatrix::identity(6), (2, 2), Subsystem::A).is_err());
    }

    #[test]
    fn conditional_state_on_product() {
        let ra = qubit::plus().projector();
        let rb = qubit::from_bloch_angles(2.0, -0.7).projector();
        let e = qubit::zero().projector();
        let (cond, p) = conditional_state(&ra.kron(&rb), &e, (2, 2)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(cond.approx_eq(&rb, 1e-15));
        let orth = qubit::one().projector();
        let zero_state = qubit::zero().projector().kron(&rb);
        assert!(matches!(conditional_state(&zero_state, &orth, (2, 2)), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn phase_align_examples() {
        let i0 = UnitVector::new(vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert_eq!(phase_align(&i0, &qubit::zero()).unwrap(), qubit::zero());
        assert_eq!(phase_align(&qubit::plus(), &qubit::zero()).unwrap(), qubit::plus());
        assert_eq!(phase_align(&qubit::one(), &qubit::zero()).unwrap(), qubit::one());
    }

    #[test]
    fn povm_validation() {
        let good = Povm::computational(2);
        let r = validate_povm(&good, 1e-10);
        assert!(r.verified);
        assert_eq!(r.max_residual, 0.0);
        let p0 = qubit::zero().projector();
        let bad = Povm::new(vec![("a".into(), p0.clone()), ("b".into(), p0)]).unwrap();
        let r = validate_povm(&bad, 1e-10);
        assert!(!r.verified);
        assert!(r.checks.iter().any(|c| c.id == "completeness" && !c.passed));
    }

    #[test]
    fn maximally_entangled_rejects_trivial_dimension() {
        assert!(maximally_entangled(1).is_err());
        let v = maximally_entangled(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v.amps()[0].re - h).abs() < 1e-16 && (v.amps()[3].re - h).abs() < 1e-16);
    }
}
