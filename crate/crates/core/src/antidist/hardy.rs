
use num_complex::Complex64;
use serde::Serialize;

use super::{verify_antidistinguishes, AntidistinguishingCertificate};
use crate::error::{Error, Result};
use crate::quantum::{phase_align, pure_overlap, ComplexMatrix, Povm, UnitVector};
use crate::ARITH_TOL;

/// Phases `phi_1 .. phi_{d-1}` (index `j - 1`) such that
/// `|phi> = (d-1)^{-1/2} sum_{j>=1} e^{i phi_j} |j>` has the real inner
/// product `target` with the uniform superposition of `d` basis vectors.
///
/// Odd `d`: `phi` on the first half, `-phi` on the second, inner product
/// `sqrt((d-1)/d) cos phi`. Even `d`: `phi_1 = 0`, then `phi` and `-phi`
/// halves, inner product `(1 + (d-2) cos phi) / sqrt(d (d-1))`. Both are
/// inverted in closed form.
pub fn hardy_phases(d: usize, target: f64) -> Result<Vec<f64>> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("needs d >= 3, got {d}")));
    }
    let df = d as f64;
    let top = ((df - 1.0) / df).sqrt();
    if !(0.0..=top + ARITH_TOL).contains(&target) {
        return Err(Error::InvalidArgument(format!("target {target} outside [0, {top}]")));
    }
    let target = target.min(top);
    let mut phases = vec![0.0; d - 1];
    if d % 2 == 1 {
        let phi = (target / top).clamp(-1.0, 1.0).acos();
        let half = (d - 1) / 2;
        for (i, p) in phases.iter_mut().enumerate() {
            *p = if i < half { phi } else { -phi };
        }
    } else {
        let cos = (target * (df * (df - 1.0)).sqrt() - 1.0) / (df - 2.0);
        let phi = cos.clamp(-1.0, 1.0).acos();
        for (i, p) in phases.iter_mut().enumerate() {
            let j = i + 1;
            *p = if j == 1 {
                0.0
            } else if j <= d / 2 {
                phi
            } else {
                -phi
            };
        }
    }
    Ok(phases)
}

/// `(d-1)^{-1/2} sum_{j>=1} e^{i phi_j} |j>` for phases from [`hardy_phases`].
pub fn hardy_phase_vector(d: usize, phases: &[f64]) -> Result<UnitVector> {
    if phases.len() + 1 != d {
        return Err(Error::Dimension(format!("{} phases for dimension {d}", phases.len())));
    }
    let a = 1.0 / ((d - 1) as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0)];
    amps.extend(phases.iter().map(|p| Complex64::from_polar(a, *p)));
    UnitVector::normalized(amps)
}

/// Unitary whose first columns are the given orthonormal vectors; the rest
/// come from Gram-Schmidt on computational basis vectors, greedily.
fn complete_basis(d: usize, first: &[Vec<Complex64>]) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = first.to_vec();
    let mut used = vec![false; d];
    while cols.len() < d {
        let mut best: Option<(usize, Vec<Complex64>, f64)> = None;
        for (k, taken) in used.iter().enumerate() {
            if *taken {
                continue;
            }
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[k] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for c in &cols {
                    let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= proj * ci;
                    }
                }
            }
            let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|b| n > b.2) {
                best = Some((k, v, n));
            }
        }
        let (k, v, n) = best.expect("basis incomplete");
        used[k] = true;
        cols.push(v.into_iter().map(|x| x / n).collect());
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

fn cyclic_shift(d: usize, power: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| if i == (j + power) % d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// Output of [`hardy_construction`].
#[derive(Clone, Debug, Serialize)]
pub struct HardyConstruction {
    /// `U_j`, each fixing `psi`.
    pub unitaries: Vec<ComplexMatrix>,
    /// `phi_j = U_j phi`.
    pub rotated: Vec<UnitVector>,
    /// Orthonormal basis in which `psi` is the uniform superposition; its
    /// `j`-th element is orthogonal to `phi_j`.
    pub basis: Vec<UnitVector>,
    pub phases: Vec<f64>,
    pub certificate: AntidistinguishingCertificate,
    /// `max_j ||U_j psi - psi||`.
    pub psi_residual: f64,
    /// `max_j |<phi_j|psi> - <phi|psi>|`, with `phi` phased so that
    /// `<psi|phi>` is real and nonnegative.
    pub inner_residual: f64,
}

/// Unitaries `U_j` fixing `psi` whose images `U_j phi` are antidistinguished
/// by a basis measurement. Needs `d >= 3` and `|<psi|phi>|^2 <= (d-1)/d`.
///
/// With `W` mapping the uniform superposition `u` to `psi`, `U` fixes `u`
/// and rotates the part of `W^dagger phi` orthogonal to `u` onto that of
/// [`hardy_phase_vector`], which has no `|0>` component. Then
/// `U_j = W V^j U W^dagger` with `V|j> = |j+1 mod d>`, and `W|j>` is
/// orthogonal to `U_j phi`.
pub fn hardy_construction(psi: &UnitVector, phi: &UnitVector, tol: f64) -> Result<HardyConstruction> {
    let d = psi.dim();
    if d < 3 {
        return Err(Error::InvalidArgument(format!("needs d >= 3, got {d}")));
    }
    if phi.dim() != d {
        return Err(Error::Dimension(format!("states of dimension {d} and {}", phi.dim())));
    }
    let df = d as f64;
    let x = pure_overlap(psi, phi)?;
    if x > (df - 1.0) / df + ARITH_TOL {
        return Err(Error::InvalidArgument(format!("overlap {x} exceeds (d-1)/d")));
    }
    let alpha = x.sqrt().min(((df - 1.0) / df).sqrt());
    let beta = (1.0 - alpha * alpha).sqrt();
    let aligned = phase_align(phi, psi)?;
    let phases = hardy_phases(d, alpha)?;
    let phi0 = hardy_phase_vector(d, &phases)?;

    let u: Vec<Complex64> = vec![Complex64::new(1.0 / df.sqrt(), 0.0); d];
    let w = complete_basis(d, &[psi.amps().to_vec()]).try_mul(&complete_basis(d, std::slice::from_ref(&u)).adjoint())?;
    let wd = w.adjoint();
    let phi_frame = wd.apply(aligned.amps())?;
    let perp = |v: &[Complex64]| -> Result<Vec<Complex64>> {
        let raw: Vec<Complex64> = v.iter().zip(&u).map(|(a, b)| (a - b * alpha) / beta).collect();
        Ok(UnitVector::normalized(raw)?.amps().to_vec())
    };
    let (p, q) = (perp(&phi_frame)?, perp(phi0.amps())?);
    let rot = complete_basis(d, &[u.clone(), q]).try_mul(&complete_basis(d, &[u, p]).adjoint())?;

    let mut unitaries = Vec::with_capacity(d);
    let mut rotated = Vec::with_capacity(d);
    let mut psi_residual = 0.0f64;
    let mut inner_residual = 0.0f64;
    let reference = psi.inner(&aligned)?;
    for j in 0..d {
        let uj = w.try_mul(&cyclic_shift(d, j))?.try_mul(&rot)?.try_mul(&wd)?;
        let moved = uj.apply(psi.amps())?;
        psi_residual = psi_residual.max(moved.iter().zip(psi.amps()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt());
        let phij = aligned.evolve(&uj)?;
        inner_residual = inner_residual.max((psi.inner(&phij)? - reference).norm());
        unitaries.push(uj);
        rotated.push(phij);
    }
    let basis: Vec<UnitVector> = (0..d).map(|j| UnitVector::basis(d, j).evolve(&w)).collect::<Result<_>>()?;
    let povm = Povm::projective(basis.iter().enumerate().map(|(j, b)| (j.to_string(), b.clone())))?;
    let states: Vec<ComplexMatrix> = rotated.iter().map(UnitVector::projector).collect();
    let certificate = verify_antidistinguishes(&povm, &states, tol)?;
    Ok(HardyConstruction { unitaries, rotated, basis, phases, certificate, psi_residual, inner_residual })
}

/// Phase at which the even-`d` inner product vanishes, `pi - arccos(1/(d-2))`.
#[cfg(test)]
fn even_zero_phase(d: usize) -> f64 {
    std::f64::consts::PI - (1.0 / (d as f64 - 2.0)).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use crate::quantum::random::random_state;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn inner_with_uniform(d: usize, phases: &[f64]) -> Complex64 {
        let phi = hardy_phase_vector(d, phases).unwrap();
        let u = UnitVector::normalized(vec![Complex64::new(1.0, 0.0); d]).unwrap();
        phi.inner(&u).unwrap()
    }

    #[test]
    fn phase_examples() {
        let z = inner_with_uniform(3, &[0.0, 0.0]);
        assert!((z.re - (2.0f64 / 3.0).sqrt()).abs() <= 1e-15 && z.im.abs() <= 1e-16);
        let p = hardy_phases(3, 0.0).unwrap();
        assert!((p[0] - PI / 2.0).abs() <= 1e-15);
        let z = inner_with_uniform(4, &[0.0, 0.0, 0.0]);
        assert!((z.re - 3.0f64.sqrt() / 2.0).abs() <= 1e-15);
        let p = hardy_phases(4, 0.0).unwrap();
        assert!((p[1] - even_zero_phase(4)).abs() <= 1e-15);
        assert!(hardy_phases(2, 0.1).is_err());
        assert!(hardy_phases(3, 0.9).is_err());
    }

    #[test]
    fn phases_hit_targets() {
        for d in 3..=8 {
            let top = ((d as f64 - 1.0) / d as f64).sqrt();
            for k in 0..=20 {
                let t = top * k as f64 / 20.0;
                let z = inner_with_uniform(d, &hardy_phases(d, t).unwrap());
                assert!((z.re - t).abs() <= 1e-12 && z.im.abs() <= 1e-12, "d={d} t={t} got {z}");
            }
        }
    }

    #[test]
    fn construction_fixes_psi_and_excludes() {
        let mut rng = StdRng::seed_from_u64(11);
        for d in 3..=6 {
            let psi = random_state(d, &mut rng);
            let phi = random_state(d, &mut rng);
            let h = hardy_construction(&psi, &phi, 1e-10).unwrap();
            assert!(h.certificate.valid, "{:?}", h.certificate.residuals);
            assert!(h.psi_residual <= 1e-10 && h.inner_residual <= 1e-10);
            for u in &h.unitaries {
                assert!(u.is_unitary(1e-10));
            }
        }
        let psi = UnitVector::basis(3, 0);
        assert!(hardy_construction(&psi, &psi, 1e-10).is_err());
    }
}
