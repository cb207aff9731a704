use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use indexmap::IndexMap;
use num_complex::Complex64;
use serde::Serialize;

use super::{verify_antidistinguishes, AntidistinguishingCertificate};
use crate::error::{unknown, Error, Result};
use crate::models::AbclModel;
use crate::onto::{
    direct_product_model, discretize, measure_overlap, split_tuple_label, verify_preclusions, FiniteResponse,
    OntologicalModel, ResponseFunction,
};
use crate::prob::tuple_label;
use crate::quantum::{born_rule, phase_align, pure_overlap, qubit, ComplexMatrix, Povm, UnitVector};
use crate::report::Report;
use crate::{ARITH_TOL, POVM_TOL, ZERO_WEIGHT};

/// Outcome labels of the four-outcome measurements, `jk` excluding
/// `psi_j (x) psi_k`.
pub const PBR_OUTCOMES: [&str; 4] = ["00", "01", "10", "11"];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `Phi_00 .. Phi_11` on two qubits, `Phi_jk` orthogonal to
/// `psi_j (x) psi_k` with `psi_0 = |0>`, `psi_1 = |+>`.
pub fn pbr_qubit_basis() -> [UnitVector; 4] {
    let (z, o, p, m) = (qubit::zero(), qubit::one(), qubit::plus(), qubit::minus());
    let pair = |a: &UnitVector, b: &UnitVector, x: &UnitVector, y: &UnitVector| {
        let (u, v) = (a.tensor(b), x.tensor(y));
        UnitVector::normalized(u.amps().iter().zip(v.amps()).map(|(s, t)| (s + t) * FRAC_1_SQRT_2).collect())
            .expect("nonzero")
    };
    [pair(&z, &o, &o, &z), pair(&z, &m, &o, &p), pair(&p, &o, &m, &z), pair(&p, &m, &m, &p)]
}

fn kraus_from(s: f64, c0: f64) -> (ComplexMatrix, ComplexMatrix) {
    let t = s / c0;
    // 1 - tan^2 = (c^2 - s^2) / c^2, formed without cancellation in tan
    let rest = ((c0 - s) * (c0 + s)).max(0.0).sqrt() / c0;
    let m0 = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c(1.0),
        (1, 1) => c(t),
        _ => c(0.0),
    });
    // rest * |+><1|
    let m1 = ComplexMatrix::from_fn(2, 2, |_, j| if j == 1 { c(rest * FRAC_1_SQRT_2) } else { c(0.0) });
    (m0, m1)
}

/// Kraus pair `M0 = |0><0| + tan t |1><1|`, `M1 = sqrt(1 - tan^2 t) |+><1|`
/// of the channel taking `|0>` to `|0>` and `sin t |0> + cos t |1>` to `|+>`.
pub fn pbr_kraus(theta: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !(0.0..=FRAC_PI_4).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta {theta} outside [0, pi/4]")));
    }
    Ok(kraus_from(theta.sin(), theta.cos()))
}

/// `sum_{r,s} (M_r (x) M_s)^dagger Pi_{Phi_jk} (M_r (x) M_s)` for each `jk`.
fn qubit_frame_povm(s: f64, c0: f64) -> Result<Vec<ComplexMatrix>> {
    let (m0, m1) = kraus_from(s, c0);
    let ks = [m0, m1];
    let mut out = Vec::with_capacity(4);
    for phi in pbr_qubit_basis() {
        let p = phi.projector();
        let mut e = ComplexMatrix::zeros(4, 4);
        for a in &ks {
            for b in &ks {
                let k = a.kron(b);
                e = &e + &k.adjoint().try_mul(&p)?.try_mul(&k)?;
            }
        }
        out.push(e.hermitian_part());
    }
    Ok(out)
}

/// Four-outcome POVM antidistinguishing `{psi_j (x) psi_k}` for two states
/// with `|<psi_0|psi_1>|^2 <= 1/2`.
///
/// The construction runs in the orthonormal frame `psi_0`,
/// `(psi_1 - sin t psi_0) / cos t` of their span, with `psi_1` phased so that
/// `<psi_0|psi_1> = sin t >= 0`, and is lifted to `C^d (x) C^d`. The
/// projector onto the complement of `span (x) span` is added to outcome
/// `00`.
pub fn pbr_povm(psi0: &UnitVector, psi1: &UnitVector, tol: f64) -> Result<AntidistinguishingCertificate> {
    let d = psi0.dim();
    if psi1.dim() != d {
        return Err(Error::Dimension(format!("states of dimension {d} and {}", psi1.dim())));
    }
    let x = pure_overlap(psi0, psi1)?;
    if x > 0.5 + ARITH_TOL {
        return Err(Error::InvalidArgument(format!("overlap {x} exceeds 1/2; see tensor_power_reduction")));
    }
    let aligned = phase_align(psi1, psi0)?;
    let s = psi0.inner(&aligned)?.re.clamp(0.0, FRAC_1_SQRT_2);
    let c0 = ((1.0 - s) * (1.0 + s)).sqrt();
    let b1: Vec<Complex64> = aligned.amps().iter().zip(psi0.amps()).map(|(a, p)| (a - p * s) / c0).collect();
    // d x 2 isometry onto the span
    let iso = ComplexMatrix::from_fn(d, 2, |i, j| if j == 0 { psi0.amps()[i] } else { b1[i] });
    let iso2 = iso.kron(&iso);
    let lift = |e: &ComplexMatrix| -> Result<ComplexMatrix> { Ok(iso2.try_mul(e)?.try_mul(&iso2.adjoint())?.hermitian_part()) };
    let complement = ComplexMatrix::identity(d * d).try_sub(&iso2.try_mul(&iso2.adjoint())?)?;

    let mut effects = Vec::with_capacity(4);
    for (jk, e) in qubit_frame_povm(s, c0)?.iter().enumerate() {
        let mut lifted = lift(e)?;
        if jk == 0 {
            lifted = &lifted + &complement;
        }
        effects.push((PBR_OUTCOMES[jk].to_string(), lifted.hermitian_part()));
    }
    let povm = Povm::new(effects)?;
    let states: Vec<ComplexMatrix> = [(psi0, psi0), (psi0, psi1), (psi1, psi0), (psi1, psi1)]
        .iter()
        .map(|(a, b)| a.tensor(b).projector())
        .collect();
    verify_antidistinguishes(&povm, &states, tol)
}

/// Smallest `n >= 1` with `overlap^n <= 1/2`.
pub fn tensor_power_for_overlap(overlap: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidArgument(format!("overlap {overlap} outside [0, 1)")));
    }
    let mut n = 1usize;
    while overlap.powi(n as i32) > 0.5 {
        n += 1;
    }
    Ok(n)
}

/// Number of copies after which the two states have overlap at most `1/2`.
pub fn tensor_power_reduction(psi0: &UnitVector, psi1: &UnitVector) -> Result<usize> {
    let x = pure_overlap(psi0, psi1)?;
    if x >= 1.0 - ARITH_TOL {
        return Err(Error::InvalidArgument("states are not distinct".into()));
    }
    tensor_power_for_overlap(x)
}

/// `psi^(x)n`.
pub fn tensor_power(psi: &UnitVector, n: usize) -> Result<UnitVector> {
    if n == 0 {
        return Err(Error::InvalidArgument("tensor power needs n >= 1".into()));
    }
    let mut out = psi.clone();
    for _ in 1..n {
        out = out.tensor(psi);
    }
    Ok(out)
}

/// Outcome of [`pbr_overlap_witness`].
#[derive(Clone, Debug, Serialize)]
pub struct PbrOverlapWitness {
    /// `L(mu_a, mu_b)` in the single-system model.
    pub pair_overlap: f64,
    /// Overlap of the four product measures.
    pub l4: f64,
    /// Predicted probability of outcome `jk` on `psi_j (x) psi_k`.
    pub precluded: IndexMap<String, f64>,
    pub max_precluded_prob: f64,
    pub sum_precluded: f64,
    /// Preclusion check of the product model extended by the measurement.
    pub preclusions: Report,
    #[serde(skip)]
    pub model: OntologicalModel,
}

/// [`pbr_overlap_witness_for`] on the two states an ABCL model overlaps.
pub fn pbr_overlap_witness(abcl: &AbclModel, tol: f64) -> Result<PbrOverlapWitness> {
    pbr_overlap_witness_for(&abcl.model, &abcl.a, &abcl.b, tol)
}

/// Product model of `model` with itself, extended by the measurement onto
/// [`pbr_qubit_basis`]. The product ontic state over states `(x, y)` of the
/// fragment answers `Phi_jk` with probability `Tr(Pi_Phi_jk (rho_x (x) rho_y))`.
/// States `a` and `b` must be `|0>` and `|+>`. Interval-augmented models are
/// discretized first; finite models must name their ontic states after
/// fragment states.
///
/// Quantum theory gives every precluded probability `0`; the product model
/// gives a total of at least the overlap of the four product measures.
pub fn pbr_overlap_witness_for(model: &OntologicalModel, a: &str, b: &str, tol: f64) -> Result<PbrOverlapWitness> {
    let frag = model.fragment().ok_or_else(|| Error::InvalidArgument("model has no fragment".into()))?;
    if frag.dim != 2 {
        return Err(Error::Dimension(format!("witness needs a qubit model, got dimension {}", frag.dim)));
    }
    for (name, want) in [(a, qubit::zero()), (b, qubit::plus())] {
        if !frag.state(name)?.approx_eq(&want.projector(), POVM_TOL) {
            return Err(Error::InvalidArgument(format!("state `{name}` is not the expected one of |0>, |+>")));
        }
    }
    let pair_overlap = measure_overlap(&[&model.measures(a)?[0], &model.measures(b)?[0]], ZERO_WEIGHT)?;
    let (single, origin) = if model.space().is_finite() {
        (model.clone(), None)
    } else {
        let (m, o) = discretize(model)?;
        (m, Some(o))
    };
    let origin_of = |cell: &str| -> String { origin.as_ref().map_or_else(|| cell.to_string(), |o| o[cell].0.clone()) };
    let product = direct_product_model(&single, &single)?;
    let (space, delta, mut xi, fragment) = product.into_parts();
    let mut fragment = fragment.expect("product of models with fragments");

    let basis = pbr_qubit_basis();
    let povm = Povm::projective(PBR_OUTCOMES.iter().copied().zip(basis.iter().cloned()))?;
    let single_frag = single.fragment().expect("fragment kept");
    let mut table = IndexMap::new();
    for label in space.labels() {
        let parts = split_tuple_label(label).ok_or_else(|| unknown("product label", label))?;
        // an ontic state is answered as its originating pure state would be
        let rho = single_frag
            .state(&origin_of(parts[0]))?
            .kron(single_frag.state(&origin_of(parts[1]))?);
        let row = povm.outcomes().iter().map(|o| born_rule(&rho, &o.effect)).collect::<Result<Vec<_>>>()?;
        let s: f64 = row.iter().sum();
        table.insert(label.clone(), row.into_iter().map(|p| p / s).collect());
    }
    xi.insert("PBR".into(), vec![ResponseFunction::from(FiniteResponse::new(PBR_OUTCOMES, table)?)]);
    fragment = fragment.with_measurement("PBR", povm);
    let extended = OntologicalModel::new(space, delta, xi, Some(fragment))?;

    let names = [a, b];
    let mut product_mus = Vec::new();
    let mut precluded = IndexMap::new();
    let pr = &extended.responses("PBR")?[0];
    for (jk, outcome) in PBR_OUTCOMES.iter().enumerate() {
        let state = tuple_label(&[names[jk / 2], names[jk % 2]]);
        let mu = &extended.measures(&state)?[0];
        product_mus.push(mu);
        precluded.insert((*outcome).to_string(), extended.predicted(mu, pr, outcome)?);
    }
    let l4 = measure_overlap(&product_mus, ZERO_WEIGHT)?;
    let max_precluded_prob = precluded.values().fold(0.0f64, |m, p| m.max(*p));
    let sum_precluded = precluded.values().sum();
    let preclusions = verify_preclusions(&extended, tol)?;
    Ok(PbrOverlapWitness { pair_overlap, l4, precluded, max_precluded_prob, sum_precluded, preclusions, model: extended })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{abcl_model, bell_model, qubit_zx_fragment};
    use crate::quantum::validate_povm;

    #[test]
    fn basis_is_orthonormal_and_excludes() {
        let b = pbr_qubit_basis();
        for i in 0..4 {
            for j in 0..4 {
                let g = b[i].inner(&b[j]).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(want)).norm() <= 1e-12);
            }
        }
        let (z, p) = (qubit::zero(), qubit::plus());
        assert!(b[0].inner(&z.tensor(&z)).unwrap().norm() <= 1e-16);
        assert!(b[3].inner(&p.tensor(&p)).unwrap().norm() <= 1e-16);
    }

    #[test]
    fn kraus_endpoints() {
        let (m0, m1) = pbr_kraus(FRAC_PI_4).unwrap();
        assert!(m0.approx_eq(&ComplexMatrix::identity(2), 1e-15));
        assert!(m1.approx_eq(&ComplexMatrix::zeros(2, 2), 1e-7));
        let (m0, m1) = pbr_kraus(0.0).unwrap();
        assert!(m0.approx_eq(&qubit::zero().projector(), 0.0));
        let want = qubit::plus().to_column().try_mul(&qubit::one().to_column().adjoint()).unwrap();
        assert!(m1.approx_eq(&want, 1e-15));
        assert!(pbr_kraus(1.0).is_err());
    }

    #[test]
    fn kraus_channel_maps_pair() {
        for &t in &[0.0, 0.3, 0.7] {
            let (m0, m1) = pbr_kraus(t).unwrap();
            let comp = &m0.adjoint().try_mul(&m0).unwrap() + &m1.adjoint().try_mul(&m1).unwrap();
            assert!(comp.approx_eq(&ComplexMatrix::identity(2), 1e-12));
            let psi1 = UnitVector::from_real(&[t.sin(), t.cos()]).unwrap().projector();
            let out = |rho: &ComplexMatrix| {
                &m0.try_mul(rho).unwrap().try_mul(&m0.adjoint()).unwrap()
                    + &m1.try_mul(rho).unwrap().try_mul(&m1.adjoint()).unwrap()
            };
            assert!(out(&qubit::zero().projector()).approx_eq(&qubit::zero().projector(), 1e-12));
            assert!(out(&psi1).approx_eq(&qubit::plus().projector(), 1e-12));
        }
    }

    #[test]
    fn qubit_case_is_the_basis() {
        let cert = pbr_povm(&qubit::zero(), &qubit::plus(), 1e-12).unwrap();
        assert!(cert.valid);
        for (o, phi) in cert.povm.outcomes().iter().zip(pbr_qubit_basis()) {
            assert!(o.effect.approx_eq(&phi.projector(), 1e-12));
        }
    }

    #[test]
    fn orthogonal_pair_and_higher_dimension() {
        let cert = pbr_povm(&qubit::zero(), &qubit::one(), 1e-12).unwrap();
        assert!(cert.valid && cert.max_residual() == 0.0);
        let a = UnitVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let b = UnitVector::normalized(vec![c(0.5), Complex64::new(0.0, 0.6), c(0.5)]).unwrap();
        let cert = pbr_povm(&a, &b, 1e-10).unwrap();
        assert!(cert.valid, "{:?}", cert.residuals);
        assert!(validate_povm(&cert.povm, 1e-10).verified);
        assert!(pbr_povm(&a, &a, 1e-10).is_err());
    }

    #[test]
    fn tensor_power_counts() {
        assert_eq!(tensor_power_for_overlap(0.5).unwrap(), 1);
        assert_eq!(tensor_power_for_overlap(0.6).unwrap(), 2);
        assert_eq!(tensor_power_for_overlap(0.75).unwrap(), 3);
        assert_eq!(tensor_power_for_overlap(0.9).unwrap(), 7);
        assert!(tensor_power_reduction(&qubit::zero(), &qubit::zero()).is_err());
        let p = tensor_power(&qubit::plus(), 3).unwrap();
        let z = tensor_power(&qubit::zero(), 3).unwrap();
        assert!((pure_overlap(&p, &z).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn witness_on_abcl_and_bell() {
        let frag = qubit_zx_fragment();
        let abcl = abcl_model(&frag, &qubit::zero(), &qubit::plus()).unwrap();
        let w = pbr_overlap_witness(&abcl, 1e-10).unwrap();
        assert!(w.pair_overlap > 0.0);
        assert!((w.l4 - w.pair_overlap * w.pair_overlap).abs() <= 1e-15);
        assert!(w.sum_precluded >= w.l4);
        assert!(!w.preclusions.verified);

        let bell = bell_model(&frag).unwrap();
        let w = pbr_overlap_witness_for(&bell, "0", "+", 1e-10).unwrap();
        assert_eq!(w.l4, 0.0);
        assert!(w.max_precluded_prob <= 1e-15);
        assert!(pbr_overlap_witness_for(&bell, "0", "1", 1e-10).is_err());
    }
}
