use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::onto::{EpistemicState, OnticSpace, OntologicalModel, Piece, ResponseFunction, StructuredMeasure, StructuredResponse};
use crate::quantum::{born_rule, PMFragment, Povm, UnitVector};
use crate::POVM_TOL;

/// Pure states and rank-one projective measurements in orthonormal bases.
fn check_basis_fragment(fragment: &PMFragment) -> Result<()> {
    fragment.validate(POVM_TOL)?;
    for name in fragment.states.keys() {
        if !fragment.is_pure(name, POVM_TOL)? {
            return Err(Error::InvalidArgument(format!("state `{name}` is not pure")));
        }
    }
    for (name, povm) in &fragment.measurements {
        if povm.len() != fragment.dim {
            return Err(Error::InvalidArgument(format!("measurement `{name}` is not an orthonormal basis")));
        }
        for o in povm.outcomes() {
            let sq = o.effect.try_mul(&o.effect)?;
            if (o.effect.trace().re - 1.0).abs() > POVM_TOL || !sq.approx_eq(&o.effect, POVM_TOL) {
                return Err(Error::InvalidArgument(format!("effect `{}` of `{name}` is not a rank-one projector", o.label)));
            }
        }
    }
    Ok(())
}

fn born_lengths(fragment: &PMFragment, state: &str, povm: &Povm) -> Result<Vec<f64>> {
    let rho = &fragment.states[state];
    povm.outcomes().iter().map(|o| born_rule(rho, &o.effect)).collect()
}

fn interval_responses(
    fragment: &PMFragment,
    order_of: impl Fn(&str) -> Vec<usize>,
) -> Result<IndexMap<String, Vec<ResponseFunction>>> {
    let mut xi = IndexMap::new();
    for (meas, povm) in &fragment.measurements {
        let order = order_of(meas);
        let mut intervals = IndexMap::new();
        for state in fragment.states.keys() {
            intervals.insert(state.clone(), StructuredResponse::tile(&born_lengths(fragment, state, povm)?, &order));
        }
        let r = StructuredResponse::new(povm.labels().map(String::from).collect::<Vec<_>>(), intervals)?;
        xi.insert(meas.clone(), vec![ResponseFunction::from(r)]);
    }
    Ok(xi)
}

/// Bell's model: ontic states `(lambda_1, lambda_2)` with `lambda_1` a pure
/// state of the fragment and `lambda_2` in `[0, 1]`. A state `psi` is
/// `delta_psi x uniform`; a basis measurement splits `[0, 1]` into
/// consecutive half-open intervals of lengths `Tr(Pi_j Pi_lambda1)`.
pub fn bell_model(fragment: &PMFragment) -> Result<OntologicalModel> {
    check_basis_fragment(fragment)?;
    let space = OnticSpace::interval_augmented(fragment.states.keys().cloned())?;
    let delta = fragment
        .states
        .keys()
        .map(|s| (s.clone(), vec![EpistemicState::from(StructuredMeasure::uniform_on(s.clone()))]))
        .collect();
    let d = fragment.dim;
    let xi = interval_responses(fragment, |_| (0..d).collect())?;
    OntologicalModel::new(space, delta, xi, Some(fragment.clone()))
}

/// A pairwise-overlapping modification of Bell's model for two states.
#[derive(Clone, Debug, Serialize)]
pub struct AbclModel {
    #[serde(skip)]
    pub model: OntologicalModel,
    pub a: String,
    pub b: String,
    /// Width of the shared slice actually used.
    pub epsilon_safe: f64,
    /// `|<a|b>| / d`, the amplitude bound the construction is phrased in.
    pub epsilon_nominal: f64,
    /// Per measurement, outcome indices in interval order.
    pub orders: IndexMap<String, Vec<usize>>,
}

fn state_name(fragment: &PMFragment, v: &UnitVector) -> Result<String> {
    let p = v.projector();
    fragment
        .states
        .iter()
        .find(|(_, rho)| rho.approx_eq(&p, POVM_TOL))
        .map(|(n, _)| n.clone())
        .ok_or_else(|| Error::InvalidArgument("state is not in the fragment".into()))
}

/// Bell's model with each basis reordered so that the outcome maximising
/// `min(Tr(Pi_phi Pi_a), Tr(Pi_phi Pi_b))` comes first (stable on ties), and
/// with `a`, `b` sharing the slice `{a, b} x [0, eps)`: the measure for `a`
/// is `1/2` on `a x [0, eps)`, `1/2` on `b x [0, eps)` and `1` on
/// `a x [eps, 1]`, and symmetrically for `b`, so `L(mu_a, mu_b) = eps`.
///
/// `eps = (|<a|b>| / d)^2`, which lies inside every first interval because
/// that interval has length at least `(|<a|b>| / d)^2` for both states.
pub fn abcl_model(fragment: &PMFragment, a: &UnitVector, b: &UnitVector) -> Result<AbclModel> {
    check_basis_fragment(fragment)?;
    let d = fragment.dim;
    let amp = a.inner(b)?.norm();
    if amp * amp <= POVM_TOL {
        return Err(Error::InvalidArgument("ABCL states must be nonorthogonal".into()));
    }
    let (na, nb) = (state_name(fragment, a)?, state_name(fragment, b)?);
    if na == nb {
        return Err(Error::InvalidArgument("ABCL states must be distinct".into()));
    }
    let epsilon_nominal = amp / d as f64;
    let mut eps = epsilon_nominal * epsilon_nominal;

    let mut orders = IndexMap::new();
    for (meas, povm) in &fragment.measurements {
        let ta = born_lengths(fragment, &na, povm)?;
        let tb = born_lengths(fragment, &nb, povm)?;
        let key: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| x.min(*y)).collect();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| key[j].total_cmp(&key[i]));
        // guards the containment against rounding in the Born values
        eps = eps.min(key[order[0]]);
        orders.insert(meas.clone(), order);
    }

    let space = OnticSpace::interval_augmented(fragment.states.keys().cloned())?;
    let mut delta = IndexMap::new();
    for s in fragment.states.keys() {
        let mu = if *s == na || *s == nb {
            let other = if *s == na { &nb } else { &na };
            StructuredMeasure::new([
                (s.clone(), vec![Piece::new(0.0, eps, 0.5), Piece::new(eps, 1.0, 1.0)]),
                (other.clone(), vec![Piece::new(0.0, eps, 0.5)]),
            ])?
        } else {
            StructuredMeasure::uniform_on(s.clone())
        };
        delta.insert(s.clone(), vec![EpistemicState::from(mu)]);
    }
    let xi = interval_responses(fragment, |m| orders[m].clone())?;
    let model = OntologicalModel::new(space, delta, xi, Some(fragment.clone()))?;
    Ok(AbclModel { model, a: na, b: nb, epsilon_safe: eps, epsilon_nominal, orders })
}

/// Qubit fragment `{|0>, |1>, |+>, |->}` with the Z and X bases.
pub fn qubit_zx_fragment() -> PMFragment {
    use crate::quantum::qubit;
    PMFragment::new(2)
        .with_pure_state("0", &qubit::zero())
        .with_pure_state("1", &qubit::one())
        .with_pure_state("+", &qubit::plus())
        .with_pure_state("-", &qubit::minus())
        .with_measurement("Z", Povm::projective([("0", qubit::zero()), ("1", qubit::one())]).expect("basis"))
        .with_measurement("X", Povm::projective([("+", qubit::plus()), ("-", qubit::minus())]).expect("basis"))
}

/// Seeded fragment of `states` Haar-random pure states `s0, s1, ..` and
/// `bases` Haar-random orthonormal bases `M0, M1, ..` with outcomes
/// `"0" .. "d-1"`.
pub fn random_basis_fragment<R: rand::Rng + ?Sized>(d: usize, states: usize, bases: usize, rng: &mut R) -> PMFragment {
    use crate::quantum::random::{random_state, random_unitary};
    let mut f = PMFragment::new(d);
    for i in 0..states {
        f = f.with_pure_state(format!("s{i}"), &random_state(d, rng));
    }
    for m in 0..bases {
        let u = random_unitary(d, rng);
        let cols = (0..d).map(|j| {
            let v = UnitVector::normalized((0..d).map(|i| u.get(i, j)).collect()).expect("unitary column");
            (j.to_string(), v)
        });
        f = f.with_measurement(format!("M{m}"), Povm::projective(cols).expect("basis"));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onto::measure_overlap;
    use crate::quantum::qubit;

    #[test]
    fn abcl_qubit_epsilon() {
        let m = abcl_model(&qubit_zx_fragment(), &qubit::zero(), &qubit::plus()).unwrap();
        assert!((m.epsilon_nominal - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((m.epsilon_safe - 0.125).abs() < 1e-15);
        let mu = &m.model.measures(&m.a).unwrap()[0];
        let nu = &m.model.measures(&m.b).unwrap()[0];
        assert_eq!(measure_overlap(&[mu, nu], 0.0).unwrap(), m.epsilon_safe);
        assert!(abcl_model(&qubit_zx_fragment(), &qubit::zero(), &qubit::one()).is_err());
    }

    #[test]
    fn bell_rejects_mixed_states() {
        let f = qubit_zx_fragment().with_state("mixed", crate::quantum::ComplexMatrix::identity(2).scale_real(0.5));
        assert!(bell_model(&f).is_err());
    }

    #[test]
    fn random_fragments_reproduce_exactly() {
        use crate::onto::verify_reproduces;
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let f = random_basis_fragment(3, 5, 4, &mut rng);
        assert!(f.validate(1e-10).is_ok());
        let r = verify_reproduces(&bell_model(&f).unwrap(), 0.0).unwrap();
        assert!(r.verified && r.max_residual == 0.0);
        let a = f.pure_vector("s0", 1e-10).unwrap();
        let b = f.pure_vector("s1", 1e-10).unwrap();
        let m = abcl_model(&f, &a, &b).unwrap();
        let r = verify_reproduces(&m.model, 0.0).unwrap();
        assert!(r.verified && r.max_residual == 0.0);
    }
}
