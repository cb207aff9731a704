use indexmap::IndexMap;

use crate::error::{unknown, Error, Result};
use crate::onto::{EpistemicState, FiniteResponse, OnticSpace, OntologicalModel, ResponseFunction};
use crate::prob::FiniteDistribution;
use crate::quantum::{born_rule, ComplexMatrix, PMFragment};
use crate::POVM_TOL;

/// Convex decomposition of a mixed state: `(weight, pure state name)`.
pub type Decomposition = Vec<(f64, String)>;

/// Beltrametti-Bugajski model restricted to a finite fragment: the ontic
/// states are the fragment's pure states, `mu_psi = delta_psi` and
/// `Pr(E|M, lambda) = Tr(E Pi_lambda)`.
///
/// Mixed states need at least one decomposition into the fragment's pure
/// states. Only the first is used unless `include_mixed_decompositions` is
/// set, in which case each decomposition adds one measure to `Delta_rho`.
pub fn beltrametti_bugajski(
    fragment: &PMFragment,
    decompositions: &IndexMap<String, Vec<Decomposition>>,
    include_mixed_decompositions: bool,
) -> Result<OntologicalModel> {
    fragment.validate(POVM_TOL)?;
    let pure = fragment.pure_state_names(POVM_TOL);
    if pure.is_empty() {
        return Err(Error::InvalidArgument("fragment has no pure states".into()));
    }
    let mut delta = IndexMap::new();
    for (name, rho) in &fragment.states {
        if pure.contains(name) {
            delta.insert(name.clone(), vec![EpistemicState::from(FiniteDistribution::point(name.clone()))]);
            continue;
        }
        let decs = decompositions
            .get(name)
            .filter(|d| !d.is_empty())
            .ok_or_else(|| Error::InvalidArgument(format!("mixed state `{name}` needs a decomposition")))?;
        let take = if include_mixed_decompositions { decs.len() } else { 1 };
        let mut set = Vec::new();
        for dec in &decs[..take] {
            let mut sum = ComplexMatrix::zeros(fragment.dim, fragment.dim);
            let mut weights: IndexMap<String, f64> = IndexMap::new();
            for (w, p) in dec {
                if !pure.contains(p) {
                    return Err(unknown("pure state", p.clone()));
                }
                sum = sum.try_add(&fragment.states[p].scale_real(*w))?;
                *weights.entry(p.clone()).or_insert(0.0) += w;
            }
            if !sum.approx_eq(rho, POVM_TOL) {
                return Err(Error::InvalidArgument(format!("decomposition does not reproduce `{name}`")));
            }
            set.push(EpistemicState::from(FiniteDistribution::try_from(weights)?));
        }
        delta.insert(name.clone(), set);
    }

    let mut xi = IndexMap::new();
    for (meas, povm) in &fragment.measurements {
        let mut table = IndexMap::new();
        for lambda in &pure {
            let rho = &fragment.states[lambda];
            let row = povm.outcomes().iter().map(|o| born_rule(rho, &o.effect)).collect::<Result<Vec<_>>>()?;
            table.insert(lambda.clone(), row);
        }
        let r = FiniteResponse::new(povm.labels().map(String::from).collect::<Vec<_>>(), table)?;
        xi.insert(meas.clone(), vec![ResponseFunction::from(r)]);
    }
    OntologicalModel::new(OnticSpace::finite(pure)?, delta, xi, Some(fragment.clone()))
}

/// The two decompositions of `I/2` into the x and z eigenstates used with
/// [`super::spekkens_fragment`].
pub fn maximally_mixed_decompositions() -> IndexMap<String, Vec<Decomposition>> {
    let half = |a: &str, b: &str| vec![(0.5, a.to_string()), (0.5, b.to_string())];
    let mut m = IndexMap::new();
    m.insert("I/2".to_string(), vec![half("x+", "x-"), half("z+", "z-")]);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spekkens_fragment;

    #[test]
    fn mixed_state_measure_from_decomposition() {
        let m = beltrametti_bugajski(&spekkens_fragment(), &maximally_mixed_decompositions(), false).unwrap();
        let mus = m.measures("I/2").unwrap();
        assert_eq!(mus.len(), 1);
        let w = mus[0].as_finite().unwrap();
        assert_eq!((w.weight("x+"), w.weight("x-")), (0.5, 0.5));
        let both = beltrametti_bugajski(&spekkens_fragment(), &maximally_mixed_decompositions(), true).unwrap();
        assert_eq!(both.measures("I/2").unwrap().len(), 2);
        assert!(beltrametti_bugajski(&spekkens_fragment(), &IndexMap::new(), false).is_err());
    }
}
