use serde::{Deserialize, Serialize};

use super::measure::{exclusive_mass, measure_distance, measure_overlap, EpistemicState};
use super::model::{predicted_prob, predicted_prob_on, OntologicalModel};
use crate::error::{Error, Result};
use crate::quantum::born_rule;
use crate::report::Report;
use crate::{DISTINCT_TOL, POVM_TOL, ZERO_WEIGHT};

fn check_id(state: &str, i: usize, meas: &str, r: usize, outcome: &str) -> String {
    format!("{state}[{i}]/{meas}[{r}]/{outcome}")
}

fn reproduction(model: &OntologicalModel, tol: f64, name: &str, only_preclusions: bool) -> Result<Report> {
    let frag = model.require_fragment()?;
    let mut report = Report::new(name, tol);
    for (state, mus) in model.delta() {
        let rho = frag.state(state)?;
        for (meas, prs) in model.xi() {
            let povm = frag.measurement(meas)?;
            for (k, o) in povm.outcomes().iter().enumerate() {
                let expected = born_rule(rho, &o.effect)?;
                if only_preclusions && expected > tol {
                    continue;
                }
                for (i, mu) in mus.iter().enumerate() {
                    for (r, pr) in prs.iter().enumerate() {
                        let predicted = predicted_prob(mu, pr, k)?;
                        let id = check_id(state, i, meas, r, &o.label);
                        if only_preclusions {
                            report.check_residual(id, expected, predicted, predicted.max(0.0));
                        } else {
                            report.check(id, expected, predicted);
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `|int Pr(E|M, lambda) dmu - Tr(E rho)|` for every state, measure,
/// measurement, response and outcome.
pub fn verify_reproduces(model: &OntologicalModel, tol: f64) -> Result<Report> {
    reproduction(model, tol, "reproduces", false)
}

/// Checks only the pairs with `Tr(E rho) <= tol`, requiring the predicted
/// probability to be at most `tol`.
pub fn verify_preclusions(model: &OntologicalModel, tol: f64) -> Result<Report> {
    reproduction(model, tol, "preclusions", true)
}

/// True when every cross pair of measures has overlap at most
/// [`DISTINCT_TOL`], i.e. `D = 1`.
pub fn ontologically_distinct(model: &OntologicalModel, a: &str, b: &str) -> Result<bool> {
    for mu in model.measures(a)? {
        for nu in model.measures(b)? {
            if measure_overlap(&[mu, nu], ZERO_WEIGHT)? > DISTINCT_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportMethod {
    /// Enumeration of finite labels.
    LabelEnumeration,
    /// Exact cell decomposition of piecewise-constant densities.
    PiecewiseCells,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub psi_ontic: bool,
    pub pairwise_epistemic: bool,
    pub sometimes_psi_ontic: bool,
    pub method: SupportMethod,
}

impl Classification {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new("classify", DISTINCT_TOL);
        r.flag("psi_ontic", self.psi_ontic);
        r.flag("pairwise_epistemic", self.pairwise_epistemic);
        r.flag("sometimes_psi_ontic", self.sometimes_psi_ontic);
        r.flag("piecewise_cells", self.method == SupportMethod::PiecewiseCells);
        r
    }
}

/// Pure states of the fragment, paired with their projectors.
fn pure_states(model: &OntologicalModel) -> Result<Vec<(String, crate::quantum::ComplexMatrix)>> {
    let frag = model.require_fragment()?;
    Ok(frag
        .pure_state_names(POVM_TOL)
        .into_iter()
        .map(|n| {
            let rho = frag.states[&n].clone();
            (n, rho)
        })
        .collect())
}

/// psi-ontic, pairwise psi-epistemic and sometimes psi-ontic verdicts over the
/// fragment's pure states. States with equal projectors count as one state.
pub fn classify(model: &OntologicalModel) -> Result<Classification> {
    let pure = pure_states(model)?;
    let mut psi_ontic = true;
    let mut pairwise = true;
    for (i, (a, ra)) in pure.iter().enumerate() {
        for (b, rb) in &pure[i + 1..] {
            if ra.approx_eq(rb, POVM_TOL) {
                continue;
            }
            let distinct = ontologically_distinct(model, a, b)?;
            psi_ontic &= distinct;
            if born_rule(ra, rb)? > POVM_TOL {
                pairwise &= !distinct;
            }
        }
    }
    let mut sometimes = !pure.is_empty();
    'states: for (a, ra) in &pure {
        let others: Vec<&EpistemicState> = pure
            .iter()
            .filter(|(_, rb)| !ra.approx_eq(rb, POVM_TOL))
            .map(|(b, _)| model.measures(b))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        for mu in model.measures(a)? {
            if exclusive_mass(mu, &others, ZERO_WEIGHT)? <= ZERO_WEIGHT {
                sometimes = false;
                break 'states;
            }
        }
    }
    let method = if model.space().is_finite() { SupportMethod::LabelEnumeration } else { SupportMethod::PiecewiseCells };
    Ok(Classification { psi_ontic, pairwise_epistemic: pairwise, sometimes_psi_ontic: sometimes, method })
}

/// For every ordered pair of distinct pure states `(psi, phi)`, every
/// context of `Pi_phi` and every response, compares the full predicted
/// probability of the `Pi_phi` outcome under `mu_psi` with the part carried
/// by `supp(nu_phi)`. Errors if some pure `phi` has no measurement
/// containing `Pi_phi`.
pub fn is_maximally_psi_epistemic(model: &OntologicalModel, tol: f64) -> Result<Report> {
    let frag = model.require_fragment()?;
    let pure = pure_states(model)?;
    let mut report = Report::new("maximally_psi_epistemic", tol);
    for (phi, rphi) in &pure {
        let contexts = frag.contexts_of(rphi, POVM_TOL);
        if contexts.is_empty() {
            return Err(Error::InvalidArgument(format!("no measurement contains the projector onto `{phi}`")));
        }
        for (psi, rpsi) in &pure {
            if rpsi.approx_eq(rphi, POVM_TOL) {
                continue;
            }
            for (i, mu) in model.measures(psi)?.iter().enumerate() {
                for (j, nu) in model.measures(phi)?.iter().enumerate() {
                    let region = nu.support(ZERO_WEIGHT);
                    for (meas, k) in &contexts {
                        for (r, pr) in model.responses(meas)?.iter().enumerate() {
                            let full = predicted_prob(mu, pr, *k)?;
                            let on = predicted_prob_on(mu, pr, *k, &region)?;
                            let id = format!("{psi}[{i}]|{phi}[{j}]/{meas}[{r}]");
                            report.check(id, full, on);
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// States whose `Delta` set holds at least two measures at variational
/// distance above [`DISTINCT_TOL`].
pub fn detect_preparation_contextuality(model: &OntologicalModel) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (state, mus) in model.delta() {
        let mut found = false;
        'pairs: for (i, a) in mus.iter().enumerate() {
            for b in &mus[i + 1..] {
                if measure_distance(a, b)? > DISTINCT_TOL {
                    found = true;
                    break 'pairs;
                }
            }
        }
        if found {
            out.push(state.clone());
        }
    }
    Ok(out)
}
