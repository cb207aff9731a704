use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::measure::{EpistemicState, Region, StructuredMeasure};
use super::response::{ResponseFunction, StructuredResponse};
use super::space::OnticSpace;
use crate::error::{unknown, Error, Result};
use crate::exact::ExactDot;
use crate::quantum::PMFragment;

/// `(Lambda, Sigma, Delta, Xi)` together with the fragment it models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct OntologicalModel {
    space: OnticSpace,
    delta: IndexMap<String, Vec<EpistemicState>>,
    xi: IndexMap<String, Vec<ResponseFunction>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fragment: Option<PMFragment>,
}

#[derive(Deserialize)]
struct RawModel {
    space: OnticSpace,
    delta: IndexMap<String, Vec<EpistemicState>>,
    xi: IndexMap<String, Vec<ResponseFunction>>,
    #[serde(default)]
    fragment: Option<PMFragment>,
}

impl TryFrom<RawModel> for OntologicalModel {
    type Error = Error;
    fn try_from(raw: RawModel) -> Result<Self> {
        OntologicalModel::new(raw.space, raw.delta, raw.xi, raw.fragment)
    }
}

pub type ModelParts = (
    OnticSpace,
    IndexMap<String, Vec<EpistemicState>>,
    IndexMap<String, Vec<ResponseFunction>>,
    Option<PMFragment>,
);

impl OntologicalModel {
    pub fn new(
        space: OnticSpace,
        delta: IndexMap<String, Vec<EpistemicState>>,
        xi: IndexMap<String, Vec<ResponseFunction>>,
        fragment: Option<PMFragment>,
    ) -> Result<Self> {
        let m = OntologicalModel { space, delta, xi, fragment };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.delta.is_empty() || self.xi.is_empty() {
            return Err(Error::InvalidArgument("model needs at least one state and one measurement".into()));
        }
        let finite = self.space.is_finite();
        for (state, mus) in &self.delta {
            if mus.is_empty() {
                return Err(Error::InvalidArgument(format!("Delta for `{state}` is empty")));
            }
            for mu in mus {
                if matches!(mu, EpistemicState::Finite { .. }) != finite {
                    return Err(Error::SpaceMismatch(format!("{} measure for `{state}` on a {} space", mu.kind(), self.space.kind())));
                }
                if let Some(l) = mu.labels().into_iter().find(|l| !self.space.contains(l)) {
                    return Err(Error::SpaceMismatch(format!("measure for `{state}` uses label `{l}` outside the space")));
                }
            }
        }
        for (meas, prs) in &self.xi {
            let Some(first) = prs.first() else {
                return Err(Error::InvalidArgument(format!("Xi for `{meas}` is empty")));
            };
            for pr in prs {
                if matches!(pr, ResponseFunction::Finite(_)) != finite {
                    return Err(Error::SpaceMismatch(format!("{} response for `{meas}` on a {} space", pr.kind(), self.space.kind())));
                }
                if pr.outcomes() != first.outcomes() {
                    return Err(Error::InvalidArgument(format!("responses for `{meas}` disagree on outcomes")));
                }
                if let Some(l) = self.space.labels().iter().find(|l| !pr.covers(l)) {
                    return Err(Error::InvalidArgument(format!("response for `{meas}` undefined at `{l}`")));
                }
            }
        }
        if let Some(f) = &self.fragment {
            for state in f.states.keys() {
                if !self.delta.contains_key(state) {
                    return Err(Error::InvalidArgument(format!("fragment state `{state}` has no Delta set")));
                }
            }
            for state in self.delta.keys() {
                f.state(state)?;
            }
            for (meas, povm) in &f.measurements {
                let prs = self.xi.get(meas).ok_or_else(|| Error::InvalidArgument(format!("fragment measurement `{meas}` has no Xi set")))?;
                if !prs[0].outcomes().iter().map(String::as_str).eq(povm.labels()) {
                    return Err(Error::InvalidArgument(format!("outcomes of `{meas}` differ from the fragment POVM")));
                }
            }
            for meas in self.xi.keys() {
                f.measurement(meas)?;
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn delta(&self) -> &IndexMap<String, Vec<EpistemicState>> {
        &self.delta
    }

    pub fn xi(&self) -> &IndexMap<String, Vec<ResponseFunction>> {
        &self.xi
    }

    pub fn fragment(&self) -> Option<&PMFragment> {
        self.fragment.as_ref()
    }

    pub(crate) fn require_fragment(&self) -> Result<&PMFragment> {
        self.fragment.as_ref().ok_or_else(|| Error::InvalidArgument("model has no fragment attached".into()))
    }

    pub fn measures(&self, state: &str) -> Result<&[EpistemicState]> {
        self.delta.get(state).map(Vec::as_slice).ok_or_else(|| unknown("state", state))
    }

    pub fn responses(&self, measurement: &str) -> Result<&[ResponseFunction]> {
        self.xi.get(measurement).map(Vec::as_slice).ok_or_else(|| unknown("measurement", measurement))
    }

    /// Attaches (or replaces) the fragment, re-validating.
    pub fn with_fragment(self, fragment: PMFragment) -> Result<Self> {
        OntologicalModel::new(self.space, self.delta, self.xi, Some(fragment))
    }

    pub fn into_parts(self) -> ModelParts {
        (self.space, self.delta, self.xi, self.fragment)
    }

    /// `int Pr(outcome|M, lambda) dmu(lambda)` for a named outcome.
    pub fn predicted(&self, mu: &EpistemicState, pr: &ResponseFunction, outcome: &str) -> Result<f64> {
        for l in mu.labels() {
            if !self.space.contains(l) {
                return Err(Error::SpaceMismatch(format!("label `{l}` outside the model's space")));
            }
        }
        predicted_prob(mu, pr, pr.outcome_index(outcome)?)
    }
}

/// `int Pr(E_k|M, lambda) dmu(lambda)`: a correctly rounded finite sum, or
/// for structured models the exact sum of density times interval length.
pub fn predicted_prob(mu: &EpistemicState, pr: &ResponseFunction, outcome: usize) -> Result<f64> {
    integrate(mu, pr, outcome, None)
}

/// As [`predicted_prob`] but restricted to `region`.
pub fn predicted_prob_on(mu: &EpistemicState, pr: &ResponseFunction, outcome: usize, region: &Region) -> Result<f64> {
    integrate(mu, pr, outcome, Some(region))
}

fn integrate(mu: &EpistemicState, pr: &ResponseFunction, outcome: usize, region: Option<&Region>) -> Result<f64> {
    if outcome >= pr.outcomes().len() {
        return Err(Error::InvalidArgument(format!("outcome index {outcome}")));
    }
    let mut acc = ExactDot::new();
    match (mu, pr) {
        (EpistemicState::Finite { weights }, ResponseFunction::Finite(r)) => {
            for (l, w) in weights.iter() {
                let keep = match region {
                    None => true,
                    Some(Region::Labels(set)) => set.contains(l),
                    Some(Region::Segments(_)) => return Err(Error::SpaceMismatch("interval region on a finite space".into())),
                };
                if keep {
                    acc.add(r.prob(l, outcome)?, w);
                }
            }
        }
        (EpistemicState::Structured { pieces }, ResponseFunction::Structured(r)) => {
            integrate_structured(&mut acc, pieces, r, outcome, region)?;
        }
        _ => return Err(Error::SpaceMismatch(format!("{} measure with {} response", mu.kind(), pr.kind()))),
    }
    Ok(acc.value())
}

fn integrate_structured(
    acc: &mut ExactDot,
    mu: &StructuredMeasure,
    r: &StructuredResponse,
    outcome: usize,
    region: Option<&Region>,
) -> Result<()> {
    const FULL: [(f64, f64); 1] = [(0.0, 1.0)];
    for (label, pieces) in mu.iter() {
        let iv = r.intervals(label).ok_or_else(|| unknown("ontic state", label))?[outcome];
        let segs: &[(f64, f64)] = match region {
            None => &FULL,
            Some(Region::Segments(map)) => map.get(label).map_or(&[], Vec::as_slice),
            Some(Region::Labels(_)) => return Err(Error::SpaceMismatch("label region on an interval space".into())),
        };
        for p in pieces {
            for &(s0, s1) in segs {
                let a = iv.lo.max(p.lo).max(s0);
                let b = iv.hi.min(p.hi).min(s1);
                if a >= b {
                    continue;
                }
                if a == iv.lo && b == iv.hi {
                    // whole interval: use its nominal length
                    acc.add(p.density, iv.len);
                } else {
                    acc.add(p.density, b);
                    acc.add(-p.density, a);
                }
            }
        }
    }
    Ok(())
}
