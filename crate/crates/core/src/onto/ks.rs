use indexmap::{IndexMap, IndexSet};

use super::measure::EpistemicState;
use super::model::{predicted_prob, OntologicalModel};
use super::response::{FiniteResponse, ResponseFunction};
use super::space::OnticSpace;
use crate::error::{Error, Result};
use crate::prob::FiniteDistribution;
use crate::report::Report;
use crate::POVM_TOL;

fn require_finite(model: &OntologicalModel) -> Result<()> {
    if model.space().is_finite() {
        Ok(())
    } else {
        Err(Error::SpaceMismatch("operation needs a finite ontic space; see `discretize`".into()))
    }
}

fn finite_responses<'a>(model: &'a OntologicalModel, meas: &str) -> Result<Vec<&'a FiniteResponse>> {
    Ok(model.responses(meas)?.iter().filter_map(ResponseFunction::as_finite).collect())
}

/// Ontic states yielding the outcome with certainty (within `tol`) in every
/// response of every measurement that contains the same effect.
pub fn cosupport(model: &OntologicalModel, measurement: &str, outcome: &str, tol: f64) -> Result<IndexSet<String>> {
    require_finite(model)?;
    let frag = model.require_fragment()?;
    let effect = frag
        .measurement(measurement)?
        .effect(outcome)
        .ok_or_else(|| crate::error::unknown("outcome", outcome))?;
    let contexts = frag.contexts_of(effect, POVM_TOL);
    let mut out = IndexSet::new();
    'labels: for label in model.space().labels() {
        for (meas, k) in &contexts {
            for pr in finite_responses(model, meas)? {
                if pr.prob(label, *k)? < 1.0 - tol {
                    continue 'labels;
                }
            }
        }
        out.insert(label.clone());
    }
    Ok(out)
}

/// Result of [`ks_analysis`].
#[derive(Clone, Debug)]
pub struct KsAnalysis {
    pub report: Report,
    /// Model restricted to `cap_M cup_j Lambda^{E_j}`, built when every
    /// characterisation residual is within tolerance.
    pub revision: Option<OntologicalModel>,
}

impl KsAnalysis {
    pub fn outcome_deterministic(&self) -> bool {
        self.report.flags.get("outcome_deterministic").copied().unwrap_or(false)
    }

    pub fn measurement_noncontextual(&self) -> bool {
        self.report.flags.get("measurement_noncontextual").copied().unwrap_or(false)
    }

    pub fn ks_noncontextual(&self) -> bool {
        self.outcome_deterministic() && self.measurement_noncontextual()
    }
}

fn rows_equal(a: &FiniteResponse, b: &FiniteResponse, labels: &IndexSet<String>, tol: f64) -> Result<bool> {
    for l in labels {
        let (ra, rb) = (a.row(l), b.row(l));
        match (ra, rb) {
            (Some(x), Some(y)) if x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Outcome determinism, measurement noncontextuality and the residuals of
/// `int Pr(E|M, lambda) dmu = mu(Lambda^E)` for every effect and measure.
/// The report's verdict reflects only those residuals.
pub fn ks_analysis(model: &OntologicalModel, tol: f64) -> Result<KsAnalysis> {
    require_finite(model)?;
    let frag = model.require_fragment()?;
    let labels = model.space().labels();
    let mut report = Report::new("ks_analysis", tol);

    let deterministic = model
        .xi()
        .values()
        .flatten()
        .filter_map(ResponseFunction::as_finite)
        .all(|r| r.iter().all(|(_, row)| row.iter().all(|&p| p <= tol || p >= 1.0 - tol)));

    let mut noncontextual = true;
    for meas in model.xi().keys() {
        let prs = finite_responses(model, meas)?;
        for pr in &prs[1..] {
            noncontextual &= rows_equal(prs[0], pr, labels, tol)?;
        }
        for (k, o) in frag.measurement(meas)?.outcomes().iter().enumerate() {
            for (other, k2) in frag.contexts_of(&o.effect, POVM_TOL) {
                for pr2 in finite_responses(model, &other)? {
                    for l in labels {
                        noncontextual &= (prs[0].prob(l, k)? - pr2.prob(l, k2)?).abs() <= tol;
                    }
                }
            }
        }
    }
    report.flag("outcome_deterministic", deterministic);
    report.flag("measurement_noncontextual", noncontextual);
    report.flag("ks_noncontextual", deterministic && noncontextual);

    let mut cosupports: IndexMap<String, Vec<IndexSet<String>>> = IndexMap::new();
    for meas in model.xi().keys() {
        let povm = frag.measurement(meas)?;
        let sets = povm.labels().map(|o| cosupport(model, meas, o, tol)).collect::<Result<Vec<_>>>()?;
        for (state, mus) in model.delta() {
            for (i, mu) in mus.iter().enumerate() {
                let w = mu.as_finite().expect("finite model");
                for (r, pr) in model.responses(meas)?.iter().enumerate() {
                    for (k, set) in sets.iter().enumerate() {
                        let integral = predicted_prob(mu, pr, k)?;
                        let mass: f64 = set.iter().map(|l| w.weight(l)).sum();
                        let id = format!("{meas}[{r}]/{}|{state}[{i}]", povm.outcomes()[k].label);
                        report.check(id, mass, integral);
                    }
                }
            }
        }
        cosupports.insert(meas.clone(), sets);
    }

    let revision = if report.verified { Some(revise(model, &cosupports, tol)?) } else { None };
    report.flag("revision", revision.is_some());
    if let Some(rev) = &revision {
        report.metric("revision_labels", rev.space().labels().len() as f64);
    }
    Ok(KsAnalysis { report, revision })
}

fn revise(model: &OntologicalModel, cosupports: &IndexMap<String, Vec<IndexSet<String>>>, tol: f64) -> Result<OntologicalModel> {
    let keep: IndexSet<String> = model
        .space()
        .labels()
        .iter()
        .filter(|l| cosupports.values().all(|sets| sets.iter().any(|s| s.contains(*l))))
        .cloned()
        .collect();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("revision would leave no ontic states".into()));
    }
    let mut delta = IndexMap::new();
    for (state, mus) in model.delta() {
        let mut out = Vec::new();
        for mu in mus {
            let w = mu.as_finite().expect("finite model");
            let dropped: f64 = w.iter().filter(|(l, _)| !keep.contains(*l)).map(|(_, x)| x).sum();
            if dropped > tol {
                return Err(Error::InvalidArgument(format!("revision drops mass {dropped} from `{state}`")));
            }
            let kept = w.retain_labels(|l| keep.contains(l));
            out.push(EpistemicState::from(FiniteDistribution::try_from(kept.as_map().clone())?));
        }
        delta.insert(state.clone(), out);
    }
    let mut xi = IndexMap::new();
    for (meas, prs) in model.xi() {
        let mut out = Vec::new();
        for pr in prs {
            let f = pr.as_finite().expect("finite model");
            let table = f.iter().filter(|(l, _)| keep.contains(*l)).map(|(l, row)| (l.to_string(), row.to_vec())).collect();
            out.push(FiniteResponse::new(f.outcomes().to_vec(), table)?.into());
        }
        xi.insert(meas.clone(), out);
    }
    OntologicalModel::new(OnticSpace::finite(keep)?, delta, xi, model.fragment().cloned())
}

/// Origin of a discretized label: `(label, lo, hi)` of its cell.
pub type CellOrigin = IndexMap<String, (String, f64, f64)>;

/// Finite model on the common refinement of every breakpoint of an
/// interval-augmented model. Each cell becomes one label `label#i`; its
/// weight is the measure of the cell and its response the outcome whose
/// interval contains it.
pub fn discretize(model: &OntologicalModel) -> Result<(OntologicalModel, CellOrigin)> {
    if model.space().is_finite() {
        return Err(Error::SpaceMismatch("model is already finite".into()));
    }
    let mut origin: CellOrigin = IndexMap::new();
    let mut cells_of: IndexMap<String, Vec<(String, f64, f64)>> = IndexMap::new();
    for label in model.space().labels() {
        let mut pts = vec![0.0, 1.0];
        for mu in model.delta().values().flatten() {
            for p in mu.as_structured().expect("structured model").pieces(label) {
                pts.extend([p.lo, p.hi]);
            }
        }
        for pr in model.xi().values().flatten() {
            if let Some(ivs) = pr.as_structured().and_then(|r| r.intervals(label)) {
                for iv in ivs {
                    pts.extend([iv.lo, iv.hi]);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let cells: Vec<_> = pts
            .windows(2)
            .enumerate()
            .map(|(i, w)| (format!("{label}#{i}"), w[0], w[1]))
            .collect();
        for (name, a, b) in &cells {
            origin.insert(name.clone(), (label.clone(), *a, *b));
        }
        cells_of.insert(label.clone(), cells);
    }

    let mut delta = IndexMap::new();
    for (state, mus) in model.delta() {
        let mut out = Vec::new();
        for mu in mus {
            let m = mu.as_structured().expect("structured model");
            let mut w = IndexMap::new();
            for label in m.labels() {
                for (name, a, b) in &cells_of[label] {
                    let x = m.density_at(label, 0.5 * (a + b)) * (b - a);
                    if x > 0.0 {
                        w.insert(name.clone(), x);
                    }
                }
            }
            out.push(EpistemicState::from(FiniteDistribution::try_from(w)?));
        }
        delta.insert(state.clone(), out);
    }
    let mut xi = IndexMap::new();
    for (meas, prs) in model.xi() {
        let mut out = Vec::new();
        for pr in prs {
            let r = pr.as_structured().expect("structured model");
            let mut assignment = Vec::new();
            for (label, cells) in &cells_of {
                for (name, a, b) in cells {
                    assignment.push((name.clone(), r.outcome_at(label, 0.5 * (a + b))?));
                }
            }
            out.push(FiniteResponse::deterministic(r.outcomes().to_vec(), assignment)?.into());
        }
        xi.insert(meas.clone(), out);
    }
    let space = OnticSpace::finite(origin.keys().cloned())?;
    Ok((OntologicalModel::new(space, delta, xi, model.fragment().cloned())?, origin))
}
