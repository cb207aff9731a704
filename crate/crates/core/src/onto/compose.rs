use indexmap::IndexMap;

use super::measure::{direct_sum, EpistemicState};
use super::model::{predicted_prob, OntologicalModel};
use super::response::{FiniteResponse, ResponseFunction, StructuredResponse};
use super::space::OnticSpace;
use crate::error::{unknown, Error, Result};
use crate::prob::{product_distribution, tuple_label, FiniteDistribution};
use crate::quantum::{born_rule, conditional_state, ComplexMatrix, PMFragment, Povm};
use crate::report::Report;
use crate::ARITH_TOL;

/// Splits `"(a,b,...)"` at top-level commas. `None` if the label is not a
/// parenthesised tuple.
pub fn split_tuple_label(label: &str) -> Option<Vec<&str>> {
    let inner = label.strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return None;
        }
    }
    if depth != 0 {
        return None;
    }
    parts.push(&inner[start..]);
    Some(parts)
}

/// Fragment on `C^dA (x) C^dB` with every product state `(x,y)` and every
/// product measurement `(M,N)`, outcomes `(a,b)` in row-major order.
pub fn product_fragment(a: &PMFragment, b: &PMFragment) -> Result<PMFragment> {
    let mut f = PMFragment::new(a.dim * b.dim);
    for (x, rx) in &a.states {
        for (y, ry) in &b.states {
            f = f.with_state(tuple_label(&[x, y]), rx.kron(ry));
        }
    }
    for (m, pm) in &a.measurements {
        for (n, pn) in &b.measurements {
            let mut outcomes = Vec::new();
            for oa in pm.outcomes() {
                for ob in pn.outcomes() {
                    outcomes.push((tuple_label(&[&oa.label, &ob.label]), oa.effect.kron(&ob.effect)));
                }
            }
            f = f.with_measurement(tuple_label(&[m, n]), Povm::new(outcomes)?);
        }
    }
    Ok(f)
}

fn require_finite(m: &OntologicalModel, what: &str) -> Result<()> {
    if m.space().is_finite() {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!("{what} must have a finite ontic space")))
    }
}

fn product_rows(a: &FiniteResponse, b: &FiniteResponse, la: &str, lb: &str) -> Result<Vec<f64>> {
    let (ra, rb) = (
        a.row(la).ok_or_else(|| unknown("ontic state", la))?,
        b.row(lb).ok_or_else(|| unknown("ontic state", lb))?,
    );
    Ok(ra.iter().flat_map(|p| rb.iter().map(move |q| p * q)).collect())
}

/// Direct-product model: `Lambda_A x Lambda_B`, product measures and
/// factorised responses. The fragment is the product fragment when both
/// factors carry one.
pub fn direct_product_model(a: &OntologicalModel, b: &OntologicalModel) -> Result<OntologicalModel> {
    require_finite(a, "first factor")?;
    require_finite(b, "second factor")?;
    let la = a.space().labels();
    let lb = b.space().labels();
    let labels: Vec<String> = la.iter().flat_map(|x| lb.iter().map(move |y| tuple_label(&[x, y]))).collect();

    let mut delta = IndexMap::new();
    for (x, mus) in a.delta() {
        for (y, nus) in b.delta() {
            let mut set = Vec::new();
            for mu in mus {
                for nu in nus {
                    let p = product_distribution(&[
                        mu.as_finite().expect("finite").clone(),
                        nu.as_finite().expect("finite").clone(),
                    ])?;
                    set.push(EpistemicState::from(p));
                }
            }
            delta.insert(tuple_label(&[x, y]), set);
        }
    }

    let mut xi = IndexMap::new();
    for (m, prs) in a.xi() {
        for (n, qrs) in b.xi() {
            let mut set = Vec::new();
            for pr in prs {
                for qr in qrs {
                    let (pa, pb) = (pr.as_finite().expect("finite"), qr.as_finite().expect("finite"));
                    let outcomes: Vec<String> =
                        pa.outcomes().iter().flat_map(|o| pb.outcomes().iter().map(move |q| tuple_label(&[o, q]))).collect();
                    let mut table = IndexMap::new();
                    for x in la {
                        for y in lb {
                            table.insert(tuple_label(&[x, y]), product_rows(pa, pb, x, y)?);
                        }
                    }
                    set.push(ResponseFunction::from(FiniteResponse::from_parts_unchecked(outcomes, table)));
                }
            }
            xi.insert(tuple_label(&[m, n]), set);
        }
    }

    let fragment = match (a.fragment(), b.fragment()) {
        (Some(fa), Some(fb)) => Some(product_fragment(fa, fb)?),
        _ => None,
    };
    OntologicalModel::new(OnticSpace::finite(labels)?, delta, xi, fragment)
}

fn sum_response(pa: &ResponseFunction, pb: &ResponseFunction) -> Result<ResponseFunction> {
    if pa.outcomes() != pb.outcomes() {
        return Err(Error::InvalidArgument("mixed models disagree on outcomes".into()));
    }
    match (pa, pb) {
        (ResponseFunction::Finite(x), ResponseFunction::Finite(y)) => {
            let mut table = IndexMap::new();
            for (l, row) in x.iter() {
                table.insert(format!("1:{l}"), row.to_vec());
            }
            for (l, row) in y.iter() {
                table.insert(format!("2:{l}"), row.to_vec());
            }
            Ok(FiniteResponse::new(x.outcomes().to_vec(), table)?.into())
        }
        (ResponseFunction::Structured(x), ResponseFunction::Structured(y)) => {
            let mut ivs = IndexMap::new();
            for (l, iv) in x.iter() {
                ivs.insert(format!("1:{l}"), iv.to_vec());
            }
            for (l, iv) in y.iter() {
                ivs.insert(format!("2:{l}"), iv.to_vec());
            }
            Ok(StructuredResponse::new(x.outcomes().to_vec(), ivs)?.into())
        }
        _ => Err(Error::SpaceMismatch("finite and structured responses mixed".into())),
    }
}

/// `p A + (1 - p) B` on the direct sum of the ontic spaces (labels prefixed
/// `1:` and `2:`). `Delta` holds every `p mu_1 + (1 - p) mu_2`; `Xi` every
/// pair of responses.
pub fn mix_models(p: f64, a: &OntologicalModel, b: &OntologicalModel) -> Result<OntologicalModel> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("mixing weight {p} outside (0, 1)")));
    }
    if a.space().is_finite() != b.space().is_finite() {
        return Err(Error::SpaceMismatch("cannot mix finite and interval-augmented models".into()));
    }
    if a.fragment() != b.fragment() {
        return Err(Error::InvalidArgument("mixed models must share one fragment".into()));
    }
    let labels: Vec<String> = a
        .space()
        .labels()
        .iter()
        .map(|l| format!("1:{l}"))
        .chain(b.space().labels().iter().map(|l| format!("2:{l}")))
        .collect();
    let space = if a.space().is_finite() { OnticSpace::finite(labels)? } else { OnticSpace::interval_augmented(labels)? };

    let mut delta = IndexMap::new();
    for (state, mus) in a.delta() {
        let nus = b.measures(state)?;
        let mut set = Vec::new();
        for mu in mus {
            for nu in nus {
                set.push(direct_sum(p, mu, nu)?);
            }
        }
        delta.insert(state.clone(), set);
    }
    if let Some(s) = b.delta().keys().find(|s| !a.delta().contains_key(*s)) {
        return Err(unknown("state", s.clone()));
    }
    let mut xi = IndexMap::new();
    for (meas, prs) in a.xi() {
        let qrs = b.responses(meas)?;
        let mut set = Vec::new();
        for pr in prs {
            for qr in qrs {
                set.push(sum_response(pr, qr)?);
            }
        }
        xi.insert(meas.clone(), set);
    }
    if let Some(m) = b.xi().keys().find(|m| !a.xi().contains_key(*m)) {
        return Err(unknown("measurement", m.clone()));
    }
    OntologicalModel::new(space, delta, xi, a.fragment().cloned())
}

/// Composite for a fragment of product states: ontic space
/// `Lambda_A x Lambda_B x Lambda_NL`. A measurement named `(M,N)` with `M`
/// in A and `N` in B uses the product of the local responses and ignores the
/// third coordinate; every other measurement uses the `nl` responses on the
/// third coordinate only. States must be named `(x,y)` with `x` in A and `y`
/// in B.
pub fn wpip_composite(a: &OntologicalModel, b: &OntologicalModel, nl: &OntologicalModel) -> Result<OntologicalModel> {
    require_finite(a, "first local model")?;
    require_finite(b, "second local model")?;
    require_finite(nl, "nonlocal model")?;
    let frag = nl.require_fragment()?;
    let (la, lb, ln) = (a.space().labels(), b.space().labels(), nl.space().labels());
    let mut labels = Vec::with_capacity(la.len() * lb.len() * ln.len());
    for x in la {
        for y in lb {
            for z in ln {
                labels.push(tuple_label(&[x, y, z]));
            }
        }
    }

    let mut delta = IndexMap::new();
    for (state, nus) in nl.delta() {
        let parts = split_tuple_label(state)
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::InvalidArgument(format!("state `{state}` is not a product `(x,y)`")))?;
        let mut set = Vec::new();
        for mu_a in a.measures(parts[0])? {
            for mu_b in b.measures(parts[1])? {
                for nu in nus {
                    let p = product_distribution(&[
                        mu_a.as_finite().expect("finite").clone(),
                        mu_b.as_finite().expect("finite").clone(),
                        nu.as_finite().expect("finite").clone(),
                    ])?;
                    set.push(EpistemicState::from(p));
                }
            }
        }
        delta.insert(state.clone(), set);
    }

    let mut xi = IndexMap::new();
    for (meas, nrs) in nl.xi() {
        let outcomes = nrs[0].outcomes().to_vec();
        let local = split_tuple_label(meas)
            .filter(|p| p.len() == 2 && a.xi().contains_key(p[0]) && b.xi().contains_key(p[1]));
        let mut set = Vec::new();
        if let Some(parts) = local {
            // outcome (a,b) -> (index in A, index in B)
            let (oa, ob) = (a.responses(parts[0])?[0].outcomes(), b.responses(parts[1])?[0].outcomes());
            let idx = outcomes
                .iter()
                .map(|o| {
                    let p = split_tuple_label(o).filter(|p| p.len() == 2);
                    p.and_then(|p| Some((oa.iter().position(|x| x == p[0])?, ob.iter().position(|x| x == p[1])?)))
                        .ok_or_else(|| Error::InvalidArgument(format!("outcome `{o}` of `{meas}` is not a local pair")))
                })
                .collect::<Result<Vec<_>>>()?;
            for pr in a.responses(parts[0])? {
                for qr in b.responses(parts[1])? {
                    let (pa, pb) = (pr.as_finite().expect("finite"), qr.as_finite().expect("finite"));
                    let mut table = IndexMap::with_capacity(labels.len());
                    for x in la {
                        let ra = pa.row(x).expect("validated");
                        for y in lb {
                            let rb = pb.row(y).expect("validated");
                            let row: Vec<f64> = idx.iter().map(|&(i, j)| ra[i] * rb[j]).collect();
                            for z in ln {
                                table.insert(tuple_label(&[x, y, z]), row.clone());
                            }
                        }
                    }
                    set.push(ResponseFunction::from(FiniteResponse::from_parts_unchecked(outcomes.clone(), table)));
                }
            }
        } else {
            for nr in nrs {
                let pn = nr.as_finite().expect("finite");
                let mut table = IndexMap::with_capacity(labels.len());
                for x in la {
                    for y in lb {
                        for z in ln {
                            table.insert(tuple_label(&[x, y, z]), pn.row(z).expect("validated").to_vec());
                        }
                    }
                }
                set.push(ResponseFunction::from(FiniteResponse::from_parts_unchecked(outcomes.clone(), table)));
            }
        }
        xi.insert(meas.clone(), set);
    }
    OntologicalModel::new(OnticSpace::finite(labels)?, delta, xi, Some(frag.clone()))
}

fn first_component(label: &str) -> Result<&str> {
    split_tuple_label(label)
        .filter(|p| p.len() == 2)
        .map(|p| p[0])
        .ok_or_else(|| Error::InvalidArgument(format!("`{label}` is not a pair label")))
}

fn second_component(label: &str) -> Result<&str> {
    split_tuple_label(label)
        .filter(|p| p.len() == 2)
        .map(|p| p[1])
        .ok_or_else(|| Error::InvalidArgument(format!("`{label}` is not a pair label")))
}

/// Conditional measure `mu_{M_A,E}(lambda) = Pr_A(E|M_A, lambda_A) mu(lambda) / Pr(E|M_A)`
/// for a measure on pair labels `(lambda_A, lambda_B)`, together with
/// `Pr(E|M_A)`.
pub fn condition_bell_local_model(
    model_a: &OntologicalModel,
    mu: &FiniteDistribution,
    measurement_a: &str,
    response: usize,
    outcome: &str,
) -> Result<(FiniteDistribution, f64)> {
    require_finite(model_a, "local model")?;
    let pr = model_a
        .responses(measurement_a)?
        .get(response)
        .ok_or_else(|| Error::InvalidArgument(format!("response index {response}")))?;
    let k = pr.outcome_index(outcome)?;
    let pr = pr.as_finite().expect("finite");
    let mut w = IndexMap::new();
    let mut total = 0.0;
    for (l, x) in mu.iter() {
        let v = pr.prob(first_component(l)?, k)? * x;
        total += v;
        w.insert(l.to_string(), v);
    }
    if total <= ARITH_TOL {
        return Err(Error::ZeroProbability(total));
    }
    for v in w.values_mut() {
        *v /= total;
    }
    Ok((FiniteDistribution::try_from(w)?, total))
}

/// Checks on the conditional family of `mu` for every outcome of
/// `measurement_a`: the mixture identity `mu = sum_j Pr(E_j) mu_{M_A,E_j}`
/// and, given the joint quantum state, that `Pr(E_j)` and the B-side
/// predictions of each `mu_{M_A,E_j}` match `Tr((E_j (x) I) rho_AB)` and the
/// conditional state.
pub fn check_bell_local_conditioning(
    model_a: &OntologicalModel,
    model_b: &OntologicalModel,
    mu: &FiniteDistribution,
    measurement_a: &str,
    rho_ab: Option<&ComplexMatrix>,
    tol: f64,
) -> Result<Report> {
    let mut report = Report::new("bell_local_conditioning", tol);
    let pr = &model_a.responses(measurement_a)?[0];
    let mut mixture: IndexMap<String, f64> = IndexMap::new();
    for outcome in pr.outcomes() {
        let (cond, p) = match condition_bell_local_model(model_a, mu, measurement_a, 0, outcome) {
            Ok(x) => x,
            Err(Error::ZeroProbability(_)) => {
                report.note(format!("outcome `{outcome}` has probability zero"));
                continue;
            }
            Err(e) => return Err(e),
        };
        for (l, x) in cond.iter() {
            *mixture.entry(l.to_string()).or_insert(0.0) += p * x;
        }
        let (Some(rho), Some(fa), Some(fb)) = (rho_ab, model_a.fragment(), model_b.fragment()) else {
            continue;
        };
        let effect = fa
            .measurement(measurement_a)?
            .effect(outcome)
            .ok_or_else(|| unknown("outcome", outcome.clone()))?;
        let (rho_b, q) = conditional_state(rho, effect, (fa.dim, fb.dim))?;
        report.check(format!("{measurement_a}/{outcome}/prob"), q, p);
        let marginal = {
            let mut m: IndexMap<String, f64> = IndexMap::new();
            for (l, x) in cond.iter() {
                *m.entry(second_component(l)?.to_string()).or_insert(0.0) += x;
            }
            EpistemicState::from(FiniteDistribution::try_from(m)?)
        };
        for (n, qrs) in model_b.xi() {
            for (k, o) in fb.measurement(n)?.outcomes().iter().enumerate() {
                let expected = born_rule(&rho_b, &o.effect)?;
                for (r, qr) in qrs.iter().enumerate() {
                    let predicted = predicted_prob(&marginal, qr, k)?;
                    report.check(format!("{measurement_a}/{outcome}/{n}[{r}]/{}", o.label), expected, predicted);
                }
            }
        }
    }
    for (l, x) in mu.iter() {
        report.check(format!("mixture/{l}"), x, mixture.get(l).copied().unwrap_or(0.0));
    }
    Ok(report)
}
