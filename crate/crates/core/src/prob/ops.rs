use indexmap::IndexMap;

use super::dist::{unified_labels, FiniteDistribution, StochasticKernel};
use crate::error::{unknown, Error, Result};

/// `D(mu, nu) = 1/2 sum |mu(l) - nu(l)|` over the union of supports.
pub fn variational_distance(mu: &FiniteDistribution, nu: &FiniteDistribution) -> f64 {
    let s: f64 = unified_labels([mu, nu]).into_iter().map(|l| (mu.weight(l) - nu.weight(l)).abs()).sum();
    (0.5 * s).clamp(0.0, 1.0)
}

/// `L({mu_j}) = sum_l min_j mu_j(l)`.
pub fn overlap(mus: &[FiniteDistribution]) -> Result<f64> {
    if mus.is_empty() {
        return Err(Error::InvalidArgument("overlap of an empty set".into()));
    }
    let s: f64 = unified_labels(mus)
        .into_iter()
        .map(|l| mus.iter().map(|m| m.weight(l)).fold(f64::INFINITY, f64::min).max(0.0))
        .sum();
    Ok(s.clamp(0.0, 1.0))
}

/// Overlap after zeroing weights at or below `zero`.
pub fn overlap_thresholded(mus: &[FiniteDistribution], zero: f64) -> Result<f64> {
    if mus.is_empty() {
        return Err(Error::InvalidArgument("overlap of an empty set".into()));
    }
    let s: f64 = unified_labels(mus)
        .into_iter()
        .map(|l| {
            mus.iter()
                .map(|m| {
                    let w = m.weight(l);
                    if w <= zero {
                        0.0
                    } else {
                        w
                    }
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(s.clamp(0.0, 1.0))
}

/// `p mu + (1 - p) nu`.
pub fn mix(p: f64, mu: &FiniteDistribution, nu: &FiniteDistribution) -> Result<FiniteDistribution> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("mixing weight {p} outside [0, 1]")));
    }
    if p == 1.0 {
        return Ok(mu.clone());
    }
    if p == 0.0 {
        return Ok(nu.clone());
    }
    let weights = unified_labels([mu, nu])
        .into_iter()
        .map(|l| (l.to_string(), p * mu.weight(l) + (1.0 - p) * nu.weight(l)))
        .collect::<IndexMap<_, _>>();
    Ok(FiniteDistribution::from_map_unchecked(weights))
}

/// Label for a tuple of component labels, `"(a,b,...)"`.
pub fn tuple_label<S: AsRef<str>>(parts: &[S]) -> String {
    let inner: Vec<&str> = parts.iter().map(AsRef::as_ref).collect();
    format!("({})", inner.join(","))
}

/// Independent product over Cartesian-product labels.
pub fn product_distribution(mus: &[FiniteDistribution]) -> Result<FiniteDistribution> {
    if mus.is_empty() {
        return Err(Error::InvalidArgument("product of an empty list".into()));
    }
    let mut acc: Vec<(Vec<&str>, f64)> = vec![(Vec::new(), 1.0)];
    for mu in mus {
        let mut next = Vec::with_capacity(acc.len() * mu.len());
        for (parts, w) in &acc {
            for (l, v) in mu.iter() {
                let mut p = parts.clone();
                p.push(l);
                next.push((p, w * v));
            }
        }
        acc = next;
    }
    Ok(FiniteDistribution::from_map_unchecked(acc.into_iter().map(|(p, w)| (tuple_label(&p), w)).collect()))
}

/// Pushforward `nu(t) = sum_s gamma_s(t) mu(s)`.
pub fn apply_stochastic(kernel: &StochasticKernel, mu: &FiniteDistribution) -> Result<FiniteDistribution> {
    let mut out: IndexMap<String, f64> = IndexMap::new();
    for (s, w) in mu.iter() {
        let Some(row) = kernel.row(s) else {
            if w > 0.0 {
                return Err(unknown("kernel row", s));
            }
            continue;
        };
        for (t, g) in row.iter() {
            *out.entry(t.to_string()).or_insert(0.0) += g * w;
        }
    }
    Ok(FiniteDistribution::from_map_unchecked(out))
}

/// Best success probability for guessing which of two equiprobable
/// preparations was made given the ontic state.
pub fn pair_guess_success(mu: &FiniteDistribution, nu: &FiniteDistribution) -> f64 {
    0.5 * (1.0 + variational_distance(mu, nu))
}

/// Minimal failure probability for excluding one of `n` equiprobable
/// preparations given the ontic state: `L / n`.
pub fn exclusion_failure(mus: &[FiniteDistribution]) -> Result<f64> {
    if mus.len() < 2 {
        return Err(Error::InvalidArgument(format!("exclusion needs at least 2 distributions, got {}", mus.len())));
    }
    Ok(overlap(mus)? / mus.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(pairs: &[(&str, f64)]) -> FiniteDistribution {
        FiniteDistribution::new(pairs.iter().map(|&(l, w)| (l, w))).unwrap()
    }

    #[test]
    fn distance_examples() {
        let u = FiniteDistribution::uniform(["a", "b"]).unwrap();
        assert_eq!(variational_distance(&u, &FiniteDistribution::point("a")), 0.5);
        assert_eq!(variational_distance(&u, &u), 0.0);
    }

    #[test]
    fn overlap_examples() {
        let m1 = d(&[("0", 0.5), ("1", 0.5), ("2", 0.0)]);
        let m2 = d(&[("0", 0.0), ("1", 0.5), ("2", 0.5)]);
        let m3 = d(&[("0", 0.5), ("1", 0.0), ("2", 0.5)]);
        assert_eq!(overlap(&[m1.clone(), m2.clone()]).unwrap(), 0.5);
        assert_eq!(overlap(&[m1.clone(), m2, m3]).unwrap(), 0.0);
        assert_eq!(overlap(std::slice::from_ref(&m1)).unwrap(), 1.0);
        assert!(overlap(&[]).is_err());
    }

    #[test]
    fn thresholded_overlap_ignores_dust() {
        let a = d(&[("x", 1.0 - 1e-16), ("y", 1e-16)]);
        let b = d(&[("y", 1.0)]);
        assert!(overlap(&[a.clone(), b.clone()]).unwrap() > 0.0);
        assert_eq!(overlap_thresholded(&[a, b], crate::ZERO_WEIGHT).unwrap(), 0.0);
    }

    #[test]
    fn mix_examples() {
        let a = FiniteDistribution::point("0");
        let b = FiniteDistribution::point("1");
        let m = mix(0.5, &a, &b).unwrap();
        assert_eq!(m, FiniteDistribution::uniform(["0", "1"]).unwrap());
        assert_eq!(mix(1.0, &a, &b).unwrap(), a);
        assert_eq!(mix(0.0, &a, &b).unwrap(), b);
        assert!(mix(1.5, &a, &b).is_err());
    }

    #[test]
    fn product_examples() {
        let u = FiniteDistribution::uniform(["0", "1"]).unwrap();
        let p = product_distribution(&[u.clone(), u.clone()]).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|(_, w)| w == 0.25));
        let q = product_distribution(&[FiniteDistribution::point("a"), u]).unwrap();
        assert_eq!(q.weight("(a,1)"), 0.5);
    }

    #[test]
    fn stochastic_examples() {
        let mu = d(&[("a", 0.3), ("b", 0.7)]);
        assert_eq!(apply_stochastic(&StochasticKernel::identity(["a", "b"]), &mu).unwrap(), mu);
        let kappa = d(&[("x", 0.2), ("y", 0.8)]);
        let constant = StochasticKernel::new([("a", kappa.clone()), ("b", kappa.clone())]);
        let out = apply_stochastic(&constant, &mu).unwrap();
        assert!(variational_distance(&out, &kappa) < 1e-15);
        let partial = StochasticKernel::new([("a", kappa)]);
        assert!(apply_stochastic(&partial, &mu).is_err());
    }

    #[test]
    fn game_values() {
        let a = FiniteDistribution::point("a");
        let b = FiniteDistribution::point("b");
        assert_eq!(pair_guess_success(&a, &b), 1.0);
        assert_eq!(pair_guess_success(&a, &a), 0.5);
        let u = FiniteDistribution::uniform(["a", "b"]).unwrap();
        assert_eq!(pair_guess_success(&u, &a), 0.75);
        assert_eq!(exclusion_failure(&[a.clone(), b]).unwrap(), 0.0);
        assert_eq!(exclusion_failure(&[a.clone(), a.clone(), a.clone()]).unwrap(), 1.0 / 3.0);
        assert!(exclusion_failure(std::slice::from_ref(&a)).is_err());
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(FiniteDistribution::new([("a", 0.5)]).is_err());
        assert!(FiniteDistribution::new([("a", 1.5), ("b", -0.5)]).is_err());
        assert!(serde_json::from_str::<FiniteDistribution>(r#"{"a":0.4}"#).is_err());
        let ok: FiniteDistribution = serde_json::from_str(r#"{"a":0.25,"b":0.75}"#).unwrap();
        assert_eq!(ok.weight("b"), 0.75);
    }
}
