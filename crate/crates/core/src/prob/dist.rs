use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;
const NEG_TOL: f64 = 1e-15;

/// Probability weights over a finite, ordered label set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IndexMap<String, f64>", into = "IndexMap<String, f64>")]
pub struct FiniteDistribution {
    weights: IndexMap<String, f64>,
}

impl FiniteDistribution {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let mut weights = IndexMap::new();
        for (label, w) in pairs {
            let label = label.into();
            if weights.insert(label.clone(), w).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate label `{label}`")));
            }
        }
        Self::try_from(weights)
    }

    pub fn point(label: impl Into<String>) -> Self {
        let mut weights = IndexMap::new();
        weights.insert(label.into(), 1.0);
        FiniteDistribution { weights }
    }

    pub fn uniform<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let w = 1.0 / labels.len() as f64;
        Self::new(labels.into_iter().map(|l| (l, w)))
    }

    /// Weight of `label`; zero if absent.
    pub fn weight(&self, label: &str) -> f64 {
        self.weights.get(label).copied().unwrap_or(0.0)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.weights.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Labels carrying weight above `zero`.
    pub fn support(&self, zero: f64) -> Vec<&str> {
        self.iter().filter(|(_, w)| *w > zero).map(|(l, _)| l).collect()
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    /// Renames every label.
    pub fn relabel(&self, mut f: impl FnMut(&str) -> String) -> Self {
        FiniteDistribution { weights: self.weights.iter().map(|(k, &v)| (f(k), v)).collect() }
    }

    /// Drops labels not accepted by `keep`; the result may be sub-normalized
    /// only if `keep` removes positive weight, which callers must rule out.
    pub(crate) fn retain_labels(&self, mut keep: impl FnMut(&str) -> bool) -> Self {
        FiniteDistribution { weights: self.weights.iter().filter(|(k, _)| keep(k)).map(|(k, &v)| (k.clone(), v)).collect() }
    }

    pub(crate) fn from_map_unchecked(weights: IndexMap<String, f64>) -> Self {
        FiniteDistribution { weights }
    }

    pub(crate) fn as_map(&self) -> &IndexMap<String, f64> {
        &self.weights
    }
}

impl TryFrom<IndexMap<String, f64>> for FiniteDistribution {
    type Error = Error;
    fn try_from(weights: IndexMap<String, f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("distribution has no labels".into()));
        }
        for (label, &w) in &weights {
            if !w.is_finite() || w < -NEG_TOL {
                return Err(Error::InvalidArgument(format!("weight {w} on `{label}`")));
            }
        }
        let total: f64 = weights.values().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(FiniteDistribution { weights })
    }
}

impl From<FiniteDistribution> for IndexMap<String, f64> {
    fn from(d: FiniteDistribution) -> Self {
        d.weights
    }
}

/// Union of the label sets, first-seen order.
pub fn unified_labels<'a>(mus: impl IntoIterator<Item = &'a FiniteDistribution>) -> Vec<&'a str> {
    let mut seen = indexmap::IndexSet::new();
    for mu in mus {
        for l in mu.labels() {
            seen.insert(l);
        }
    }
    seen.into_iter().collect()
}

/// Joint distribution of two labelled random variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    weights: IndexMap<String, IndexMap<String, f64>>,
}

impl JointDistribution {
    pub fn new<S: Into<String>, T: Into<String>>(entries: impl IntoIterator<Item = (S, T, f64)>) -> Result<Self> {
        let mut weights: IndexMap<String, IndexMap<String, f64>> = IndexMap::new();
        let mut total = 0.0;
        for (x, y, w) in entries {
            if !w.is_finite() || w < -NEG_TOL {
                return Err(Error::InvalidArgument(format!("joint weight {w}")));
            }
            total += w;
            *weights.entry(x.into()).or_default().entry(y.into()).or_insert(0.0) += w;
        }
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidArgument(format!("joint weights sum to {total}")));
        }
        Ok(JointDistribution { weights })
    }

    pub fn marginal_x(&self) -> FiniteDistribution {
        FiniteDistribution::from_map_unchecked(self.weights.iter().map(|(x, row)| (x.clone(), row.values().sum())).collect())
    }

    pub fn marginal_y(&self) -> FiniteDistribution {
        let mut out: IndexMap<String, f64> = IndexMap::new();
        for row in self.weights.values() {
            for (y, &w) in row {
                *out.entry(y.clone()).or_insert(0.0) += w;
            }
        }
        FiniteDistribution::from_map_unchecked(out)
    }

    /// `P(X != Y)`, comparing labels as strings.
    pub fn prob_unequal(&self) -> f64 {
        self.weights.iter().flat_map(|(x, row)| row.iter().filter(move |(y, _)| *y != x).map(|(_, &w)| w)).sum()
    }
}

/// Markov kernel: one distribution over targets per source label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StochasticKernel {
    rows: IndexMap<String, FiniteDistribution>,
}

impl StochasticKernel {
    pub fn new<S: Into<String>>(rows: impl IntoIterator<Item = (S, FiniteDistribution)>) -> Self {
        StochasticKernel { rows: rows.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }

    pub fn identity<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self::new(labels.into_iter().map(|l| {
            let l: String = l.into();
            (l.clone(), FiniteDistribution::point(l))
        }))
    }

    pub fn row(&self, source: &str) -> Option<&FiniteDistribution> {
        self.rows.get(source)
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }
}
