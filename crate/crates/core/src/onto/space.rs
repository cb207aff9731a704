use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ontic state space. Finite spaces carry the power-set sigma-algebra;
/// interval-augmented spaces `labels x [0, 1]` use finite unions of
/// `label x subinterval`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawSpace")]
pub enum OnticSpace {
    Finite { labels: IndexSet<String> },
    IntervalAugmented { labels: IndexSet<String> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawSpace {
    Finite { labels: Vec<String> },
    IntervalAugmented { labels: Vec<String> },
}

impl TryFrom<RawSpace> for OnticSpace {
    type Error = Error;
    fn try_from(raw: RawSpace) -> Result<Self> {
        match raw {
            RawSpace::Finite { labels } => OnticSpace::finite(labels),
            RawSpace::IntervalAugmented { labels } => OnticSpace::interval_augmented(labels),
        }
    }
}

fn distinct(labels: Vec<String>) -> Result<IndexSet<String>> {
    let n = labels.len();
    let set: IndexSet<String> = labels.into_iter().collect();
    if set.len() != n {
        return Err(Error::InvalidArgument("ontic labels are not distinct".into()));
    }
    if set.is_empty() {
        return Err(Error::InvalidArgument("ontic space has no labels".into()));
    }
    Ok(set)
}

impl OnticSpace {
    pub fn finite<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Ok(OnticSpace::Finite { labels: distinct(labels.into_iter().map(Into::into).collect())? })
    }

    pub fn interval_augmented<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Ok(OnticSpace::IntervalAugmented { labels: distinct(labels.into_iter().map(Into::into).collect())? })
    }

    pub fn labels(&self) -> &IndexSet<String> {
        match self {
            OnticSpace::Finite { labels } | OnticSpace::IntervalAugmented { labels } => labels,
        }
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels().contains(label)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, OnticSpace::Finite { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            OnticSpace::Finite { .. } => "finite",
            OnticSpace::IntervalAugmented { .. } => "interval_augmented",
        }
    }
}
