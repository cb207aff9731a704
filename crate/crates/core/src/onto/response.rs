use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{unknown, Error, Result};

const ROW_TOL: f64 = 1e-12;
const NEG_TOL: f64 = 1e-15;

/// Outcome probabilities per finite ontic state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFinite")]
pub struct FiniteResponse {
    outcomes: Vec<String>,
    table: IndexMap<String, Vec<f64>>,
}

#[derive(Deserialize)]
struct RawFinite {
    outcomes: Vec<String>,
    table: IndexMap<String, Vec<f64>>,
}

impl TryFrom<RawFinite> for FiniteResponse {
    type Error = Error;
    fn try_from(raw: RawFinite) -> Result<Self> {
        FiniteResponse::new(raw.outcomes, raw.table)
    }
}

fn check_row(label: &str, row: &[f64], n: usize) -> Result<()> {
    if row.len() != n {
        return Err(Error::Dimension(format!("response row `{label}` has {} entries for {n} outcomes", row.len())));
    }
    if row.iter().any(|p| !p.is_finite() || *p < -NEG_TOL || *p > 1.0 + ROW_TOL) {
        return Err(Error::InvalidArgument(format!("response row `{label}` has an entry outside [0, 1]")));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > ROW_TOL {
        return Err(Error::InvalidArgument(format!("response row `{label}` sums to {s}")));
    }
    Ok(())
}

impl FiniteResponse {
    pub fn new<S: Into<String>>(outcomes: impl IntoIterator<Item = S>, table: IndexMap<String, Vec<f64>>) -> Result<Self> {
        let outcomes: Vec<String> = outcomes.into_iter().map(Into::into).collect();
        if outcomes.is_empty() {
            return Err(Error::InvalidArgument("response with no outcomes".into()));
        }
        for (label, row) in &table {
            check_row(label, row, outcomes.len())?;
        }
        Ok(FiniteResponse { outcomes, table })
    }

    /// Deterministic response: `label -> index of the outcome it yields`.
    pub fn deterministic<S: Into<String>, L: Into<String>>(
        outcomes: impl IntoIterator<Item = S>,
        assignment: impl IntoIterator<Item = (L, usize)>,
    ) -> Result<Self> {
        let outcomes: Vec<String> = outcomes.into_iter().map(Into::into).collect();
        let n = outcomes.len();
        let mut table = IndexMap::new();
        for (label, k) in assignment {
            if k >= n {
                return Err(Error::InvalidArgument(format!("outcome index {k} of {n}")));
            }
            let mut row = vec![0.0; n];
            row[k] = 1.0;
            table.insert(label.into(), row);
        }
        Self::new(outcomes, table)
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn row(&self, label: &str) -> Option<&[f64]> {
        self.table.get(label).map(Vec::as_slice)
    }

    pub fn prob(&self, label: &str, outcome: usize) -> Result<f64> {
        let row = self.row(label).ok_or_else(|| unknown("ontic state", label))?;
        row.get(outcome).copied().ok_or_else(|| Error::InvalidArgument(format!("outcome index {outcome}")))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.table.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Replaces one row, validating it.
    pub fn set_row(&mut self, label: &str, row: Vec<f64>) -> Result<()> {
        check_row(label, &row, self.outcomes.len())?;
        self.table.insert(label.to_string(), row);
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(outcomes: Vec<String>, table: IndexMap<String, Vec<f64>>) -> Self {
        FiniteResponse { outcomes, table }
    }
}

/// Indicator of `[lo, hi)` with nominal length `len`. The nominal length is
/// the exact probability the interval stands for; `hi - lo` may differ from
/// it by rounding in the cumulative breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, f64)", into = "(f64, f64, f64)")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub len: f64,
}

impl From<(f64, f64, f64)> for Interval {
    fn from((lo, hi, len): (f64, f64, f64)) -> Self {
        Interval { lo, hi, len }
    }
}

impl From<Interval> for (f64, f64, f64) {
    fn from(i: Interval) -> Self {
        (i.lo, i.hi, i.len)
    }
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < self.hi && (self.lo <= x && (x < self.hi || (x == 1.0 && self.hi == 1.0)))
    }
}

/// Deterministic response on `labels x [0, 1]`: for each label, outcome `k`
/// occurs when the interval coordinate falls in the `k`-th interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStructured")]
pub struct StructuredResponse {
    outcomes: Vec<String>,
    intervals: IndexMap<String, Vec<Interval>>,
}

#[derive(Deserialize)]
struct RawStructured {
    outcomes: Vec<String>,
    intervals: IndexMap<String, Vec<Interval>>,
}

impl TryFrom<RawStructured> for StructuredResponse {
    type Error = Error;
    fn try_from(raw: RawStructured) -> Result<Self> {
        StructuredResponse::new(raw.outcomes, raw.intervals)
    }
}

impl StructuredResponse {
    pub fn new<S: Into<String>>(outcomes: impl IntoIterator<Item = S>, intervals: IndexMap<String, Vec<Interval>>) -> Result<Self> {
        let outcomes: Vec<String> = outcomes.into_iter().map(Into::into).collect();
        if outcomes.is_empty() {
            return Err(Error::InvalidArgument("response with no outcomes".into()));
        }
        for (label, ivs) in &intervals {
            if ivs.len() != outcomes.len() {
                return Err(Error::Dimension(format!("`{label}` has {} intervals for {} outcomes", ivs.len(), outcomes.len())));
            }
            let mut sorted: Vec<&Interval> = ivs.iter().collect();
            sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
            let mut at = 0.0;
            for iv in &sorted {
                let ok = iv.lo == at && iv.hi >= iv.lo && iv.len >= 0.0 && (iv.len - (iv.hi - iv.lo)).abs() <= ROW_TOL;
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "intervals on `{label}` do not tile [0, 1] at [{}, {})",
                        iv.lo, iv.hi
                    )));
                }
                at = iv.hi;
            }
            if at != 1.0 {
                return Err(Error::InvalidArgument(format!("intervals on `{label}` end at {at}")));
            }
            let total: f64 = ivs.iter().map(|i| i.len).sum();
            if (total - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidArgument(format!("interval lengths on `{label}` sum to {total}")));
            }
        }
        Ok(StructuredResponse { outcomes, intervals })
    }

    /// Lays out intervals with nominal `lengths[k]` in the order given by
    /// `order`, the last one closing at 1.
    pub fn tile(lengths: &[f64], order: &[usize]) -> Vec<Interval> {
        let mut out = vec![Interval { lo: 0.0, hi: 0.0, len: 0.0 }; lengths.len()];
        let mut at = 0.0;
        for (pos, &k) in order.iter().enumerate() {
            let hi = if pos + 1 == order.len() { 1.0 } else { (at + lengths[k]).min(1.0) };
            out[k] = Interval { lo: at, hi, len: lengths[k] };
            at = hi;
        }
        out
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn intervals(&self, label: &str) -> Option<&[Interval]> {
        self.intervals.get(label).map(Vec::as_slice)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.intervals.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Interval])> {
        self.intervals.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Outcome index at `(label, x)`.
    pub fn outcome_at(&self, label: &str, x: f64) -> Result<usize> {
        let ivs = self.intervals(label).ok_or_else(|| unknown("ontic state", label))?;
        ivs.iter()
            .position(|iv| iv.contains(x))
            .ok_or_else(|| Error::InvalidArgument(format!("coordinate {x} outside [0, 1]")))
    }
}

/// A conditional distribution `Pr(E|M, lambda)` in `Xi_M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseFunction {
    Finite(FiniteResponse),
    Structured(StructuredResponse),
}

impl From<FiniteResponse> for ResponseFunction {
    fn from(r: FiniteResponse) -> Self {
        ResponseFunction::Finite(r)
    }
}

impl From<StructuredResponse> for ResponseFunction {
    fn from(r: StructuredResponse) -> Self {
        ResponseFunction::Structured(r)
    }
}

impl ResponseFunction {
    pub fn outcomes(&self) -> &[String] {
        match self {
            ResponseFunction::Finite(r) => r.outcomes(),
            ResponseFunction::Structured(r) => r.outcomes(),
        }
    }

    pub fn outcome_index(&self, outcome: &str) -> Result<usize> {
        self.outcomes().iter().position(|o| o == outcome).ok_or_else(|| unknown("outcome", outcome))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ResponseFunction::Finite(_) => "finite",
            ResponseFunction::Structured(_) => "structured",
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteResponse> {
        match self {
            ResponseFunction::Finite(r) => Some(r),
            ResponseFunction::Structured(_) => None,
        }
    }

    pub fn as_structured(&self) -> Option<&StructuredResponse> {
        match self {
            ResponseFunction::Structured(r) => Some(r),
            ResponseFunction::Finite(_) => None,
        }
    }

    pub(crate) fn covers(&self, label: &str) -> bool {
        match self {
            ResponseFunction::Finite(r) => r.row(label).is_some(),
            ResponseFunction::Structured(r) => r.intervals(label).is_some(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_lookup_is_half_open() {
        let ivs = StructuredResponse::tile(&[0.25, 0.5, 0.25], &[0, 1, 2]);
        let mut m = IndexMap::new();
        m.insert("psi".to_string(), ivs);
        let r = StructuredResponse::new(["a", "b", "c"], m).unwrap();
        assert_eq!(r.outcome_at("psi", 0.3).unwrap(), 1);
        assert_eq!(r.outcome_at("psi", 0.25).unwrap(), 1);
        assert_eq!(r.outcome_at("psi", 0.0).unwrap(), 0);
        assert_eq!(r.outcome_at("psi", 1.0).unwrap(), 2);
    }

    #[test]
    fn permuted_tiling() {
        let ivs = StructuredResponse::tile(&[0.25, 0.75], &[1, 0]);
        assert_eq!(ivs[1], Interval { lo: 0.0, hi: 0.75, len: 0.75 });
        assert_eq!(ivs[0], Interval { lo: 0.75, hi: 1.0, len: 0.25 });
    }

    #[test]
    fn finite_rows_validated() {
        let mut t = IndexMap::new();
        t.insert("l".to_string(), vec![0.5, 0.4]);
        assert!(FiniteResponse::new(["a", "b"], t).is_err());
        let mut r = FiniteResponse::deterministic(["a", "b"], [("l", 0)]).unwrap();
        assert_eq!(r.prob("l", 0).unwrap(), 1.0);
        assert!(r.set_row("l", vec![1.0]).is_err());
        r.set_row("l", vec![0.0, 1.0]).unwrap();
        assert_eq!(r.prob("l", 1).unwrap(), 1.0);
        let json = serde_json::to_string(&ResponseFunction::from(r)).unwrap();
        assert!(json.starts_with(r#"{"kind":"finite","outcomes":["a","b"]"#));
        let back: ResponseFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back.outcomes(), ["a", "b"]);
    }
}
