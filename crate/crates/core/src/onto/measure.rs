use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactDot;
use crate::prob::{self, FiniteDistribution};

const MASS_TOL: f64 = 1e-12;

/// Constant density on `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, f64)", into = "(f64, f64, f64)")]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

impl From<(f64, f64, f64)> for Piece {
    fn from((lo, hi, density): (f64, f64, f64)) -> Self {
        Piece { lo, hi, density }
    }
}

impl From<Piece> for (f64, f64, f64) {
    fn from(p: Piece) -> Self {
        (p.lo, p.hi, p.density)
    }
}

impl Piece {
    pub fn new(lo: f64, hi: f64, density: f64) -> Self {
        Piece { lo, hi, density }
    }
}

/// Probability measure on `labels x [0, 1]` with a piecewise-constant
/// density per label. Labels that are absent carry no mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IndexMap<String, Vec<Piece>>", into = "IndexMap<String, Vec<Piece>>")]
pub struct StructuredMeasure {
    pieces: IndexMap<String, Vec<Piece>>,
}

impl TryFrom<IndexMap<String, Vec<Piece>>> for StructuredMeasure {
    type Error = Error;
    fn try_from(pieces: IndexMap<String, Vec<Piece>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidArgument("structured measure has no labels".into()));
        }
        for (label, ps) in &pieces {
            let mut prev_hi = 0.0;
            for p in ps {
                let ok = p.lo.is_finite()
                    && p.hi.is_finite()
                    && p.density.is_finite()
                    && p.lo >= prev_hi
                    && p.lo < p.hi
                    && p.hi <= 1.0
                    && p.density >= 0.0;
                if !ok {
                    return Err(Error::InvalidArgument(format!(
                        "bad piece [{}, {}) density {} on `{label}`",
                        p.lo, p.hi, p.density
                    )));
                }
                prev_hi = p.hi;
            }
        }
        let m = StructuredMeasure { pieces };
        let mass = m.mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidArgument(format!("structured measure has mass {mass}")));
        }
        Ok(m)
    }
}

impl From<StructuredMeasure> for IndexMap<String, Vec<Piece>> {
    fn from(m: StructuredMeasure) -> Self {
        m.pieces
    }
}

impl StructuredMeasure {
    pub fn new<S: Into<String>>(pieces: impl IntoIterator<Item = (S, Vec<Piece>)>) -> Result<Self> {
        Self::try_from(pieces.into_iter().map(|(k, v)| (k.into(), v)).collect::<IndexMap<_, _>>())
    }

    /// `delta_label x uniform[0, 1]`.
    pub fn uniform_on(label: impl Into<String>) -> Self {
        let mut pieces = IndexMap::new();
        pieces.insert(label.into(), vec![Piece::new(0.0, 1.0, 1.0)]);
        StructuredMeasure { pieces }
    }

    pub fn pieces(&self, label: &str) -> &[Piece] {
        self.pieces.get(label).map_or(&[], Vec::as_slice)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.pieces.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Piece])> {
        self.pieces.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Total mass, correctly rounded.
    pub fn mass(&self) -> f64 {
        let mut acc = ExactDot::new();
        for p in self.pieces.values().flatten() {
            acc.add(p.density, p.hi);
            acc.add(-p.density, p.lo);
        }
        acc.value()
    }

    pub fn density_at(&self, label: &str, x: f64) -> f64 {
        self.pieces(label).iter().find(|p| p.lo <= x && x < p.hi).map_or(0.0, |p| p.density)
    }

    pub(crate) fn map(&self, mut f: impl FnMut(&str, &[Piece]) -> (String, Vec<Piece>)) -> Self {
        StructuredMeasure { pieces: self.pieces.iter().map(|(k, v)| f(k, v)).collect() }
    }
}

/// A probability measure in `Delta_rho`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpistemicState {
    Finite { weights: FiniteDistribution },
    Structured { pieces: StructuredMeasure },
}

impl From<FiniteDistribution> for EpistemicState {
    fn from(weights: FiniteDistribution) -> Self {
        EpistemicState::Finite { weights }
    }
}

impl From<StructuredMeasure> for EpistemicState {
    fn from(pieces: StructuredMeasure) -> Self {
        EpistemicState::Structured { pieces }
    }
}

impl EpistemicState {
    pub fn kind(&self) -> &'static str {
        match self {
            EpistemicState::Finite { .. } => "finite",
            EpistemicState::Structured { .. } => "structured",
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteDistribution> {
        match self {
            EpistemicState::Finite { weights } => Some(weights),
            EpistemicState::Structured { .. } => None,
        }
    }

    pub fn as_structured(&self) -> Option<&StructuredMeasure> {
        match self {
            EpistemicState::Structured { pieces } => Some(pieces),
            EpistemicState::Finite { .. } => None,
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        match self {
            EpistemicState::Finite { weights } => weights.labels().collect(),
            EpistemicState::Structured { pieces } => pieces.labels().collect(),
        }
    }

    /// Region where the measure has density (or weight) above `zero`.
    pub fn support(&self, zero: f64) -> Region {
        match self {
            EpistemicState::Finite { weights } => {
                Region::Labels(weights.support(zero).into_iter().map(String::from).collect())
            }
            EpistemicState::Structured { pieces } => {
                let mut segs: IndexMap<String, Vec<(f64, f64)>> = IndexMap::new();
                for (label, ps) in pieces.iter() {
                    for p in ps.iter().filter(|p| p.density > zero) {
                        segs.entry(label.to_string()).or_default().push((p.lo, p.hi));
                    }
                }
                Region::Segments(segs)
            }
        }
    }
}

/// Measurable subset of an ontic space.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Labels(IndexSet<String>),
    /// Disjoint, sorted half-open segments per label.
    Segments(IndexMap<String, Vec<(f64, f64)>>),
}

fn same_kind<'a>(mus: &[&'a EpistemicState]) -> Result<Kind<'a>> {
    if mus.is_empty() {
        return Err(Error::InvalidArgument("empty set of measures".into()));
    }
    if let Some(f) = mus.iter().map(|m| m.as_finite()).collect::<Option<Vec<_>>>() {
        return Ok(Kind::Finite(f));
    }
    if let Some(s) = mus.iter().map(|m| m.as_structured()).collect::<Option<Vec<_>>>() {
        return Ok(Kind::Structured(s));
    }
    Err(Error::SpaceMismatch("finite and structured measures mixed".into()))
}

enum Kind<'a> {
    Finite(Vec<&'a FiniteDistribution>),
    Structured(Vec<&'a StructuredMeasure>),
}

/// Cells of the common refinement of all breakpoints on one label.
fn cells(label: &str, mus: &[&StructuredMeasure]) -> Vec<(f64, f64)> {
    let mut pts = vec![0.0, 1.0];
    for m in mus {
        for p in m.pieces(label) {
            pts.push(p.lo);
            pts.push(p.hi);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn structured_labels<'a>(mus: &[&'a StructuredMeasure]) -> IndexSet<&'a str> {
    mus.iter().flat_map(|m| m.labels()).collect()
}

/// `sum over cells of f(densities) * length`, correctly rounded.
fn integrate_cells(mus: &[&StructuredMeasure], mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let mut acc = ExactDot::new();
    let mut dens = vec![0.0; mus.len()];
    for label in structured_labels(mus) {
        for (a, b) in cells(label, mus) {
            let mid = 0.5 * (a + b);
            for (d, m) in dens.iter_mut().zip(mus) {
                *d = m.density_at(label, mid);
            }
            let v = f(&dens);
            acc.add(v, b);
            acc.add(-v, a);
        }
    }
    acc.value()
}

/// Overlap `L` of a set of measures of one kind. Finite weights at or below
/// `zero` count as zero.
pub fn measure_overlap(mus: &[&EpistemicState], zero: f64) -> Result<f64> {
    match same_kind(mus)? {
        Kind::Finite(f) => {
            let owned: Vec<FiniteDistribution> = f.into_iter().cloned().collect();
            prob::overlap_thresholded(&owned, zero)
        }
        Kind::Structured(s) => Ok(integrate_cells(&s, |d| {
            let m = d.iter().copied().fold(f64::INFINITY, f64::min);
            if m <= zero {
                0.0
            } else {
                m
            }
        })
        .clamp(0.0, 1.0)),
    }
}

/// Variational distance between two measures of one kind.
pub fn measure_distance(mu: &EpistemicState, nu: &EpistemicState) -> Result<f64> {
    match same_kind(&[mu, nu])? {
        Kind::Finite(f) => Ok(prob::variational_distance(f[0], f[1])),
        Kind::Structured(s) => Ok((0.5 * integrate_cells(&s, |d| (d[0] - d[1]).abs())).clamp(0.0, 1.0)),
    }
}

/// Mass of `mu` outside the supports of every measure in `others`.
pub fn exclusive_mass(mu: &EpistemicState, others: &[&EpistemicState], zero: f64) -> Result<f64> {
    let mut all = vec![mu];
    all.extend_from_slice(others);
    match same_kind(&all)? {
        Kind::Finite(f) => Ok(f[0]
            .iter()
            .filter(|(l, w)| *w > zero && f[1..].iter().all(|nu| nu.weight(l) <= zero))
            .map(|(_, w)| w)
            .sum()),
        Kind::Structured(s) => Ok(integrate_cells(&s, |d| {
            if d[0] > zero && d[1..].iter().all(|&x| x <= zero) {
                d[0]
            } else {
                0.0
            }
        })),
    }
}

/// `p mu + (1 - p) nu` over the direct sum of two spaces, with labels
/// prefixed `1:` and `2:`.
pub fn direct_sum(p: f64, mu: &EpistemicState, nu: &EpistemicState) -> Result<EpistemicState> {
    fn pre(tag: &str, l: &str) -> String {
        format!("{tag}:{l}")
    }
    match (mu, nu) {
        (EpistemicState::Finite { weights: a }, EpistemicState::Finite { weights: b }) => {
            let mut w: IndexMap<String, f64> = a.iter().map(|(l, x)| (pre("1", l), p * x)).collect();
            w.extend(b.iter().map(|(l, x)| (pre("2", l), (1.0 - p) * x)));
            Ok(FiniteDistribution::try_from(w)?.into())
        }
        (EpistemicState::Structured { pieces: a }, EpistemicState::Structured { pieces: b }) => {
            let scale = |tag: &str, q: f64, m: &StructuredMeasure| {
                m.map(|l, ps| (pre(tag, l), ps.iter().map(|x| Piece::new(x.lo, x.hi, q * x.density)).collect()))
            };
            let mut out: IndexMap<String, Vec<Piece>> = scale("1", p, a).into();
            out.extend(IndexMap::from(scale("2", 1.0 - p, b)));
            Ok(StructuredMeasure::try_from(out)?.into())
        }
        _ => Err(Error::SpaceMismatch("finite and structured measures mixed".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slice_measure(eps: f64, own: &str, other: &str) -> EpistemicState {
        StructuredMeasure::new([
            (own, vec![Piece::new(0.0, eps, 0.5), Piece::new(eps, 1.0, 1.0)]),
            (other, vec![Piece::new(0.0, eps, 0.5)]),
        ])
        .unwrap()
        .into()
    }

    #[test]
    fn structured_overlap_is_shared_slice() {
        let eps = 0.125;
        let a = slice_measure(eps, "a", "b");
        let b = slice_measure(eps, "b", "a");
        assert_eq!(measure_overlap(&[&a, &b], 0.0).unwrap(), eps);
        assert_eq!(measure_distance(&a, &b).unwrap(), 1.0 - eps);
        let ua: EpistemicState = StructuredMeasure::uniform_on("a").into();
        assert_eq!(measure_distance(&ua, &StructuredMeasure::uniform_on("b").into()).unwrap(), 1.0);
        assert_eq!(exclusive_mass(&a, &[&b], 0.0).unwrap(), 1.0 - eps);
    }

    #[test]
    fn rejects_bad_pieces() {
        assert!(StructuredMeasure::new([("a", vec![Piece::new(0.0, 0.5, 1.0)])]).is_err());
        assert!(StructuredMeasure::new([("a", vec![Piece::new(0.5, 1.0, 1.0), Piece::new(0.0, 0.5, 1.0)])]).is_err());
        let m = StructuredMeasure::new([("a", vec![Piece::new(0.0, 0.5, 2.0)])]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"a":[[0.0,0.5,2.0]]}"#);
    }

    #[test]
    fn direct_sum_scales_mass() {
        let u: EpistemicState = StructuredMeasure::uniform_on("a").into();
        let s = direct_sum(0.25, &u, &u).unwrap();
        assert_eq!(s.as_structured().unwrap().density_at("1:a", 0.3), 0.25);
        let f: EpistemicState = FiniteDistribution::point("x").into();
        assert!(direct_sum(0.5, &u, &f).is_err());
    }
}
