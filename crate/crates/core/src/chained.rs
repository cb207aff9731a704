//! Chained Bell correlations on the maximally entangled state.
//!
//! Alice's settings are the even integers `a in {0, 2, .., 2N-2}`, Bob's the
//! odd `b in {1, 3, .., 2N-1}`. Setting `a` measures in the basis
//! `cos(t/2)|0> + sin(t/2)|1>` with `t = (a/2N + j) pi`, `j in {0, 1}`:
//! two antipodal points on the great circle through `|0>` and `|+>`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{born_rule, maximally_entangled, UnitVector};

/// Rank-one bases for every setting of both parties.
#[derive(Clone, Debug, Serialize)]
pub struct ChainedBases {
    pub n: usize,
    /// `(a, [phi_0, phi_1])` for even `a`.
    pub alice: Vec<(usize, [UnitVector; 2])>,
    /// `(b, [phi_0, phi_1])` for odd `b`.
    pub bob: Vec<(usize, [UnitVector; 2])>,
}

impl ChainedBases {
    pub fn basis(&self, setting: usize) -> Option<&[UnitVector; 2]> {
        let side = if setting.is_multiple_of(2) { &self.alice } else { &self.bob };
        side.iter().find(|(s, _)| *s == setting).map(|(_, b)| b)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("chained Bell needs N >= 1".into()));
    }
    Ok(())
}

fn check_settings(n: usize, a: usize, b: usize) -> Result<()> {
    check_n(n)?;
    if !a.is_multiple_of(2) || a > 2 * n - 2 {
        return Err(Error::InvalidArgument(format!("Alice setting {a} is not an even integer in [0, {}]", 2 * n - 2)));
    }
    if b % 2 != 1 || b > 2 * n - 1 {
        return Err(Error::InvalidArgument(format!("Bob setting {b} is not an odd integer in [1, {}]", 2 * n - 1)));
    }
    Ok(())
}

/// `(setting / 2N + j) pi`.
pub fn chained_angle(n: usize, setting: usize, j: usize) -> f64 {
    (setting as f64 / (2 * n) as f64 + j as f64) * PI
}

fn basis_vectors(n: usize, setting: usize) -> [UnitVector; 2] {
    [0, 1].map(|j| {
        let t = chained_angle(n, setting, j) / 2.0;
        UnitVector::from_real(&[t.cos(), t.sin()]).expect("unit")
    })
}

pub fn chained_bases(n: usize) -> Result<ChainedBases> {
    check_n(n)?;
    let alice = (0..n).map(|i| (2 * i, basis_vectors(n, 2 * i))).collect();
    let bob = (0..n).map(|i| (2 * i + 1, basis_vectors(n, 2 * i + 1))).collect();
    Ok(ChainedBases { n, alice, bob })
}

/// `Prob(X = j, Y = k | a, b, Phi+) = cos^2(((a - b)/2N + j - k) pi/2) / 2`.
pub fn chained_joint_prob(n: usize, a: usize, b: usize, j: usize, k: usize) -> Result<f64> {
    check_settings(n, a, b)?;
    if j > 1 || k > 1 {
        return Err(Error::InvalidArgument(format!("outcomes ({j}, {k}) not in {{0, 1}}")));
    }
    let x = ((a as f64 - b as f64) / (2 * n) as f64 + j as f64 - k as f64) * PI / 2.0;
    Ok(0.5 * x.cos().powi(2))
}

/// Joint outcome distribution `probs[j][k]` for one pair of settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointTable {
    pub a: usize,
    pub b: usize,
    pub probs: [[f64; 2]; 2],
}

impl JointTable {
    pub fn prob_equal(&self) -> f64 {
        self.probs[0][0] + self.probs[1][1]
    }

    pub fn prob_unequal(&self) -> f64 {
        self.probs[0][1] + self.probs[1][0]
    }
}

/// Joint tables for every pair of settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbTable {
    pub n: usize,
    pub tables: Vec<JointTable>,
}

impl ProbTable {
    pub fn get(&self, a: usize, b: usize) -> Option<&JointTable> {
        self.tables.iter().find(|t| t.a == a && t.b == b)
    }

    /// Largest entrywise difference over the pairs both tables hold.
    pub fn max_abs_diff(&self, other: &ProbTable) -> f64 {
        let mut m = 0.0f64;
        for t in &self.tables {
            if let Some(u) = other.get(t.a, t.b) {
                for j in 0..2 {
                    for k in 0..2 {
                        m = m.max((t.probs[j][k] - u.probs[j][k]).abs());
                    }
                }
            }
        }
        m
    }
}

fn build_table(n: usize, mut f: impl FnMut(usize, usize) -> Result<[[f64; 2]; 2]>) -> Result<ProbTable> {
    check_n(n)?;
    let mut tables = Vec::with_capacity(n * n);
    for a in (0..2 * n).step_by(2) {
        for b in (1..2 * n).step_by(2) {
            tables.push(JointTable { a, b, probs: f(a, b)? });
        }
    }
    Ok(ProbTable { n, tables })
}

/// Closed-form tables for all `N^2` setting pairs.
pub fn closed_form_table(n: usize) -> Result<ProbTable> {
    build_table(n, |a, b| {
        let mut p = [[0.0; 2]; 2];
        for (j, row) in p.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = chained_joint_prob(n, a, b, j, k)?;
            }
        }
        Ok(p)
    })
}

/// Tables from `Tr((Pi_j (x) Pi_k) Phi+)` on the constructed bases.
pub fn born_table(n: usize) -> Result<ProbTable> {
    let bases = chained_bases(n)?;
    let rho = maximally_entangled(2)?.projector();
    build_table(n, |a, b| {
        let (ba, bb) = (bases.basis(a).expect("alice"), bases.basis(b).expect("bob"));
        let mut p = [[0.0; 2]; 2];
        for (j, row) in p.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = born_rule(&rho, &ba[j].projector().kron(&bb[k].projector()))?;
            }
        }
        Ok(p)
    })
}

/// `I_N = Prob(X = Y | 0, 2N-1) + sum_{|a-b| = 1} Prob(X != Y | a, b)`.
pub fn correlation_measure(table: &ProbTable, n: usize) -> Result<f64> {
    check_n(n)?;
    let get = |a: usize, b: usize| {
        table
            .get(a, b)
            .ok_or_else(|| Error::InvalidArgument(format!("table lacks settings ({a}, {b})")))
    };
    let mut total = get(0, 2 * n - 1)?.prob_equal();
    for b in (1..2 * n).step_by(2) {
        total += get(b - 1, b)?.prob_unequal();
        if b + 1 < 2 * n {
            total += get(b + 1, b)?.prob_unequal();
        }
    }
    Ok(total)
}

/// `(2N sin^2(pi/4N), pi^2/8N)`.
pub fn closed_form_in(n: usize) -> Result<(f64, f64)> {
    check_n(n)?;
    let nf = n as f64;
    let value = 2.0 * nf * (PI / (4.0 * nf)).sin().powi(2);
    let bound = PI * PI / (8.0 * nf);
    debug_assert!(value <= bound);
    Ok((value, bound))
}

/// Basis of `C^d` for one setting: the two chained vectors on
/// `span{|r>, |s>}` followed by the remaining computational vectors.
pub fn embedded_basis(n: usize, d: usize, (r, s): (usize, usize), setting: usize) -> Result<Vec<UnitVector>> {
    check_n(n)?;
    if d < 3 || r >= d || s >= d || r == s {
        return Err(Error::InvalidArgument(format!("embedding needs d >= 3 and distinct r, s < d; got d={d}, ({r}, {s})")));
    }
    let mut out = Vec::with_capacity(d);
    for v in basis_vectors(n, setting) {
        let mut amps = vec![0.0; d];
        amps[r] = v.amps()[0].re;
        amps[s] = v.amps()[1].re;
        out.push(UnitVector::from_real(&amps)?);
    }
    out.extend((0..d).filter(|t| *t != r && *t != s).map(|t| UnitVector::basis(d, t)));
    Ok(out)
}

/// Conditional tables of the qudit embedding and the probability of the
/// conditioning event, per setting pair.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddedConditional {
    pub table: ProbTable,
    /// `Prob(X, Y in {r, s})`, in the order of `table.tables`.
    pub event_probs: Vec<f64>,
}

/// Born probabilities on `Phi+(d)` for the embedded bases, conditioned on
/// both outcomes falling in `span{|r>, |s>}`.
pub fn embedded_conditional_table(n: usize, d: usize, subspace: (usize, usize)) -> Result<EmbeddedConditional> {
    let rho = maximally_entangled(d)?.projector();
    let mut event_probs = Vec::new();
    let table = build_table(n, |a, b| {
        let (ba, bb) = (embedded_basis(n, d, subspace, a)?, embedded_basis(n, d, subspace, b)?);
        let mut p = [[0.0; 2]; 2];
        for (j, row) in p.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = born_rule(&rho, &ba[j].projector().kron(&bb[k].projector()))?;
            }
        }
        let event: f64 = p.iter().flatten().sum();
        if event <= crate::ARITH_TOL {
            return Err(Error::ZeroProbability(event));
        }
        event_probs.push(event);
        Ok(p.map(|row| row.map(|x| x / event)))
    })?;
    Ok(EmbeddedConditional { table, event_probs })
}

/// One row of a chained sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainedRow {
    pub n: usize,
    pub dim: usize,
    /// `I_N` from the closed-form table, or from the Born table when verified.
    pub i_n: f64,
    pub closed_form: f64,
    pub bound: f64,
    /// Largest difference between closed-form and Born tables (embedded and
    /// conditioned when `dim > 2`).
    pub max_born_residual: Option<f64>,
}

pub fn chained_row(n: usize, dim: usize, verify: bool) -> Result<ChainedRow> {
    let (closed_form, bound) = closed_form_in(n)?;
    let closed = closed_form_table(n)?;
    let (i_n, max_born_residual) = if verify {
        let born = match dim {
            2 => born_table(n)?,
            d => embedded_conditional_table(n, d, (0, 1))?.table,
        };
        (correlation_measure(&born, n)?, Some(born.max_abs_diff(&closed)))
    } else {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("dimension {dim}")));
        }
        (correlation_measure(&closed, n)?, None)
    };
    Ok(ChainedRow { n, dim, i_n, closed_form, bound, max_born_residual })
}
