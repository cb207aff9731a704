use indexmap::IndexMap;

use super::kochen_specker::BlochVector;
use crate::error::Result;
use crate::onto::{EpistemicState, FiniteResponse, OnticSpace, OntologicalModel, ResponseFunction};
use crate::prob::FiniteDistribution;
use crate::quantum::{ComplexMatrix, PMFragment, Povm};

/// Ontic states `(x, y)` with `x, y` in `{+, -}`.
pub const SPEKKENS_LABELS: [&str; 4] = ["(+,+)", "(+,-)", "(-,+)", "(-,-)"];

const SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// Axis of each measurement and the coordinate it reveals: `x`, `y` or
/// `z = xy`. Quantum counterparts: `x` is the Pauli-X axis, `y` Pauli-Y,
/// `z` Pauli-Z.
fn reveal(axis: char, (x, y): (f64, f64)) -> f64 {
    match axis {
        'x' => x,
        'y' => y,
        _ => x * y,
    }
}

fn bloch(axis: char, sign: f64) -> BlochVector {
    let v = match axis {
        'x' => [sign, 0.0, 0.0],
        'y' => [0.0, sign, 0.0],
        _ => [0.0, 0.0, sign],
    };
    BlochVector::new(v[0], v[1], v[2]).expect("axis vector")
}

/// Qubit fragment `{x+-, y+-, z+-, I/2} x {X, Y, Z}` with density operators
/// written entrywise so that every Born probability is exact.
pub fn spekkens_fragment() -> PMFragment {
    let mut f = PMFragment::new(2);
    for axis in ['x', 'y', 'z'] {
        for (s, sign) in [("+", 1.0), ("-", -1.0)] {
            f = f.with_state(format!("{axis}{s}"), bloch(axis, sign).projector());
        }
    }
    f = f.with_state("I/2", ComplexMatrix::identity(2).scale_real(0.5));
    for axis in ['x', 'y', 'z'] {
        let povm = Povm::new(vec![
            (format!("{axis}+"), bloch(axis, 1.0).projector()),
            (format!("{axis}-"), bloch(axis, -1.0).projector()),
        ])
        .expect("2x2 effects");
        f = f.with_measurement(axis.to_ascii_uppercase().to_string(), povm);
    }
    f
}

/// Spekkens' toy bit: each pure state is uniform on the two ontic states
/// with the matching coordinate, `I/2` is uniform on all four, and each
/// measurement reveals its coordinate deterministically.
pub fn spekkens_toy_bit() -> OntologicalModel {
    let fragment = spekkens_fragment();
    let mut delta = IndexMap::new();
    for axis in ['x', 'y', 'z'] {
        for (s, sign) in [("+", 1.0), ("-", -1.0)] {
            let support = SPEKKENS_LABELS.iter().zip(SIGNS).filter(|(_, xy)| reveal(axis, *xy) == sign);
            let mu = FiniteDistribution::new(support.map(|(l, _)| (*l, 0.5))).expect("two halves");
            delta.insert(format!("{axis}{s}"), vec![EpistemicState::from(mu)]);
        }
    }
    let mixed = FiniteDistribution::new(SPEKKENS_LABELS.map(|l| (l, 0.25))).expect("four quarters");
    delta.insert("I/2".to_string(), vec![mixed.into()]);

    let mut xi = IndexMap::new();
    for axis in ['x', 'y', 'z'] {
        let assignment = SPEKKENS_LABELS.iter().zip(SIGNS).map(|(l, xy)| (*l, usize::from(reveal(axis, xy) < 0.0)));
        let r = FiniteResponse::deterministic([format!("{axis}+"), format!("{axis}-")], assignment).expect("deterministic");
        xi.insert(axis.to_ascii_uppercase().to_string(), vec![ResponseFunction::from(r)]);
    }
    let space = OnticSpace::finite(SPEKKENS_LABELS).expect("distinct labels");
    OntologicalModel::new(space, delta, xi, Some(fragment)).expect("valid toy bit")
}

/// Spekkens' model with an extra ontic state `junk` that no preparation
/// reaches and that answers every measurement with probability 1/2.
pub fn spekkens_with_null_state() -> Result<OntologicalModel> {
    let (_, delta, xi, fragment) = spekkens_toy_bit().into_parts();
    let mut labels: Vec<&str> = SPEKKENS_LABELS.to_vec();
    labels.push("junk");
    let mut new_xi = IndexMap::new();
    for (meas, prs) in xi {
        let r = prs[0].as_finite().expect("finite").clone();
        let mut table: IndexMap<String, Vec<f64>> = r.iter().map(|(l, row)| (l.to_string(), row.to_vec())).collect();
        table.insert("junk".into(), vec![0.5, 0.5]);
        new_xi.insert(meas, vec![FiniteResponse::new(r.outcomes().to_vec(), table)?.into()]);
    }
    OntologicalModel::new(OnticSpace::finite(labels)?, delta, new_xi, fragment)
}
