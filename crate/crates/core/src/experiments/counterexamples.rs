use serde::{Deserialize, Serialize};

use crate::checks::{evaluate, WitnessInputs};
use crate::error::{GurError, Result};
use crate::linalg::{qubit, tensor, ComplexMatrix, C64};
use crate::rules::{CatalogRule, UpdateRule};
use crate::state::{CompositeSpace, Gemenge, Outcome, QuantumState};

pub const COUNTEREXAMPLES: [&str; 3] = ["dep-cc", "passive-gemenge", "mu-ordering"];

/// Matching tolerance against the published matrices.
const MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub name: String,
    pub rule: String,
    pub inputs: WitnessInputs,
    pub expected: [ComplexMatrix; 2],
    pub computed: [ComplexMatrix; 2],
    /// Largest deviation of a computed side from its expected matrix.
    pub distance: f64,
    /// How far apart the two computed sides are.
    pub separation: f64,
    pub matches: bool,
}

fn state(dims: &[usize], m: ComplexMatrix) -> Result<QuantumState> {
    QuantumState::new(CompositeSpace::new(dims.to_vec())?, m)
}

fn p(k: usize) -> ComplexMatrix {
    ComplexMatrix::basis_projector(2, k)
}

fn half_identity() -> ComplexMatrix {
    ComplexMatrix::identity(2).scale(0.5)
}

/// Recomputes one of the named counterexamples from first principles.
/// `mu` is only used by `mu-ordering`.
pub fn counterexample(name: &str, mu: f64) -> Result<CounterexampleRecord> {
    let (rule, inputs, expected): (CatalogRule, WitnessInputs, [ComplexMatrix; 2]) = match name {
        "dep-cc" => (
            CatalogRule::Dep,
            WitnessInputs::CompositionCompat {
                outcome: Outcome::local(p(0), 0),
                state: state(&[2, 2], tensor(&p(0), &p(0)))?,
            },
            [tensor(&half_identity(), &p(0)), tensor(&half_identity(), &half_identity())],
        ),
        "passive-gemenge" => {
            let pure = |v: Vec<C64>| state(&[2], ComplexMatrix::pure(&v));
            (
                CatalogRule::Passive,
                WitnessInputs::PrepIndistinguishability {
                    outcome: Outcome::local(p(0), 0),
                    first: Gemenge::new(vec![(0.5, pure(qubit::ket0())?), (0.5, pure(qubit::ket1())?)])?,
                    second: Gemenge::new(vec![(0.5, pure(qubit::ket_plus())?), (0.5, pure(qubit::ket_minus())?)])?,
                },
                [p(0).scale(0.5), ComplexMatrix::identity(2).scale(0.25)],
            )
        }
        "mu-ordering" => {
            let rule = CatalogRule::mu(mu)?;
            let side = |k: usize| {
                let mut m = ComplexMatrix::basis_projector(4, k).scale(1.0 - mu);
                m.axpy(C64::new(mu, 0.0), &qubit::phi_plus());
                m.scale(mu / 4.0)
            };
            (
                rule,
                WitnessInputs::LocalCommutativity {
                    first: Outcome::local(p(0), 0),
                    second: Outcome::local(p(1), 1),
                    state: state(&[2, 2], qubit::phi_plus())?,
                },
                [side(3), side(0)],
            )
        }
        other => return Err(GurError::UnknownCounterexample(other.to_string())),
    };
    let e = evaluate(&rule, &inputs, MATCH_TOL)?;
    let distance = e.lhs.distance(&expected[0]).max(e.rhs.distance(&expected[1]));
    Ok(CounterexampleRecord {
        name: name.to_string(),
        rule: rule.name(),
        inputs,
        expected,
        separation: e.distance,
        computed: [e.lhs, e.rhs],
        distance,
        matches: distance <= MATCH_TOL,
    })
}
