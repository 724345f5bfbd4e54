//! Random and fixed inputs for every check.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::chsh::{singlet_state, ChshSettings};
use super::witness::WitnessInputs;
use super::CheckId;
use crate::linalg::{
    haar_unitary_with, qubit, random_density_with, random_observable_with, random_projector_with, sample::column_projector,
    sample::random_vector_in, ComplexMatrix, C64,
};
use crate::rules::UpdateRule;
use crate::state::{CompositeSpace, Gemenge, Observable, Outcome, QuantumState, Target};

fn random_state(rng: &mut ChaCha8Rng, space: &CompositeSpace) -> QuantumState {
    let d = space.total_dim();
    let rank = rng.random_range(1..=d);
    QuantumState::new(space.clone(), random_density_with(rng, d, rank)).expect("dimension matches")
}

fn random_projector(rng: &mut ChaCha8Rng, dim: usize, min_rank: usize) -> ComplexMatrix {
    let rank = rng.random_range(min_rank.min(dim)..=dim);
    random_projector_with(rng, dim, rank)
}

fn random_local(rng: &mut ChaCha8Rng, space: &CompositeSpace, min_rank: usize) -> Outcome {
    let k = rng.random_range(0..space.len());
    let d = space.dims()[k];
    Outcome::local(random_projector(rng, d, min_rank), k)
}

/// Local on a random subsystem, or global with probability ¼ on composite spaces.
fn random_outcome(rng: &mut ChaCha8Rng, space: &CompositeSpace) -> Outcome {
    if space.is_composite() && rng.random_bool(0.25) {
        Outcome::global(random_projector(rng, space.total_dim(), 1))
    } else {
        random_local(rng, space, 1)
    }
}

fn two_distinct(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let b = (a + rng.random_range(1..n)) % n;
    (a, b)
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn random_gemenge(rng: &mut ChaCha8Rng, space: &CompositeSpace) -> Gemenge {
    let n = rng.random_range(2..=3);
    let weights = random_weights(rng, n);
    let items = weights.into_iter().map(|w| (w, random_state(rng, space))).collect();
    Gemenge::new(items).expect("one space, positive weights")
}

/// The spectral decomposition of `rho` as a Gemenge of pure states.
fn spectral_gemenge(rho: &QuantumState) -> Gemenge {
    let items = rho
        .matrix()
        .hermitian_eigen()
        .into_iter()
        .map(|(w, v)| {
            let s = QuantumState::new(rho.space().clone(), ComplexMatrix::pure(&v)).expect("same space");
            (w.max(0.0), s)
        })
        .collect();
    Gemenge::new(items).expect("one space, non-negative weights")
}

/// A normalized state supported inside the range of `q`.
fn state_inside(rng: &mut ChaCha8Rng, space: &CompositeSpace, q: &ComplexMatrix) -> QuantumState {
    let n = rng.random_range(1..=q.projector_rank().max(1));
    let mut m = ComplexMatrix::zeros(q.dim());
    for w in random_weights(rng, n) {
        m.axpy(C64::new(w, 0.0), &ComplexMatrix::pure(&random_vector_in(rng, q)));
    }
    QuantumState::new(space.clone(), m).expect("dimension matches")
}

fn contexts(rule: &dyn UpdateRule) -> [String; 2] {
    let alt = rule.alternative_contexts();
    if alt.len() >= 2 {
        [alt[0].clone(), alt[1].clone()]
    } else {
        [rule.name(), rule.name()]
    }
}

/// One random scenario for `check` on `space`.
pub fn sample(check: CheckId, rule: &dyn UpdateRule, space: &CompositeSpace, rng: &mut ChaCha8Rng, trial: usize) -> WitnessInputs {
    use WitnessInputs as W;
    match check {
        CheckId::Born => W::Born {
            outcome: random_outcome(rng, space),
            state: random_state(rng, space),
        },
        CheckId::Homogeneity => {
            let outcome = random_outcome(rng, space);
            let state = random_state(rng, space);
            let c = match trial % 4 {
                0 => 0.0,
                1 => 0.3,
                2 => 1.0,
                _ => rng.random_range(0.0..1.0),
            };
            W::Homogeneity { outcome, state, c }
        }
        CheckId::A1 => W::Positivity {
            outcome: random_outcome(rng, space),
            state: random_state(rng, space),
        },
        CheckId::A2 => {
            let min_rank = if rule.alternative_contexts().len() >= 2 { 2 } else { 1 };
            W::ContextIndependence {
                contexts: contexts(rule),
                outcome: random_local(rng, space, min_rank),
                state: random_state(rng, space),
            }
        }
        CheckId::A3 => {
            let outcome = random_local(rng, space, 1);
            let state = random_state(rng, space);
            let frames = space.dims().iter().map(|&d| haar_unitary_with(rng, d)).collect();
            W::LocalCovariance { outcome, state, frames }
        }
        CheckId::A4 => {
            let traced = rng.random_range(0..space.len());
            let k = (traced + rng.random_range(1..space.len())) % space.len();
            let outcome = Outcome::local(random_projector(rng, space.dims()[k], 1), k);
            W::SelfConsistency {
                outcome,
                state: random_state(rng, space),
                traced,
            }
        }
        CheckId::A5 => {
            let k = rng.random_range(0..space.len());
            let d = space.dims()[k];
            let n = rng.random_range(1..=d);
            let observable = Observable::on(Target::Local(k), random_observable_with(rng, d, n));
            W::NoSignalling {
                observable,
                state: random_state(rng, space),
            }
        }
        CheckId::A6 => {
            let (a, b) = two_distinct(rng, space.len());
            let first = Outcome::local(random_projector(rng, space.dims()[a], 1), a);
            let second = Outcome::local(random_projector(rng, space.dims()[b], 1), b);
            W::LocalCommutativity {
                first,
                second,
                state: random_state(rng, space),
            }
        }
        CheckId::DetRepeatability => W::DeterministicRepeat {
            outcome: random_local(rng, space, 1),
            state: random_state(rng, space),
        },
        CheckId::WeakRepeatability => W::WeakRepeat {
            outcome: random_local(rng, space, 1),
            state: random_state(rng, space),
        },
        CheckId::PrepIndistinguishability => {
            let outcome = random_local(rng, space, 1);
            let first = random_gemenge(rng, space);
            let rho = crate::state::gemenge_density(&first).expect("non-empty");
            W::PrepIndistinguishability {
                outcome,
                first,
                second: spectral_gemenge(&rho),
            }
        }
        CheckId::CompositionCompat => W::CompositionCompat {
            outcome: random_local(rng, space, 1),
            state: random_state(rng, space),
        },
        CheckId::Ideality => {
            let outcome = random_local(rng, space, 1);
            let q = outcome.embedded(space).expect("sampled on this space");
            let state = state_inside(rng, space, &q);
            W::Ideality { outcome, state }
        }
        CheckId::LocalTomography => {
            let (a, b) = two_distinct(rng, space.len());
            let x = Outcome::local(random_projector(rng, space.dims()[a], 1), a);
            let y = Outcome::local(random_projector(rng, space.dims()[b], 1), b);
            let (first, second) = if trial.is_multiple_of(2) { (x, y) } else { (y, x) };
            W::LocalTomography {
                first,
                second,
                state: random_state(rng, space),
            }
        }
        CheckId::Coherence => {
            let d = space.total_dim();
            let u = haar_unitary_with(rng, d);
            let r = rng.random_range(1..=d);
            let r_fine = rng.random_range(1..=r);
            W::Coherence {
                coarse: Outcome::local(column_projector(&u, 0..r), 0),
                fine: column_projector(&u, 0..r_fine),
                state: random_state(rng, space),
            }
        }
        CheckId::Nonlocality => W::Nonlocality {
            state: singlet_state(),
            settings: ChshSettings::default(),
        },
        CheckId::CompletePositivity => W::Linearity {
            outcome: random_local(rng, space, 1),
            mixture: random_gemenge(rng, space),
        },
    }
}

/// Choi-matrix scenario for the second stage of the complete-positivity check.
pub fn sample_choi(space: &CompositeSpace, rng: &mut ChaCha8Rng) -> WitnessInputs {
    WitnessInputs::Choi {
        outcome: random_local(rng, space, 1),
        space: space.clone(),
    }
}

fn qubits(n: usize) -> CompositeSpace {
    CompositeSpace::new(vec![2; n]).expect("static space")
}

fn ket_state(n: usize, v: &[C64]) -> QuantumState {
    QuantumState::new(qubits(n), ComplexMatrix::pure(v)).expect("static state")
}

fn matrix_state(n: usize, m: ComplexMatrix) -> QuantumState {
    QuantumState::new(qubits(n), m).expect("static state")
}

fn p(k: usize) -> ComplexMatrix {
    ComplexMatrix::basis_projector(2, k)
}

fn bell(sign: f64) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = [C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(sign * h, 0.0)];
    ComplexMatrix::pure(&v)
}

fn mixture(items: Vec<(f64, QuantumState)>) -> Gemenge {
    Gemenge::new(items).expect("static gemenge")
}

/// Fixed inputs tried before the random trials; `composite` selects the scope.
pub fn probes(check: CheckId, rule: &dyn UpdateRule, composite: bool) -> Vec<WitnessInputs> {
    use WitnessInputs as W;
    let ket00 = || matrix_state(2, ComplexMatrix::basis_projector(4, 0));
    let phi = || matrix_state(2, qubit::phi_plus());
    let plus = || ket_state(1, &qubit::ket_plus());
    let zero = || ket_state(1, &qubit::ket0());
    match (check, composite) {
        (CheckId::A2, false) => vec![W::ContextIndependence {
            contexts: contexts(rule),
            outcome: Outcome::local(ComplexMatrix::identity(2), 0),
            state: plus(),
        }],
        (CheckId::A3, false) => vec![W::LocalCovariance {
            outcome: Outcome::local(p(0), 0),
            state: zero(),
            frames: vec![qubit::hadamard()],
        }],
        (CheckId::A5, true) => vec![W::NoSignalling {
            observable: Observable::on(Target::Local(0), vec![p(0), p(1)]),
            state: ket00(),
        }],
        (CheckId::A6, true) => vec![W::LocalCommutativity {
            first: Outcome::local(p(0), 0),
            second: Outcome::local(p(1), 1),
            state: phi(),
        }],
        (CheckId::DetRepeatability, false) => vec![W::DeterministicRepeat {
            outcome: Outcome::local(p(0), 0),
            state: plus(),
        }],
        (CheckId::WeakRepeatability, false) => vec![
            W::WeakRepeat {
                outcome: Outcome::local(p(0), 0),
                state: plus(),
            },
            W::WeakRepeat {
                outcome: Outcome::local(p(0), 0),
                state: zero(),
            },
        ],
        (CheckId::PrepIndistinguishability, false) => vec![W::PrepIndistinguishability {
            outcome: Outcome::local(p(0), 0),
            first: mixture(vec![(0.5, zero()), (0.5, ket_state(1, &qubit::ket1()))]),
            second: mixture(vec![(0.5, plus()), (0.5, ket_state(1, &qubit::ket_minus()))]),
        }],
        (CheckId::PrepIndistinguishability, true) => vec![W::PrepIndistinguishability {
            outcome: Outcome::local(p(0), 0),
            first: mixture(vec![
                (0.5, ket00()),
                (0.5, matrix_state(2, ComplexMatrix::basis_projector(4, 3))),
            ]),
            second: mixture(vec![(0.5, matrix_state(2, bell(1.0))), (0.5, matrix_state(2, bell(-1.0)))]),
        }],
        (CheckId::CompositionCompat, true) => vec![
            W::CompositionCompat {
                outcome: Outcome::local(p(0), 0),
                state: ket00(),
            },
            W::CompositionCompat {
                outcome: Outcome::local(p(0), 0),
                state: phi(),
            },
        ],
        (CheckId::Ideality, false) => vec![W::Ideality {
            outcome: Outcome::local(p(0), 0),
            state: zero(),
        }],
        (CheckId::Ideality, true) => vec![W::Ideality {
            outcome: Outcome::local(ComplexMatrix::identity(2), 0),
            state: phi(),
        }],
        (CheckId::LocalTomography, true) => vec![W::LocalTomography {
            first: Outcome::local(p(0), 0),
            second: Outcome::local(p(0), 1),
            state: phi(),
        }],
        (CheckId::Coherence, false) => vec![W::Coherence {
            coarse: Outcome::local(p(0), 0),
            fine: p(0),
            state: plus(),
        }],
        (CheckId::CompletePositivity, false) => vec![W::Linearity {
            outcome: Outcome::local(p(0), 0),
            mixture: mixture(vec![(0.5, zero()), (0.5, plus())]),
        }],
        (CheckId::CompletePositivity, true) => vec![W::Linearity {
            outcome: Outcome::local(p(0), 0),
            mixture: mixture(vec![(0.5, ket00()), (0.5, phi())]),
        }],
        _ => Vec::new(),
    }
}
