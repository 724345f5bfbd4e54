//! CHSH correlations from sequential joint probabilities.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{qubit, ComplexMatrix};
use crate::rules::{apply_sequence, UpdateRule};
use crate::state::{Gemenge, Outcome, QuantumState};

/// Measurement angles in the X–Z plane for the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Default for ChshSettings {
    fn default() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Self {
            a: [0.0, FRAC_PI_2],
            b: [FRAC_PI_4, 3.0 * FRAC_PI_4],
        }
    }
}

/// Spectral projectors `(I ± n·σ)/2` for the direction `cos θ Z + sin θ X`.
pub fn spin_projectors(theta: f64) -> [ComplexMatrix; 2] {
    let id = ComplexMatrix::identity(2);
    let mut obs = qubit::pauli_z().scale(theta.cos());
    obs.axpy(crate::linalg::ONE, &qubit::pauli_x().scale(theta.sin()));
    [(&id + &obs).scale(0.5), (&id - &obs).scale(0.5)]
}

/// `E(a,b) = Σ s·t · Tr[ω(P_t^B, ω(P_s^A, ρ))]`, or with B measured first when `reverse`.
pub fn correlator(rule: &dyn UpdateRule, state: &QuantumState, a: f64, b: f64, reverse: bool) -> Result<f64> {
    let g = Gemenge::pure_preparation(state.clone());
    let pa = spin_projectors(a);
    let pb = spin_projectors(b);
    let mut e = 0.0;
    for (s, p) in pa.iter().enumerate() {
        for (t, q) in pb.iter().enumerate() {
            let oa = Outcome::local(p.clone(), 0);
            let ob = Outcome::local(q.clone(), 1);
            let seq = if reverse { [ob, oa] } else { [oa, ob] };
            let sign = if s == t { 1.0 } else { -1.0 };
            e += sign * apply_sequence(rule, &seq, &g)?.total_trace();
        }
    }
    Ok(e)
}

/// CHSH value: the largest of the four `|ΣE − 2E_ij|` sign placements.
pub fn chsh_from_state(rule: &dyn UpdateRule, state: &QuantumState, settings: &ChshSettings, reverse: bool) -> Result<f64> {
    let mut e = [0.0; 4];
    for (i, &a) in settings.a.iter().enumerate() {
        for (j, &b) in settings.b.iter().enumerate() {
            e[2 * i + j] = correlator(rule, state, a, b, reverse)?;
        }
    }
    let total: f64 = e.iter().sum();
    Ok(e.iter().map(|x| (total - 2.0 * x).abs()).fold(0.0, f64::max))
}

pub fn singlet_state() -> QuantumState {
    let space = crate::state::CompositeSpace::new(vec![2, 2]).expect("static space");
    QuantumState::new(space, qubit::singlet()).expect("static state")
}
