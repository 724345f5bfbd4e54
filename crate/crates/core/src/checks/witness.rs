//! Serializable check inputs and the single evaluation path shared by trials and replay.

use serde::{Deserialize, Serialize};

use super::chsh::{chsh_from_state, ChshSettings};
use crate::error::{GurError, Result};
use crate::linalg::{choi_matrix, linear_extension, min_eigenvalue, partial_trace, trace_out, ComplexMatrix, C64};
use crate::rules::{apply_gemenge, apply_sequence, parse_rule, UpdateRule};
use crate::state::{gemenge_density, CompositeSpace, Gemenge, Observable, Outcome, QuantumState, Target, TRACE_FLOOR};

/// Everything needed to recompute one side-by-side comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessInputs {
    Born {
        outcome: Outcome,
        state: QuantumState,
    },
    Homogeneity {
        outcome: Outcome,
        state: QuantumState,
        c: f64,
    },
    Positivity {
        outcome: Outcome,
        state: QuantumState,
    },
    ContextIndependence {
        contexts: [String; 2],
        outcome: Outcome,
        state: QuantumState,
    },
    LocalCovariance {
        outcome: Outcome,
        state: QuantumState,
        frames: Vec<ComplexMatrix>,
    },
    SelfConsistency {
        outcome: Outcome,
        state: QuantumState,
        traced: usize,
    },
    NoSignalling {
        observable: Observable,
        state: QuantumState,
    },
    LocalCommutativity {
        first: Outcome,
        second: Outcome,
        state: QuantumState,
    },
    DeterministicRepeat {
        outcome: Outcome,
        state: QuantumState,
    },
    WeakRepeat {
        outcome: Outcome,
        state: QuantumState,
    },
    PrepIndistinguishability {
        outcome: Outcome,
        first: Gemenge,
        second: Gemenge,
    },
    CompositionCompat {
        outcome: Outcome,
        state: QuantumState,
    },
    Ideality {
        outcome: Outcome,
        state: QuantumState,
    },
    LocalTomography {
        first: Outcome,
        second: Outcome,
        state: QuantumState,
    },
    Coherence {
        coarse: Outcome,
        fine: ComplexMatrix,
        state: QuantumState,
    },
    Nonlocality {
        state: QuantumState,
        settings: ChshSettings,
    },
    Linearity {
        outcome: Outcome,
        mixture: Gemenge,
    },
    Choi {
        outcome: Outcome,
        space: CompositeSpace,
    },
    ObservableDefect {
        projectors: Vec<ComplexMatrix>,
    },
}

/// Both sides of one comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub lhs: ComplexMatrix,
    pub rhs: ComplexMatrix,
    pub distance: f64,
    pub violated: bool,
    /// Weak repeatability only: the repeat probability strictly improved on a
    /// non-trivial outcome.
    pub strict: bool,
}

fn scalar(x: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(1, |_, _| C64::new(x, 0.0))
}

impl Evaluation {
    fn compare(lhs: ComplexMatrix, rhs: ComplexMatrix, tol: f64) -> Self {
        let distance = lhs.distance(&rhs);
        Self {
            lhs,
            rhs,
            distance,
            violated: distance > tol,
            strict: false,
        }
    }

    fn scalars(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::compare(scalar(lhs), scalar(rhs), tol)
    }
}

fn density(g: &Gemenge) -> Result<ComplexMatrix> {
    Ok(gemenge_density(g)?.into_matrix())
}

/// Compares densities, then the items pairwise; reports the worst mismatch.
fn compare_gemenge(a: &Gemenge, b: &Gemenge, tol: f64) -> Result<Evaluation> {
    let mut worst = Evaluation::compare(density(a)?, density(b)?, tol);
    if a.len() != b.len() {
        if !worst.violated {
            worst = Evaluation::scalars(a.len() as f64, b.len() as f64, tol);
        }
        return Ok(worst);
    }
    for (x, y) in a.items().iter().zip(b.items()) {
        let e = Evaluation::compare(x.state.matrix().scale(x.weight), y.state.matrix().scale(y.weight), tol);
        if e.distance > worst.distance {
            worst = e;
        }
    }
    Ok(worst)
}

fn rule_for(rule: &dyn UpdateRule, name: &str) -> Result<Option<Box<dyn UpdateRule>>> {
    if name == rule.name() {
        Ok(None)
    } else {
        parse_rule(name).map(Some)
    }
}

fn single(state: &QuantumState) -> Gemenge {
    Gemenge::pure_preparation(state.clone())
}

/// Moves a local outcome to its index after subsystem `traced` is removed.
fn shift_target(outcome: &Outcome, traced: usize) -> Result<Outcome> {
    match outcome.target {
        Target::Local(k) if k == traced => Err(GurError::Replay("outcome sits on the traced subsystem".into())),
        Target::Local(k) => Ok(Outcome::local(outcome.projector.clone(), if k > traced { k - 1 } else { k })),
        Target::Global => Err(GurError::Replay("self-consistency needs a local outcome".into())),
    }
}

pub fn evaluate(rule: &dyn UpdateRule, inputs: &WitnessInputs, tol: f64) -> Result<Evaluation> {
    use WitnessInputs as W;
    match inputs {
        W::Born { outcome, state } => {
            let out = rule.apply(outcome, state)?;
            Ok(Evaluation::scalars(out.total_trace(), outcome.probability(state)?, tol))
        }
        W::Homogeneity { outcome, state, c } => {
            let scaled = rule.apply(outcome, &state.scaled(*c))?;
            let base = rule.apply(outcome, state)?.map_states(|s| Ok(s.scaled(*c)))?;
            compare_gemenge(&scaled, &base, tol)
        }
        W::Positivity { outcome, state } => {
            let out = rule.apply(outcome, state)?;
            let mut worst = Evaluation::scalars(0.0, 0.0, tol);
            for item in out.items() {
                let lam = min_eigenvalue(item.state.matrix());
                let tr = item.state.trace();
                let candidates = [
                    Evaluation::scalars(lam.min(0.0), 0.0, tol),
                    Evaluation::compare(item.state.matrix().clone(), item.state.matrix().adjoint(), tol),
                    Evaluation::scalars(tr.max(1.0), 1.0, tol),
                ];
                for e in candidates {
                    if e.distance > worst.distance {
                        worst = e;
                    }
                }
            }
            Ok(worst)
        }
        W::ContextIndependence {
            contexts,
            outcome,
            state,
        } => {
            let a = rule_for(rule, &contexts[0])?;
            let b = rule_for(rule, &contexts[1])?;
            let ra = a.as_deref().unwrap_or(rule).apply(outcome, state)?;
            let rb = b.as_deref().unwrap_or(rule).apply(outcome, state)?;
            Ok(Evaluation::compare(density(&ra)?, density(&rb)?, tol))
        }
        W::LocalCovariance { outcome, state, frames } => {
            let k = match outcome.target {
                Target::Local(k) => k,
                Target::Global => return Err(GurError::Replay("local covariance needs a local outcome".into())),
            };
            let frame_k = frames.get(k).ok_or(GurError::SubsystemOutOfRange {
                index: k,
                count: frames.len(),
            })?;
            let u = crate::linalg::tensor_all(frames.iter());
            if u.dim() != state.space().total_dim() {
                return Err(GurError::DimensionMismatch {
                    expected: state.space().total_dim(),
                    found: u.dim(),
                });
            }
            let rotated_outcome = Outcome::local(frame_k.conjugate(&outcome.projector), k);
            let rotated_state = state.with_matrix(u.conjugate(state.matrix()))?;
            let reframed = rule.reframed(frame_k);
            let lhs = reframed.as_deref().unwrap_or(rule).apply(&rotated_outcome, &rotated_state)?;
            let rhs = rule
                .apply(outcome, state)?
                .map_states(|s| s.with_matrix(u.conjugate(s.matrix())))?;
            compare_gemenge(&lhs, &rhs, tol)
        }
        W::SelfConsistency { outcome, state, traced } => {
            let space = state.space();
            let reduced_space = space.without(*traced)?;
            let keep: Vec<usize> = (0..space.len()).filter(|k| k != traced).collect();
            let reduce = |m: &ComplexMatrix| partial_trace(m, space, &keep);
            let lhs = rule
                .apply(outcome, state)?
                .map_states(|s| QuantumState::new(reduced_space.clone(), reduce(s.matrix())?))?;
            let reduced = QuantumState::new(reduced_space.clone(), reduce(state.matrix())?)?;
            let rhs = rule.apply(&shift_target(outcome, *traced)?, &reduced)?;
            compare_gemenge(&lhs, &rhs, tol)
        }
        W::NoSignalling { observable, state } => {
            let k = match observable.outcomes.first().map(|o| o.target) {
                Some(Target::Local(k)) => k,
                _ => return Err(GurError::Replay("no-signalling needs a local observable".into())),
            };
            let space = state.space();
            let mut sum = ComplexMatrix::zeros(space.total_dim() / space.subsystem_dim(k)?);
            for o in &observable.outcomes {
                let out = density(&rule.apply(o, state)?)?;
                sum = &sum + &trace_out(&out, space, k)?;
            }
            Ok(Evaluation::compare(sum, trace_out(state.matrix(), space, k)?, tol))
        }
        W::LocalCommutativity { first, second, state } => {
            let g = single(state);
            let xy = apply_sequence(rule, &[first.clone(), second.clone()], &g)?;
            let yx = apply_sequence(rule, &[second.clone(), first.clone()], &g)?;
            Ok(Evaluation::compare(density(&xy)?, density(&yx)?, tol))
        }
        W::DeterministicRepeat { outcome, state } => {
            let after = density(&rule.apply(outcome, state)?)?;
            let q = outcome.embedded(state.space())?;
            Ok(Evaluation::scalars(q.trace_product(&after).re, after.trace_re(), tol))
        }
        W::WeakRepeat { outcome, state } => {
            let q = outcome.embedded(state.space())?;
            let tr = state.trace();
            let p = if tr > TRACE_FLOOR {
                q.trace_product(state.matrix()).re / tr
            } else {
                0.0
            };
            let after = density(&rule.apply(outcome, state)?)?;
            let tr_after = after.trace_re();
            let repeat = if tr_after > TRACE_FLOOR {
                q.trace_product(&after).re / tr_after
            } else {
                p
            };
            let mut e = Evaluation::scalars(repeat, p, tol);
            e.violated = repeat < p - tol;
            e.strict = repeat > p + tol && p > tol && p < 1.0 - tol;
            Ok(e)
        }
        W::PrepIndistinguishability { outcome, first, second } => {
            let a = density(&apply_gemenge(rule, outcome, first)?)?;
            let b = density(&apply_gemenge(rule, outcome, second)?)?;
            Ok(Evaluation::compare(a, b, tol))
        }
        W::CompositionCompat { outcome, state } => {
            let local = rule.apply(outcome, state)?;
            let global = rule.apply(&outcome.globalized(state.space())?, state)?;
            compare_gemenge(&local, &global, tol)
        }
        W::Ideality { outcome, state } => {
            let after = density(&rule.apply(outcome, state)?)?;
            Ok(Evaluation::compare(after, state.matrix().clone(), tol))
        }
        W::LocalTomography { first, second, state } => {
            let seq = apply_sequence(rule, &[first.clone(), second.clone()], &single(state))?;
            let space = state.space();
            let joint = first.embedded(space)?.matmul(&second.embedded(space)?);
            Ok(Evaluation::scalars(seq.total_trace(), joint.trace_product(state.matrix()).re, tol))
        }
        W::Coherence { coarse, fine, state } => {
            let after = density(&rule.apply(coarse, state)?)?;
            let fine_full = Outcome {
                projector: fine.clone(),
                target: coarse.target,
            }
            .embedded(state.space())?;
            Ok(Evaluation::scalars(
                fine_full.trace_product(&after).re,
                fine_full.trace_product(state.matrix()).re,
                tol,
            ))
        }
        W::Nonlocality { state, settings } => {
            let s = chsh_from_state(rule, state, settings, false)?;
            let mut e = Evaluation::scalars(s, 2.0, tol);
            e.violated = s <= 2.0 + tol;
            Ok(e)
        }
        W::Linearity { outcome, mixture } => {
            let direct = density(&rule.apply(outcome, &gemenge_density(mixture)?)?)?;
            let itemwise = density(&apply_gemenge(rule, outcome, mixture)?)?;
            Ok(Evaluation::compare(direct, itemwise, tol))
        }
        W::Choi { outcome, space } => {
            let dim = space.total_dim();
            let apply = |m: &ComplexMatrix| -> ComplexMatrix {
                QuantumState::new(space.clone(), m.clone())
                    .and_then(|s| rule.apply(outcome, &s))
                    .and_then(|g| density(&g))
                    .unwrap_or_else(|_| ComplexMatrix::zeros(dim))
            };
            outcome.check(space)?;
            let choi = choi_matrix(linear_extension(apply, dim), dim);
            let lam = min_eigenvalue(&choi);
            let mut e = Evaluation::scalars(lam.min(0.0), 0.0, tol);
            e.lhs = scalar(lam);
            Ok(e)
        }
        W::ObservableDefect { projectors } => {
            let obs = Observable::on(Target::Local(0), projectors.clone());
            match crate::state::observable_defect(&obs, tol) {
                Some(w) => Ok(Evaluation {
                    lhs: w.lhs,
                    rhs: w.rhs,
                    distance: w.distance,
                    violated: true,
                    strict: false,
                }),
                None => Ok(Evaluation::scalars(0.0, 0.0, tol)),
            }
        }
    }
}
