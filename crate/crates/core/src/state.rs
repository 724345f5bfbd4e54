//! Composite spaces, sub-normalized states, proper mixtures and outcomes.

use serde::{Deserialize, Serialize};

use crate::checks::{CheckResult, Scope, Verdict, Witness, WitnessInputs};
use crate::error::{GurError, Result};
use crate::linalg::{embed_local, is_psd, ComplexMatrix, C64};

/// Trace below which a state counts as the zero operator.
pub const TRACE_FLOOR: f64 = 1e-12;

/// Ordered subsystem dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CompositeSpace {
    dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(GurError::InvalidSpace("at least one subsystem is required".into()));
        }
        if dims.contains(&0) {
            return Err(GurError::InvalidSpace(format!("zero-dimensional subsystem in {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn is_composite(&self) -> bool {
        self.dims.len() > 1
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn subsystem_dim(&self, k: usize) -> Result<usize> {
        self.dims.get(k).copied().ok_or(GurError::SubsystemOutOfRange {
            index: k,
            count: self.dims.len(),
        })
    }

    /// The space left after tracing out subsystem `k`.
    pub fn without(&self, k: usize) -> Result<Self> {
        self.subsystem_dim(k)?;
        let dims: Vec<usize> = self.dims.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, d)| *d).collect();
        if dims.is_empty() {
            Self::new(vec![1])
        } else {
            Self::new(dims)
        }
    }
}

impl TryFrom<Vec<usize>> for CompositeSpace {
    type Error = GurError;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<CompositeSpace> for Vec<usize> {
    fn from(s: CompositeSpace) -> Self {
        s.dims
    }
}

impl std::fmt::Display for CompositeSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A sub-normalized density operator on a composite space.
///
/// Positivity and the trace bound are checked by [`QuantumState::validate`],
/// not at construction, so that malformed rule outputs can still be inspected.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    space: CompositeSpace,
    matrix: ComplexMatrix,
}

impl QuantumState {
    pub fn new(space: CompositeSpace, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != space.total_dim() {
            return Err(GurError::DimensionMismatch {
                expected: space.total_dim(),
                found: matrix.dim(),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn zero(space: CompositeSpace) -> Self {
        let matrix = ComplexMatrix::zeros(space.total_dim());
        Self { space, matrix }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace_re()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.scale(c),
        }
    }

    pub fn with_matrix(&self, matrix: ComplexMatrix) -> Result<Self> {
        Self::new(self.space.clone(), matrix)
    }

    /// PSD to `tol` with `0 ≤ Tr ≤ 1 + tol`.
    pub fn validate(&self, tol: f64) -> bool {
        let tr = self.trace();
        is_psd(&self.matrix, tol) && tr >= -tol && tr <= 1.0 + tol
    }
}

/// `s / Tr(s)`.
pub fn normalize(s: &QuantumState) -> Result<QuantumState> {
    let tr = s.trace();
    if tr <= TRACE_FLOOR {
        return Err(GurError::ZeroTrace);
    }
    Ok(s.scaled(1.0 / tr))
}

#[derive(Serialize, Deserialize)]
struct StateWire {
    dims: Vec<usize>,
    entries: Vec<[f64; 2]>,
}

impl Serialize for QuantumState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateWire {
            dims: self.space.dims.clone(),
            entries: self.matrix.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let wire = StateWire::deserialize(d)?;
        let space = CompositeSpace::new(wire.dims).map_err(D::Error::custom)?;
        let matrix = ComplexMatrix::from_row_major(wire.entries.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .map_err(D::Error::custom)?;
        QuantumState::new(space, matrix).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GemengeItem {
    pub weight: f64,
    pub state: QuantumState,
}

/// A proper mixture: the system was prepared in `state` with probability `weight`.
///
/// After a measurement the weights stay fixed and the states become
/// sub-normalized, so `Σ weight` is 1 only for fresh preparations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gemenge {
    items: Vec<GemengeItem>,
}

impl Gemenge {
    pub fn new(items: Vec<(f64, QuantumState)>) -> Result<Self> {
        if let Some((_, first)) = items.first() {
            if items.iter().any(|(_, s)| s.space() != first.space()) {
                return Err(GurError::MixedSpaces);
            }
        }
        if let Some((w, _)) = items.iter().find(|(w, _)| w.is_nan() || *w < 0.0) {
            return Err(GurError::InvalidParameter(format!("negative gemenge weight {w}")));
        }
        Ok(Self {
            items: items.into_iter().map(|(weight, state)| GemengeItem { weight, state }).collect(),
        })
    }

    /// The trivial mixture `{(1, ρ)}`.
    pub fn pure_preparation(state: QuantumState) -> Self {
        Self {
            items: vec![GemengeItem { weight: 1.0, state }],
        }
    }

    pub fn items(&self) -> &[GemengeItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn space(&self) -> Option<&CompositeSpace> {
        self.items.first().map(|i| i.state.space())
    }

    /// Concatenation of two mixtures on the same space.
    pub fn concat(&self, other: &Gemenge) -> Result<Self> {
        let mut items: Vec<(f64, QuantumState)> = self.items.iter().map(|i| (i.weight, i.state.clone())).collect();
        items.extend(other.items.iter().map(|i| (i.weight, i.state.clone())));
        Self::new(items)
    }

    /// Multiplies every weight by `c`.
    pub fn reweighted(&self, c: f64) -> Self {
        Self {
            items: self
                .items
                .iter()
                .map(|i| GemengeItem {
                    weight: i.weight * c,
                    state: i.state.clone(),
                })
                .collect(),
        }
    }

    /// Applies `f` to every state, keeping weights.
    pub fn map_states(&self, mut f: impl FnMut(&QuantumState) -> Result<QuantumState>) -> Result<Self> {
        let items = self
            .items
            .iter()
            .map(|i| Ok((i.weight, f(&i.state)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    pub(crate) fn from_items_unchecked(items: Vec<GemengeItem>) -> Self {
        Self { items }
    }

    /// `Σ p_i Tr(ρ_i)`
    pub fn total_trace(&self) -> f64 {
        self.items.iter().map(|i| i.weight * i.state.trace()).sum()
    }
}

/// `ρ_G = Σ p_i ρ_i`.
pub fn gemenge_density(g: &Gemenge) -> Result<QuantumState> {
    let space = g
        .space()
        .cloned()
        .ok_or_else(|| GurError::InvalidParameter("empty gemenge has no density".into()))?;
    let mut m = ComplexMatrix::zeros(space.total_dim());
    for item in g.items() {
        if item.state.space() != &space {
            return Err(GurError::MixedSpaces);
        }
        m.axpy(C64::new(item.weight, 0.0), item.state.matrix());
    }
    QuantumState::new(space, m)
}

/// Where a measurement acts: one subsystem, or the whole space at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Local(usize),
    Global,
}

/// A measurement outcome: a projector plus the device it was recorded on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub projector: ComplexMatrix,
    pub target: Target,
}

impl Outcome {
    pub fn local(projector: ComplexMatrix, target: usize) -> Self {
        Self {
            projector,
            target: Target::Local(target),
        }
    }

    pub fn global(projector: ComplexMatrix) -> Self {
        Self {
            projector,
            target: Target::Global,
        }
    }

    /// Checks the projector dimension against the space.
    pub fn check(&self, space: &CompositeSpace) -> Result<()> {
        let expected = match self.target {
            Target::Local(k) => space.subsystem_dim(k)?,
            Target::Global => space.total_dim(),
        };
        if self.projector.dim() != expected {
            return Err(GurError::DimensionMismatch {
                expected,
                found: self.projector.dim(),
            });
        }
        Ok(())
    }

    /// The projector acting on the full space (`P ⊗ I` for local outcomes).
    pub fn embedded(&self, space: &CompositeSpace) -> Result<ComplexMatrix> {
        self.check(space)?;
        match self.target {
            Target::Local(k) => embed_local(&self.projector, space, k),
            Target::Global => Ok(self.projector.clone()),
        }
    }

    /// The same projector recorded by a device acting on the whole space.
    pub fn globalized(&self, space: &CompositeSpace) -> Result<Self> {
        Ok(Self::global(self.embedded(space)?))
    }

    /// Born probability `Tr(Q ρ)`.
    pub fn probability(&self, state: &QuantumState) -> Result<f64> {
        Ok(self.embedded(state.space())?.trace_product(state.matrix()).re)
    }
}

/// A projective measurement on a single target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub outcomes: Vec<Outcome>,
}

impl Observable {
    pub fn new(outcomes: Vec<Outcome>) -> Self {
        Self { outcomes }
    }

    pub fn on(target: Target, projectors: Vec<ComplexMatrix>) -> Self {
        Self {
            outcomes: projectors.into_iter().map(|projector| Outcome { projector, target }).collect(),
        }
    }
}

/// Idempotence, mutual orthogonality and completeness, each to `tol`.
pub fn validate_observable(obs: &Observable, tol: f64) -> CheckResult {
    let failure = observable_defect(obs, tol);
    let verdict = if failure.is_some() { Verdict::Violated } else { Verdict::Holds };
    CheckResult {
        rule: "-".into(),
        check: "observable".into(),
        verdict,
        scope: Scope::SingleSystem,
        trials: 1,
        tol,
        seed: 0,
        witness: failure,
    }
}

pub(crate) fn observable_defect(obs: &Observable, tol: f64) -> Option<Witness> {
    let first = obs.outcomes.first()?;
    let dim = first.projector.dim();
    let inputs = WitnessInputs::ObservableDefect {
        projectors: obs.outcomes.iter().map(|o| o.projector.clone()).collect(),
    };
    let fail = |lhs: ComplexMatrix, rhs: ComplexMatrix| {
        let distance = lhs.distance(&rhs);
        Some(Witness {
            inputs: inputs.clone(),
            lhs,
            rhs,
            distance,
        })
    };
    if obs.outcomes.iter().any(|o| o.target != first.target || o.projector.dim() != dim) {
        return fail(ComplexMatrix::identity(1), ComplexMatrix::zeros(1));
    }
    for o in &obs.outcomes {
        let p = &o.projector;
        if !p.is_projector(tol) {
            return fail(p.matmul(p), p.clone());
        }
    }
    for (x, a) in obs.outcomes.iter().enumerate() {
        for b in &obs.outcomes[x + 1..] {
            let prod = a.projector.matmul(&b.projector);
            if prod.max_abs() > tol {
                return fail(prod, ComplexMatrix::zeros(dim));
            }
        }
    }
    let mut sum = ComplexMatrix::zeros(dim);
    for o in &obs.outcomes {
        sum = &sum + &o.projector;
    }
    let id = ComplexMatrix::identity(dim);
    if sum.distance(&id) > tol {
        return fail(sum, id);
    }
    None
}
