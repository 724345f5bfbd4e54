//! Randomized certification of the requirements and operational properties.
//!
//! A `holds` verdict means no violation was found in the trials run; a
//! `violated` verdict always ships a witness that can be replayed.

pub mod chsh;
mod scenarios;
mod witness;

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GurError, Result};
use crate::linalg::{ComplexMatrix, Seed};
use crate::rules::{parse_rule, UpdateRule};
use crate::state::CompositeSpace;

pub use chsh::{chsh_from_state, correlator, singlet_state, spin_projectors, ChshSettings};
pub use scenarios::{probes, sample, sample_choi};
pub use witness::{evaluate, Evaluation, WitnessInputs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub trials: usize,
    pub dims: Vec<CompositeSpace>,
    pub tol: f64,
    pub seed: Seed,
}

impl Default for CheckConfig {
    fn default() -> Self {
        let space = |d: &[usize]| CompositeSpace::new(d.to_vec()).expect("static space");
        Self {
            trials: 200,
            dims: vec![space(&[2, 2]), space(&[2, 3]), space(&[2, 2, 2])],
            tol: 1e-9,
            seed: Seed(42),
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(GurError::InvalidParameter("trials must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(GurError::InvalidParameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.dims.is_empty() {
            return Err(GurError::InvalidParameter("at least one space is required".into()));
        }
        Ok(())
    }

    /// One single-system space per distinct subsystem dimension.
    pub fn single_spaces(&self) -> Vec<CompositeSpace> {
        let mut dims: Vec<usize> = self.dims.iter().flat_map(|s| s.dims().iter().copied()).collect();
        dims.sort_unstable();
        dims.dedup();
        dims.into_iter()
            .map(|d| CompositeSpace::single(d).expect("positive dimension"))
            .collect()
    }

    pub fn composite_spaces(&self, min_parties: usize) -> Vec<CompositeSpace> {
        self.dims.iter().filter(|s| s.len() >= min_parties).cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    SingleSystem,
    Composite,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: WitnessInputs,
    pub lhs: ComplexMatrix,
    pub rhs: ComplexMatrix,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub rule: String,
    pub check: String,
    pub verdict: Verdict,
    pub scope: Scope,
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    pub witness: Option<Witness>,
}

impl CheckResult {
    /// Table glyph: ✗ when violated, (✓) when only single systems pass, ✓ otherwise.
    pub fn glyph(&self) -> &'static str {
        match (self.verdict, self.scope, &self.witness) {
            (Verdict::Violated, ..) => "✗",
            (Verdict::NotApplicable, ..) => "n/a",
            (Verdict::Holds, Scope::SingleSystem, Some(_)) => "(✓)",
            (Verdict::Holds, ..) => "✓",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckId {
    Born,
    Homogeneity,
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    DetRepeatability,
    PrepIndistinguishability,
    CompositionCompat,
    Ideality,
    LocalTomography,
    Coherence,
    Nonlocality,
    CompletePositivity,
    WeakRepeatability,
}

/// Where a check is evaluated and how a composite-only failure is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Plan {
    SingleOnly,
    CompositeOnly { min_parties: usize },
    /// Both scopes; any failure is a violation.
    BothStrict,
    /// Both scopes; a composite-only failure is reported as a single-system pass.
    BothLenient,
}

impl CheckId {
    pub const ALL: [CheckId; 17] = [
        CheckId::Born,
        CheckId::Homogeneity,
        CheckId::A1,
        CheckId::A2,
        CheckId::A3,
        CheckId::A4,
        CheckId::A5,
        CheckId::A6,
        CheckId::DetRepeatability,
        CheckId::PrepIndistinguishability,
        CheckId::CompositionCompat,
        CheckId::Ideality,
        CheckId::LocalTomography,
        CheckId::Coherence,
        CheckId::Nonlocality,
        CheckId::CompletePositivity,
        CheckId::WeakRepeatability,
    ];

    pub const AXIOMS: [CheckId; 6] = [CheckId::A1, CheckId::A2, CheckId::A3, CheckId::A4, CheckId::A5, CheckId::A6];

    /// Operational properties in table order.
    pub const PROPERTIES: [CheckId; 9] = [
        CheckId::DetRepeatability,
        CheckId::PrepIndistinguishability,
        CheckId::CompositionCompat,
        CheckId::Ideality,
        CheckId::LocalTomography,
        CheckId::Coherence,
        CheckId::Nonlocality,
        CheckId::CompletePositivity,
        CheckId::WeakRepeatability,
    ];

    pub fn id(self) -> &'static str {
        match self {
            CheckId::Born => "born",
            CheckId::Homogeneity => "homogeneity",
            CheckId::A1 => "A1",
            CheckId::A2 => "A2",
            CheckId::A3 => "A3",
            CheckId::A4 => "A4",
            CheckId::A5 => "A5",
            CheckId::A6 => "A6",
            CheckId::DetRepeatability => "det-repeatability",
            CheckId::PrepIndistinguishability => "prep-indistinguishability",
            CheckId::CompositionCompat => "composition-compatibility",
            CheckId::Ideality => "ideality",
            CheckId::LocalTomography => "local-tomography",
            CheckId::Coherence => "coherence",
            CheckId::Nonlocality => "nonlocality",
            CheckId::CompletePositivity => "complete-positivity",
            CheckId::WeakRepeatability => "weak-repeatability",
        }
    }

    fn plan(self) -> Plan {
        match self {
            CheckId::Born
            | CheckId::Homogeneity
            | CheckId::A1
            | CheckId::A2
            | CheckId::A3
            | CheckId::CompletePositivity => Plan::BothStrict,
            CheckId::A4 => Plan::CompositeOnly { min_parties: 3 },
            CheckId::A5
            | CheckId::A6
            | CheckId::CompositionCompat
            | CheckId::LocalTomography
            | CheckId::Nonlocality => Plan::CompositeOnly { min_parties: 2 },
            CheckId::Coherence => Plan::SingleOnly,
            CheckId::DetRepeatability
            | CheckId::PrepIndistinguishability
            | CheckId::Ideality
            | CheckId::WeakRepeatability => Plan::BothLenient,
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for CheckId {
    type Err = GurError;
    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| GurError::UnknownCheck(s.to_string()))
    }
}

/// Trials are evaluated in parallel chunks of this size; the first violation
/// in index order wins.
const CHUNK: usize = 32;

#[derive(Debug, Default)]
struct ScopeRun {
    evaluated: usize,
    violation: Option<Witness>,
    strict_seen: bool,
    /// First scenario whose outcome was neither impossible nor certain.
    first_nontrivial: Option<Witness>,
}

fn witness_of(inputs: WitnessInputs, e: Evaluation) -> Witness {
    Witness {
        inputs,
        lhs: e.lhs,
        rhs: e.rhs,
        distance: e.distance,
    }
}

fn run_scenarios<G>(
    rule: &dyn UpdateRule,
    fixed: Vec<WitnessInputs>,
    spaces: &[CompositeSpace],
    trials: usize,
    stream: &str,
    cfg: &CheckConfig,
    generate: G,
) -> Result<ScopeRun>
where
    G: Fn(&CompositeSpace, &mut ChaCha8Rng, usize) -> WitnessInputs + Sync,
{
    let total = fixed.len() + if spaces.is_empty() { 0 } else { trials };
    let mut run = ScopeRun::default();
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let chunk: Vec<Result<(WitnessInputs, Evaluation)>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let inputs = if i < fixed.len() {
                    fixed[i].clone()
                } else {
                    let t = i - fixed.len();
                    let mut rng = cfg.seed.derive(stream, t as u64).rng();
                    generate(&spaces[t % spaces.len()], &mut rng, t)
                };
                let e = evaluate(rule, &inputs, cfg.tol)?;
                Ok((inputs, e))
            })
            .collect();
        for r in chunk {
            let (inputs, e) = r?;
            run.evaluated += 1;
            run.strict_seen |= e.strict;
            if e.violated {
                run.violation = Some(witness_of(inputs, e));
                return Ok(run);
            }
            if run.first_nontrivial.is_none() {
                let p = e.rhs.get(0, 0).re;
                if e.rhs.dim() == 1 && p > cfg.tol && p < 1.0 - cfg.tol {
                    run.first_nontrivial = Some(witness_of(inputs, e));
                }
            }
        }
        start = end;
    }
    Ok(run)
}

fn run_scope(rule: &dyn UpdateRule, check: CheckId, composite: bool, spaces: &[CompositeSpace], cfg: &CheckConfig) -> Result<ScopeRun> {
    let tag = if composite { "composite" } else { "single" };
    let stream = format!("{check}/{tag}");
    let mut run = run_scenarios(
        rule,
        probes(check, rule, composite),
        spaces,
        cfg.trials,
        &stream,
        cfg,
        |space, rng, t| sample(check, rule, space, rng, t),
    )?;
    if check == CheckId::WeakRepeatability && run.violation.is_none() && !run.strict_seen {
        // Never strictly better: report the first informative comparison.
        run.violation = run.first_nontrivial.take();
    }
    Ok(run)
}

fn result(rule: &dyn UpdateRule, check: CheckId, cfg: &CheckConfig, verdict: Verdict, scope: Scope, trials: usize, witness: Option<Witness>) -> CheckResult {
    CheckResult {
        rule: rule.name(),
        check: check.id().to_string(),
        verdict,
        scope,
        trials,
        tol: cfg.tol,
        seed: cfg.seed.0,
        witness,
    }
}

/// Runs one check against `rule`.
pub fn run_check(rule: &dyn UpdateRule, check: CheckId, cfg: &CheckConfig) -> Result<CheckResult> {
    cfg.validate()?;
    match check {
        CheckId::CompletePositivity => return complete_positivity(rule, cfg),
        CheckId::Nonlocality => return nonlocality(rule, cfg),
        CheckId::LocalTomography => {
            let a6 = run_check(rule, CheckId::A6, cfg)?;
            if a6.verdict == Verdict::Violated {
                return Ok(result(rule, check, cfg, Verdict::NotApplicable, Scope::Composite, 0, None));
            }
        }
        _ => {}
    }
    let singles = cfg.single_spaces();
    match check.plan() {
        Plan::SingleOnly => {
            let s = run_scope(rule, check, false, &singles, cfg)?;
            let verdict = if s.violation.is_some() { Verdict::Violated } else { Verdict::Holds };
            Ok(result(rule, check, cfg, verdict, Scope::SingleSystem, s.evaluated, s.violation))
        }
        Plan::CompositeOnly { min_parties } => {
            let spaces = cfg.composite_spaces(min_parties);
            if spaces.is_empty() {
                return Ok(result(rule, check, cfg, Verdict::NotApplicable, Scope::Composite, 0, None));
            }
            let c = run_scope(rule, check, true, &spaces, cfg)?;
            let verdict = if c.violation.is_some() { Verdict::Violated } else { Verdict::Holds };
            Ok(result(rule, check, cfg, verdict, Scope::Composite, c.evaluated, c.violation))
        }
        plan @ (Plan::BothStrict | Plan::BothLenient) => {
            let s = run_scope(rule, check, false, &singles, cfg)?;
            if s.violation.is_some() {
                return Ok(result(rule, check, cfg, Verdict::Violated, Scope::SingleSystem, s.evaluated, s.violation));
            }
            let composites = cfg.composite_spaces(2);
            if composites.is_empty() {
                return Ok(result(rule, check, cfg, Verdict::Holds, Scope::SingleSystem, s.evaluated, None));
            }
            let c = run_scope(rule, check, true, &composites, cfg)?;
            let n = s.evaluated + c.evaluated;
            Ok(match (c.violation, plan) {
                (None, _) => result(rule, check, cfg, Verdict::Holds, Scope::Both, n, None),
                (Some(w), Plan::BothLenient) => result(rule, check, cfg, Verdict::Holds, Scope::SingleSystem, n, Some(w)),
                (Some(w), _) => result(rule, check, cfg, Verdict::Violated, Scope::Composite, n, Some(w)),
            })
        }
    }
}

/// Convex-linearity first; the Choi matrix is only meaningful for linear maps.
fn complete_positivity(rule: &dyn UpdateRule, cfg: &CheckConfig) -> Result<CheckResult> {
    let check = CheckId::CompletePositivity;
    let scopes = [(false, cfg.single_spaces()), (true, cfg.composite_spaces(2))];
    let mut n = 0;
    for (composite, spaces) in &scopes {
        if spaces.is_empty() {
            continue;
        }
        let run = run_scope(rule, check, *composite, spaces, cfg)?;
        n += run.evaluated;
        if let Some(w) = run.violation {
            let scope = if *composite { Scope::Composite } else { Scope::SingleSystem };
            return Ok(result(rule, check, cfg, Verdict::Violated, scope, n, Some(w)));
        }
    }
    for (composite, spaces) in &scopes {
        if spaces.is_empty() {
            continue;
        }
        let tag = if *composite { "composite" } else { "single" };
        let run = run_scenarios(rule, Vec::new(), spaces, cfg.trials, &format!("{check}/choi/{tag}"), cfg, |space, rng, _| {
            sample_choi(space, rng)
        })?;
        n += run.evaluated;
        if let Some(w) = run.violation {
            let scope = if *composite { Scope::Composite } else { Scope::SingleSystem };
            return Ok(result(rule, check, cfg, Verdict::Violated, scope, n, Some(w)));
        }
    }
    let scope = if scopes[1].1.is_empty() { Scope::SingleSystem } else { Scope::Both };
    Ok(result(rule, check, cfg, Verdict::Holds, scope, n, None))
}

/// CHSH on the singlet; only meaningful when local measurements commute.
fn nonlocality(rule: &dyn UpdateRule, cfg: &CheckConfig) -> Result<CheckResult> {
    let check = CheckId::Nonlocality;
    let a6 = run_check(rule, CheckId::A6, &chsh_premise_config(cfg))?;
    if a6.verdict == Verdict::Violated {
        return Ok(result(rule, check, cfg, Verdict::NotApplicable, Scope::Composite, 0, None));
    }
    let inputs = WitnessInputs::Nonlocality {
        state: singlet_state(),
        settings: ChshSettings::default(),
    };
    let e = evaluate(rule, &inputs, cfg.tol)?;
    let (verdict, witness) = if e.violated {
        (Verdict::Violated, Some(witness_of(inputs, e)))
    } else {
        (Verdict::Holds, None)
    };
    Ok(result(rule, check, cfg, verdict, Scope::Composite, 1, witness))
}

/// Local commutativity is checked on the qubit pair the CHSH test uses.
fn chsh_premise_config(cfg: &CheckConfig) -> CheckConfig {
    CheckConfig {
        dims: vec![CompositeSpace::new(vec![2, 2]).expect("static space")],
        ..cfg.clone()
    }
}

/// Runs every check in a fixed order.
pub fn run_all(rule: &dyn UpdateRule, cfg: &CheckConfig) -> Result<Vec<CheckResult>> {
    CheckId::ALL.iter().map(|&c| run_check(rule, c, cfg)).collect()
}

/// Recomputes a result's witness from its serialized inputs and returns the distance.
pub fn replay(res: &CheckResult) -> Result<f64> {
    let w = res
        .witness
        .as_ref()
        .ok_or_else(|| GurError::Replay(format!("{} / {} has no witness", res.rule, res.check)))?;
    let e = match &w.inputs {
        WitnessInputs::ObservableDefect { .. } => evaluate(&crate::rules::CatalogRule::Luders, &w.inputs, res.tol)?,
        inputs => evaluate(parse_rule(&res.rule)?.as_ref(), inputs, res.tol)?,
    };
    Ok(e.distance)
}
