//! The update-rule contract, Gemenge bookkeeping and the rule registry.

mod catalog;
mod refine;

pub use catalog::{CatalogRule, Reference};
pub use refine::refine_projector;

use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::state::{Gemenge, GemengeItem, Outcome, QuantumState};

/// A state-update rule: outcome and pre-measurement state in, proper mixture out.
///
/// Outputs are sub-normalized; their total trace carries the outcome probability.
pub trait UpdateRule: Send + Sync + std::fmt::Debug {
    /// Registry name, e.g. `lambda:0.25`.
    fn name(&self) -> String;

    fn apply(&self, outcome: &Outcome, state: &QuantumState) -> Result<Gemenge>;

    /// The same rule as seen from a frame rotated by `frame` on the measured
    /// subsystem. `None` means the rule carries no frame-dependent context.
    fn reframed(&self, _frame: &ComplexMatrix) -> Option<Box<dyn UpdateRule>> {
        None
    }

    /// Registry names of equally admissible choices of the rule's extra
    /// context. Empty for rules whose output depends only on outcome and state.
    fn alternative_contexts(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Applies `rule` to every item of `g`; weights multiply when the rule itself
/// returns several items.
pub fn apply_gemenge(rule: &dyn UpdateRule, outcome: &Outcome, g: &Gemenge) -> Result<Gemenge> {
    let mut items = Vec::new();
    for item in g.items() {
        let out = rule.apply(outcome, &item.state)?;
        for o in out.items() {
            items.push(GemengeItem {
                weight: item.weight * o.weight,
                state: o.state.clone(),
            });
        }
    }
    Ok(Gemenge::from_items_unchecked(items))
}

/// Left-to-right fold of [`apply_gemenge`].
pub fn apply_sequence(rule: &dyn UpdateRule, outcomes: &[Outcome], g: &Gemenge) -> Result<Gemenge> {
    outcomes.iter().try_fold(g.clone(), |acc, o| apply_gemenge(rule, o, &acc))
}

/// Looks a rule up by registry name.
pub fn parse_rule(name: &str) -> Result<Box<dyn UpdateRule>> {
    Ok(Box::new(name.parse::<CatalogRule>()?))
}

/// Names accepted by [`parse_rule`]; parameterized entries show their placeholder.
pub const REGISTRY: &[&str] = &[
    "luders",
    "loc-luders",
    "passive",
    "dep",
    "lambda:<λ>",
    "cc-dep",
    "cc-lambda:<λ>",
    "mu:<μ>",
    "von-neumann",
    "unitary-kick",
];

/// Representatives of every catalog rule, as used by the theorem checks.
pub fn catalog() -> Vec<CatalogRule> {
    vec![
        CatalogRule::Luders,
        CatalogRule::LocLuders,
        CatalogRule::Passive,
        CatalogRule::Dep,
        CatalogRule::Lambda(0.25),
        CatalogRule::Lambda(0.0),
        CatalogRule::CcDep,
        CatalogRule::CcLambda(0.5),
        CatalogRule::Mu(0.5),
        CatalogRule::von_neumann(Reference::Computational),
        CatalogRule::UnitaryKick,
    ]
}
