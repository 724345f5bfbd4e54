//! Scripted reproductions: the two verdict tables, the exact counterexamples,
//! CHSH values and the coherence theorems.

mod counterexamples;
mod tables;
mod theorems;

pub use counterexamples::{counterexample, CounterexampleRecord, COUNTEREXAMPLES};
pub use tables::{
    expected_profile, reproduce, reproduce_table1, reproduce_table2, Cell, Golden, Mismatch, TableMetadata, TableReport,
    TABLE1_COLUMNS, TABLE2_COLUMNS,
};
pub use theorems::{verify_lemma1, verify_theorem1, verify_theorem2, Finding, TheoremReport, THEOREM1_TRIALS};

use serde::{Deserialize, Serialize};

use crate::checks::{chsh_from_state, run_check, singlet_state, CheckConfig, CheckId, ChshSettings, Verdict};
use crate::error::Result;
use crate::rules::UpdateRule;
use crate::state::CompositeSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub rule: String,
    /// A measured before B.
    pub s: f64,
    /// B measured before A.
    pub s_reversed: f64,
    /// Local commutativity fails, so neither value is the rule's CHSH value.
    pub order_dependent: bool,
}

/// CHSH value on the singlet at the standard angles, for both measurement orders.
pub fn chsh(rule: &dyn UpdateRule, cfg: &CheckConfig) -> Result<ChshReport> {
    let settings = ChshSettings::default();
    let state = singlet_state();
    let premise = CheckConfig {
        dims: vec![CompositeSpace::new(vec![2, 2])?],
        ..cfg.clone()
    };
    let a6 = run_check(rule, CheckId::A6, &premise)?;
    Ok(ChshReport {
        rule: rule.name(),
        s: chsh_from_state(rule, &state, &settings, false)?,
        s_reversed: chsh_from_state(rule, &state, &settings, true)?,
        order_dependent: a6.verdict == Verdict::Violated,
    })
}
