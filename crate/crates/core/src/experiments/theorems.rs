//! Catalog-restricted verification of the coherence results.
//!
//! Universal statements over all update rules cannot be checked numerically;
//! these functions verify them over `rules::catalog()` together with a
//! randomized coherence certificate for Lüders.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::checks::{run_check, CheckConfig, CheckId, CheckResult, Scope, Verdict, Witness};
use crate::error::Result;
use crate::linalg::{random_density_with, random_projector_with};
use crate::rules::{catalog, CatalogRule, UpdateRule};
use crate::state::{gemenge_density, CompositeSpace, Outcome, QuantumState};

/// Coherence trials per dimension for the Lüders certificate.
pub const THEOREM1_TRIALS: usize = 1000;

/// Random single-system inputs used to decide whether a rule coincides with Lüders.
const COINCIDENCE_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub rule: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub result: CheckResult,
    pub findings: Vec<Finding>,
}

fn report(name: &str, cfg: &CheckConfig, trials: usize, findings: Vec<Finding>, witness: Option<Witness>) -> TheoremReport {
    let holds = findings.iter().all(|f| f.holds);
    TheoremReport {
        result: CheckResult {
            rule: "catalog".into(),
            check: name.into(),
            verdict: if holds { Verdict::Holds } else { Verdict::Violated },
            scope: Scope::SingleSystem,
            trials,
            tol: cfg.tol,
            seed: cfg.seed.0,
            witness: if holds { None } else { witness },
        },
        findings,
    }
}

/// Coherent catalog rules must be deterministically repeatable and ideal.
pub fn verify_lemma1(cfg: &CheckConfig) -> Result<TheoremReport> {
    let mut findings = Vec::new();
    let mut trials = 0;
    let mut witness = None;
    for rule in catalog() {
        let coherence = run_check(&rule, CheckId::Coherence, cfg)?;
        trials += coherence.trials;
        if coherence.verdict != Verdict::Holds {
            findings.push(Finding {
                rule: rule.name(),
                holds: true,
                detail: "not coherent".into(),
            });
            continue;
        }
        let mut failed = Vec::new();
        for check in [CheckId::DetRepeatability, CheckId::Ideality] {
            let r = run_check(&rule, check, cfg)?;
            trials += r.trials;
            if r.verdict != Verdict::Holds {
                failed.push(check.id());
                witness = witness.or(r.witness);
            }
        }
        findings.push(Finding {
            rule: rule.name(),
            holds: failed.is_empty(),
            detail: if failed.is_empty() {
                "coherent, repeatable and ideal".into()
            } else {
                format!("coherent but fails {}", failed.join(", "))
            },
        });
    }
    Ok(report("lemma-1", cfg, trials, findings, witness))
}

/// Whether `rule` and Lüders give the same post-measurement density on random
/// single-system inputs of dimension 2 to 4.
fn coincides_with_luders(rule: &dyn UpdateRule, cfg: &CheckConfig) -> Result<bool> {
    for t in 0..COINCIDENCE_TRIALS {
        let mut rng = cfg.seed.derive("theorem-1/coincidence", t as u64).rng();
        let d = 2 + t % 3;
        let rank = rng.random_range(1..=d);
        let p = random_projector_with(&mut rng, d, rank);
        let state_rank = rng.random_range(1..=d);
        let rho = QuantumState::new(CompositeSpace::single(d)?, random_density_with(&mut rng, d, state_rank))?;
        let outcome = Outcome::local(p, 0);
        let a = gemenge_density(&rule.apply(&outcome, &rho)?)?;
        let b = gemenge_density(&CatalogRule::Luders.apply(&outcome, &rho)?)?;
        if a.matrix().distance(b.matrix()) > cfg.tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lüders is coherent on dimensions 2 to 4, and every other catalog rule either
/// coincides with it on single systems or has a coherence witness.
pub fn verify_theorem1(cfg: &CheckConfig) -> Result<TheoremReport> {
    let mut findings = Vec::new();
    let mut trials = 0;
    let mut witness = None;
    for d in 2..=4 {
        let sub = CheckConfig {
            dims: vec![CompositeSpace::single(d)?],
            trials: cfg.trials.max(THEOREM1_TRIALS),
            ..cfg.clone()
        };
        let r = run_check(&CatalogRule::Luders, CheckId::Coherence, &sub)?;
        trials += r.trials;
        findings.push(Finding {
            rule: "luders".into(),
            holds: r.verdict == Verdict::Holds,
            detail: format!("coherence at d={d}: {} trials, {:?}", r.trials, r.verdict),
        });
        witness = witness.or(r.witness);
    }
    for rule in catalog().into_iter().filter(|r| *r != CatalogRule::Luders) {
        if coincides_with_luders(&rule, cfg)? {
            trials += COINCIDENCE_TRIALS;
            findings.push(Finding {
                rule: rule.name(),
                holds: true,
                detail: "coincides with Lüders on single systems".into(),
            });
            continue;
        }
        let r = run_check(&rule, CheckId::Coherence, cfg)?;
        trials += r.trials;
        findings.push(Finding {
            rule: rule.name(),
            holds: r.verdict == Verdict::Violated,
            detail: match &r.witness {
                Some(w) => format!("coherence witness at distance {:.3e}", w.distance),
                None => "no coherence witness found".into(),
            },
        });
    }
    Ok(report("theorem-1", cfg, trials, findings, witness))
}

/// Within the catalog, only Lüders is both coherent and composition compatible,
/// and locally-Lüders shows coherence alone does not suffice.
pub fn verify_theorem2(cfg: &CheckConfig) -> Result<TheoremReport> {
    let mut findings = Vec::new();
    let mut trials = 0;
    for rule in catalog() {
        let coherence = run_check(&rule, CheckId::Coherence, cfg)?;
        let cc = run_check(&rule, CheckId::CompositionCompat, cfg)?;
        trials += coherence.trials + cc.trials;
        let both = coherence.verdict == Verdict::Holds && cc.verdict == Verdict::Holds;
        let expected_both = rule == CatalogRule::Luders;
        let mut holds = both == expected_both;
        if rule == CatalogRule::LocLuders {
            holds &= coherence.verdict == Verdict::Holds && cc.verdict == Verdict::Violated;
        }
        findings.push(Finding {
            rule: rule.name(),
            holds,
            detail: format!("coherence {:?}, composition compatibility {:?}", coherence.verdict, cc.verdict),
        });
    }
    Ok(report("theorem-2", cfg, trials, findings, None))
}
