//! Acceptance criteria 1–9, one PASS/FAIL line each.
//!
//! Criterion 2 fails on one cell: the expected glyph for (A6, cc-dep) is ✓ but
//! the two measurement orders give different densities, and the engine reports
//! ✗ with a replayable witness. The test asserts that this is the only
//! failure and that it is exactly that cell.

use std::process::Command;
use std::time::{Duration, Instant};

use gur_core::checks::{replay, run_all, run_check, CheckConfig, CheckId, Scope, Verdict};
use gur_core::experiments::{
    chsh, counterexample, reproduce_table1, reproduce_table2, verify_lemma1, verify_theorem1, verify_theorem2, TableReport,
    COUNTEREXAMPLES, THEOREM1_TRIALS,
};
use gur_core::linalg::{random_density, random_projector, Seed};
use gur_core::rules::{catalog, parse_rule, UpdateRule};
use gur_core::state::{gemenge_density, CompositeSpace, Outcome, QuantumState};

const RUNTIME_BUDGET: Duration = Duration::from_secs(60);
const KNOWN_TABLE2_MISMATCH: &str = "A6 / cc-dep: expected ✓, found ✗";

struct Criterion {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn gur(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gur"))
        .args(args)
        .env_remove("GUR_SEED")
        .output()
        .expect("gur runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn table_criterion(id: u8, table: &str, cells: usize) -> Criterion {
    let start = Instant::now();
    let (code, stdout, stderr) = gur(&["table", table, "--seed", "42", "--tol", "1e-9", "--format", "json"]);
    let elapsed = start.elapsed();
    let report: Option<TableReport> = serde_json::from_str(&stdout).ok();
    let count = report.as_ref().map_or(0, |r| r.cells.iter().map(Vec::len).sum());
    let mismatches: Vec<&str> = stderr.lines().filter(|l| l.starts_with("  ")).map(str::trim).collect();
    Criterion {
        id,
        name: if id == 1 { "Table 1 reproduction" } else { "Table 2 reproduction" },
        pass: code == 0 && count == cells && elapsed < RUNTIME_BUDGET,
        detail: format!(
            "exit {code}, {count}/{cells} cells, {} differing, {:.2?}{}",
            mismatches.len(),
            elapsed,
            if mismatches.is_empty() { String::new() } else { format!(": {}", mismatches.join("; ")) }
        ),
    }
}

fn criterion3() -> Criterion {
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for name in COUNTEREXAMPLES {
        let rec = counterexample(name, 0.5).unwrap();
        worst = worst.max(rec.distance);
        pass &= rec.matches && rec.distance <= 1e-9;
        pass &= gur(&["counterexample", name, "--mu", "0.5"]).0 == 0;
    }
    Criterion {
        id: 3,
        name: "Exact counterexamples",
        pass,
        detail: format!("max deviation {worst:.1e}"),
    }
}

fn criterion4(cfg: &CheckConfig) -> Criterion {
    let reports = [verify_lemma1(cfg).unwrap(), verify_theorem1(cfg).unwrap(), verify_theorem2(cfg).unwrap()];
    let mut pass = reports.iter().all(|r| r.result.verdict == Verdict::Holds);
    for d in 2..=4 {
        let sub = CheckConfig {
            dims: vec![CompositeSpace::single(d).unwrap()],
            trials: THEOREM1_TRIALS,
            ..cfg.clone()
        };
        let r = run_check(parse_rule("luders").unwrap().as_ref(), CheckId::Coherence, &sub).unwrap();
        pass &= r.verdict == Verdict::Holds && r.trials >= THEOREM1_TRIALS;
    }
    let witnesses = reports[1]
        .findings
        .iter()
        .filter(|f| f.rule != "luders" && !f.detail.contains("coincides"))
        .count();
    let coincide: Vec<&str> = reports[1]
        .findings
        .iter()
        .filter(|f| f.detail.contains("coincides"))
        .map(|f| f.rule.as_str())
        .collect();
    pass &= coincide == ["loc-luders", "lambda:0"];
    Criterion {
        id: 4,
        name: "Theorem suite",
        pass,
        detail: format!(
            "lemma-1 {:?}, theorem-1 {:?}, theorem-2 {:?}; {witnesses} coherence witnesses; coincide: {}",
            reports[0].result.verdict,
            reports[1].result.verdict,
            reports[2].result.verdict,
            coincide.join(", ")
        ),
    }
}

fn criterion5(cfg: &CheckConfig) -> Criterion {
    let s = |name: &str| chsh(parse_rule(name).unwrap().as_ref(), cfg).unwrap().s;
    let tsirelson = 2.0 * 2f64.sqrt();
    let (l, ll, p, d) = (s("luders"), s("loc-luders"), s("passive"), s("dep"));
    Criterion {
        id: 5,
        name: "CHSH",
        pass: (l - tsirelson).abs() <= 1e-6 && ll <= 2.0 + 1e-9 && p <= 2.0 + 1e-9 && (d - tsirelson).abs() <= 1e-6,
        detail: format!("luders {l:.6}, loc-luders {ll:.6}, passive {p:.6}, dep {d:.6}"),
    }
}

fn criterion6(cfg: &CheckConfig) -> Criterion {
    let mut pass = true;
    let mut trials = 0;
    for name in ["luders", "loc-luders", "passive", "dep", "lambda:0.25"] {
        let rule = parse_rule(name).unwrap();
        for check in [CheckId::Born, CheckId::Homogeneity] {
            let r = run_check(rule.as_ref(), check, cfg).unwrap();
            trials += r.trials;
            pass &= r.verdict == Verdict::Holds && r.scope == Scope::Both;
        }
    }
    Criterion {
        id: 6,
        name: "Definition-1 certificate",
        pass,
        detail: format!("{trials} trials over 5 rules on [2,2], [2,3], [2,2,2]"),
    }
}

fn density(rule: &dyn UpdateRule, outcome: &Outcome, rho: &QuantumState) -> gur_core::linalg::ComplexMatrix {
    gemenge_density(&rule.apply(outcome, rho).unwrap()).unwrap().into_matrix()
}

fn criterion7() -> Criterion {
    let (l0, locl, l1, passive) = (
        parse_rule("lambda:0").unwrap(),
        parse_rule("loc-luders").unwrap(),
        parse_rule("lambda:1").unwrap(),
        parse_rule("passive").unwrap(),
    );
    let spaces = [vec![2, 2], vec![2, 3], vec![2, 2, 2]];
    let (mut worst0, mut worst1): (f64, f64) = (0.0, 0.0);
    for t in 0..100u64 {
        let seed = Seed(7).derive("acceptance/lambda", t);
        let dims = &spaces[t as usize % spaces.len()];
        let space = CompositeSpace::new(dims.clone()).unwrap();
        let total = space.total_dim();
        let rho = QuantumState::new(space, random_density(total, 1 + t as usize % total, seed.derive("rho", 0))).unwrap();
        let k = t as usize % dims.len();
        let outcome = if t % 4 == 3 {
            Outcome::global(random_projector(total, 2, seed.derive("p", 0)))
        } else {
            Outcome::local(random_projector(dims[k], 1, seed.derive("p", 0)), k)
        };
        worst0 = worst0.max(density(l0.as_ref(), &outcome, &rho).distance(&density(locl.as_ref(), &outcome, &rho)));

        let d = 2 + t as usize % 3;
        let single = QuantumState::new(CompositeSpace::single(d).unwrap(), random_density(d, d, seed.derive("single", 0))).unwrap();
        let p = Outcome::local(random_projector(d, 1 + t as usize % (d - 1), seed.derive("q", 0)), 0);
        worst1 = worst1.max(density(l1.as_ref(), &p, &single).distance(&density(passive.as_ref(), &p, &single)));
    }
    Criterion {
        id: 7,
        name: "λ-family endpoints",
        pass: worst0 <= 1e-9 && worst1 <= 1e-9,
        detail: format!("λ=0 vs loc-luders {worst0:.1e}, λ=1 vs passive {worst1:.1e} over 100 inputs"),
    }
}

fn criterion8(cfg: &CheckConfig) -> Criterion {
    let mut replayed = 0;
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for rule in catalog() {
        for r in run_all(&rule, cfg).unwrap() {
            if r.verdict != Verdict::Violated {
                continue;
            }
            let Some(w) = &r.witness else {
                pass = false;
                continue;
            };
            let json = serde_json::to_string(&r).unwrap();
            let back = serde_json::from_str(&json).unwrap();
            let d = replay(&back).unwrap();
            worst = worst.max((d - w.distance).abs());
            replayed += 1;
        }
    }
    pass &= worst <= 1e-10 && replayed > 0;
    Criterion {
        id: 8,
        name: "Witness replay",
        pass,
        detail: format!("{replayed} violated verdicts replayed, max drift {worst:.1e}"),
    }
}

fn criterion9() -> Criterion {
    let args = ["table", "1", "--seed", "42", "--format", "json"];
    let (a, b) = (gur(&args), gur(&args));
    Criterion {
        id: 9,
        name: "Determinism",
        pass: a.0 == 0 && a.1 == b.1 && !a.1.is_empty(),
        detail: format!("{} bytes, identical: {}", a.1.len(), a.1 == b.1),
    }
}

#[test]
fn acceptance() {
    let cfg = CheckConfig::default();
    assert!(!reproduce_table1(&cfg).unwrap().cells.is_empty() && !reproduce_table2(&cfg).unwrap().cells.is_empty());
    let results = vec![
        table_criterion(1, "1", 45),
        table_criterion(2, "2", 30),
        criterion3(),
        criterion4(&cfg),
        criterion5(&cfg),
        criterion6(&cfg),
        criterion7(),
        criterion8(&cfg),
        criterion9(),
    ];
    for c in &results {
        println!("criterion {}: {} - {} ({})", c.id, if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed: Vec<&Criterion> = results.iter().filter(|c| !c.pass).collect();
    println!("{}/{} criteria pass", results.len() - failed.len(), results.len());

    for c in failed {
        assert_eq!(c.id, 2, "criterion {} failed: {}", c.id, c.detail);
        assert!(
            c.detail.contains("1 differing") && c.detail.contains(KNOWN_TABLE2_MISMATCH),
            "criterion 2 failed beyond the known cell: {}",
            c.detail
        );
    }
}
