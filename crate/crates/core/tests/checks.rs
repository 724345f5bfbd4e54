use gur_core::checks::{replay, run_all, run_check, CheckConfig, CheckId, CheckResult, Scope, Verdict, WitnessInputs};
use gur_core::linalg::{qubit, ComplexMatrix, C64};
use gur_core::rules::{catalog, parse_rule, UpdateRule};
use gur_core::state::{Gemenge, Outcome, QuantumState};
use gur_core::Result;

/// Forgets the Born factor.
#[derive(Debug)]
struct Identity;

impl UpdateRule for Identity {
    fn name(&self) -> String {
        "identity".into()
    }
    fn apply(&self, _: &Outcome, state: &QuantumState) -> Result<Gemenge> {
        Ok(Gemenge::pure_preparation(state.clone()))
    }
}

/// Lüders followed by normalization.
#[derive(Debug)]
struct Normalized;

impl UpdateRule for Normalized {
    fn name(&self) -> String {
        "normalized".into()
    }
    fn apply(&self, outcome: &Outcome, state: &QuantumState) -> Result<Gemenge> {
        let q = outcome.embedded(state.space())?;
        let m = q.conjugate(state.matrix());
        let tr = m.trace_re();
        let out = if tr > 1e-12 { m.scale(1.0 / tr) } else { m };
        Ok(Gemenge::pure_preparation(state.with_matrix(out)?))
    }
}

/// Lüders shifted by −0.1·I.
#[derive(Debug)]
struct Shifted;

impl UpdateRule for Shifted {
    fn name(&self) -> String {
        "shifted".into()
    }
    fn apply(&self, outcome: &Outcome, state: &QuantumState) -> Result<Gemenge> {
        let q = outcome.embedded(state.space())?;
        let mut m = q.conjugate(state.matrix());
        m.axpy(C64::new(-0.1, 0.0), &ComplexMatrix::identity(m.dim()));
        Ok(Gemenge::pure_preparation(state.with_matrix(m)?))
    }
}

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

fn verdict(rule: &str, check: CheckId) -> CheckResult {
    run_check(parse_rule(rule).unwrap().as_ref(), check, &cfg()).unwrap()
}

#[test]
fn broken_rules_are_caught() {
    let c = cfg();
    assert_eq!(run_check(&Identity, CheckId::Born, &c).unwrap().verdict, Verdict::Violated);
    assert_eq!(run_check(&Normalized, CheckId::Homogeneity, &c).unwrap().verdict, Verdict::Violated);
    assert_eq!(run_check(&Shifted, CheckId::A1, &c).unwrap().verdict, Verdict::Violated);
}

#[test]
fn documented_verdicts() {
    use CheckId::*;
    use Verdict::*;
    let cases: &[(&str, CheckId, Verdict)] = &[
        ("luders", Born, Holds),
        ("passive", Born, Holds),
        ("lambda:0.5", Homogeneity, Holds),
        ("luders", Homogeneity, Holds),
        ("luders", A1, Holds),
        ("dep", A1, Holds),
        ("von-neumann", A2, Violated),
        ("luders", A2, Holds),
        ("mu:0.5", A2, Holds),
        ("unitary-kick", A3, Violated),
        ("luders", A3, Holds),
        ("passive", A3, Holds),
        ("luders", A4, Holds),
        ("loc-luders", A4, Holds),
        ("cc-dep", A4, Holds),
        ("cc-dep", A5, Violated),
        ("luders", A5, Holds),
        ("loc-luders", A5, Holds),
        ("mu:0.5", A6, Violated),
        ("luders", A6, Holds),
        ("cc-lambda:0.5", A6, Violated),
        ("luders", DetRepeatability, Holds),
        ("passive", DetRepeatability, Violated),
        ("lambda:0.5", DetRepeatability, Violated),
        ("lambda:0.25", WeakRepeatability, Holds),
        ("passive", WeakRepeatability, Violated),
        ("dep", WeakRepeatability, Violated),
        ("passive", PrepIndistinguishability, Violated),
        ("luders", PrepIndistinguishability, Holds),
        ("dep", PrepIndistinguishability, Holds),
        ("dep", CompositionCompat, Violated),
        ("passive", CompositionCompat, Holds),
        ("loc-luders", CompositionCompat, Violated),
        ("passive", Ideality, Holds),
        ("dep", Ideality, Violated),
        ("luders", LocalTomography, Holds),
        ("loc-luders", LocalTomography, Violated),
        ("dep", LocalTomography, Holds),
        ("luders", Coherence, Holds),
        ("passive", Coherence, Violated),
        ("loc-luders", Coherence, Holds),
        ("luders", Nonlocality, Holds),
        ("loc-luders", Nonlocality, Violated),
        ("dep", Nonlocality, Holds),
        ("luders", CompletePositivity, Holds),
        ("passive", CompletePositivity, Violated),
        ("dep", CompletePositivity, Holds),
    ];
    for (rule, check, expected) in cases {
        let r = verdict(rule, *check);
        assert_eq!(r.verdict, *expected, "{rule} / {check}");
    }
}

#[test]
fn loc_luders_ideality_is_single_system_only() {
    let r = verdict("loc-luders", CheckId::Ideality);
    assert_eq!((r.verdict, r.scope), (Verdict::Holds, Scope::SingleSystem));
    assert_eq!(r.glyph(), "(✓)");
    assert!(r.witness.is_some());
}

#[test]
fn von_neumann_context_witness() {
    let r = verdict("von-neumann", CheckId::A2);
    let w = r.witness.unwrap();
    let plus = ComplexMatrix::pure(&qubit::ket_plus());
    let mixed = ComplexMatrix::identity(2).scale(0.5);
    let sides = [w.lhs, w.rhs];
    assert!(sides.iter().any(|m| m.approx_eq(&plus, 1e-9)));
    assert!(sides.iter().any(|m| m.approx_eq(&mixed, 1e-9)));
}

#[test]
fn passive_witnesses_match_known_inputs() {
    let r = verdict("passive", CheckId::Coherence);
    let w = r.witness.unwrap();
    assert!((w.lhs.get(0, 0).re - 0.25).abs() < 1e-9);
    assert!((w.rhs.get(0, 0).re - 0.5).abs() < 1e-9);

    let r = verdict("passive", CheckId::DetRepeatability);
    let w = r.witness.unwrap();
    assert!((w.lhs.get(0, 0).re / w.rhs.get(0, 0).re - 0.5).abs() < 1e-9);

    let r = verdict("cc-dep", CheckId::A5);
    let w = r.witness.unwrap();
    assert!(w.lhs.approx_eq(&ComplexMatrix::identity(2).scale(0.5), 1e-9));
    assert!(w.rhs.approx_eq(&ComplexMatrix::basis_projector(2, 0), 1e-9));
}

#[test]
fn run_all_columns() {
    let c = cfg();
    let luders = run_all(parse_rule("luders").unwrap().as_ref(), &c).unwrap();
    assert!(luders.iter().all(|r| r.verdict == Verdict::Holds), "{luders:?}");

    let kick = run_all(parse_rule("unitary-kick").unwrap().as_ref(), &c).unwrap();
    for r in kick.iter().filter(|r| r.check.starts_with('A')) {
        let expected = if r.check == "A3" { Verdict::Violated } else { Verdict::Holds };
        assert_eq!(r.verdict, expected, "{}", r.check);
    }
}

#[test]
fn every_witness_replays() {
    let c = CheckConfig { trials: 60, ..cfg() };
    for rule in catalog() {
        for r in run_all(&rule, &c).unwrap() {
            if let Some(w) = &r.witness {
                let d = replay(&r).unwrap();
                assert!((d - w.distance).abs() <= 1e-10, "{} / {}", r.rule, r.check);
                if r.verdict == Verdict::Violated && r.check != "weak-repeatability" {
                    assert!(w.distance > r.tol, "{} / {}", r.rule, r.check);
                }
            }
        }
    }
}

#[test]
fn results_round_trip_through_json() {
    let r = verdict("mu:0.5", CheckId::A6);
    let json = serde_json::to_string(&r).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["rule", "check", "verdict", "scope", "trials", "tol", "seed", "witness"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["verdict"], "violated");
    assert_eq!(v["witness"]["inputs"]["kind"], "local-commutativity");
    let back: CheckResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert!(matches!(back.witness.unwrap().inputs, WitnessInputs::LocalCommutativity { .. }));
}

#[test]
fn same_seed_same_results() {
    let c = CheckConfig { trials: 50, ..cfg() };
    for name in ["lambda:0.25", "von-neumann", "mu:0.5"] {
        let rule = parse_rule(name).unwrap();
        let a = run_all(rule.as_ref(), &c).unwrap();
        let b = run_all(rule.as_ref(), &c).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn a4_needs_a_tripartite_space() {
    let c = CheckConfig {
        dims: vec![gur_core::state::CompositeSpace::new(vec![2, 2]).unwrap()],
        ..cfg()
    };
    let r = run_check(parse_rule("luders").unwrap().as_ref(), CheckId::A4, &c).unwrap();
    assert_eq!(r.verdict, Verdict::NotApplicable);
}

#[test]
fn check_ids_parse_case_insensitively() {
    for id in CheckId::ALL {
        assert_eq!(id.id().to_uppercase().parse::<CheckId>().unwrap(), id);
    }
    assert!("nope".parse::<CheckId>().is_err());
}
