use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gur_core::checks::{run_check, CheckConfig, CheckId, CheckResult};
use gur_core::experiments::{chsh, counterexample, expected_profile, reproduce_table1, reproduce_table2, Golden};
use gur_core::linalg::Seed;
use gur_core::rules::{parse_rule, UpdateRule};
use gur_core::state::CompositeSpace;
use gur_core::GurError;

#[derive(Parser)]
#[command(name = "gur", version, about = "Generalised state-update rules: checks, tables and counterexamples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks against one rule.
    Check(CheckArgs),
    /// Reproduce a verdict table and compare it with the expected glyphs.
    Table(TableArgs),
    /// Recompute a named counterexample.
    Counterexample(CounterexampleArgs),
    /// CHSH value on the singlet.
    Chsh(ChshArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Table1,
    Table2,
}

#[derive(Args)]
struct RunArgs {
    /// Composite space as comma-separated dimensions; repeat for several spaces.
    #[arg(long = "dims", value_name = "D1,D2,..")]
    dims: Vec<String>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, env = "GUR_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RuleArgs {
    /// Rule name, e.g. luders, lambda:0.25, mu:0.5.
    #[arg(long)]
    rule: String,
    /// Parameter for a bare `lambda` or `cc-lambda`.
    #[arg(long)]
    lambda: Option<f64>,
    /// Parameter for a bare `mu`.
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// Comma-separated subset of checks, e.g. A5,coherence.
    #[arg(long)]
    only: Option<String>,
    /// Compare verdicts with the rule's column in a table.
    #[arg(long, value_enum)]
    expect: Option<Expect>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
    table: u8,
    /// Expected glyphs; defaults to the built-in data.
    #[arg(long)]
    golden: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CounterexampleArgs {
    name: String,
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ChshArgs {
    #[command(flatten)]
    rule: RuleArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    output: OutputArgs,
}

enum Failure {
    Mismatch(String),
    Usage(String),
}

impl From<GurError> for Failure {
    fn from(e: GurError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Table(a) => cmd_table(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Chsh(a) => cmd_chsh(a),
    }
}

fn config(run: &RunArgs) -> Result<CheckConfig, Failure> {
    let mut cfg = CheckConfig {
        trials: run.trials,
        tol: run.tol,
        seed: Seed(run.seed),
        ..CheckConfig::default()
    };
    if !run.dims.is_empty() {
        cfg.dims = run
            .dims
            .iter()
            .map(|s| {
                let dims = s
                    .split(',')
                    .map(|d| d.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad dimension list `{s}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(CompositeSpace::new(dims)?)
            })
            .collect::<Result<_, Failure>>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_rule(a: &RuleArgs) -> Result<Box<dyn UpdateRule>, Failure> {
    let name = match (a.rule.as_str(), a.lambda, a.mu) {
        (base @ ("lambda" | "cc-lambda"), Some(l), _) => format!("{base}:{l}"),
        ("mu", _, Some(m)) => format!("mu:{m}"),
        (name, ..) => name.to_string(),
    };
    Ok(parse_rule(&name)?)
}

fn emit(output: &OutputArgs, json: &impl serde::Serialize, markdown: impl FnOnce() -> String) -> Outcome {
    let text = match output.format {
        Format::Json => serde_json::to_string_pretty(json).map_err(|e| Failure::Usage(e.to_string()))? + "\n",
        Format::Md => markdown(),
    };
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn results_markdown(results: &[CheckResult]) -> String {
    let mut s = String::from("| check | verdict | scope | trials | glyph | witness distance |\n|---|---|---|---|---|---|\n");
    for r in results {
        let distance = r.witness.as_ref().map(|w| format!("{:.3e}", w.distance)).unwrap_or_default();
        s.push_str(&format!(
            "| {} | {:?} | {:?} | {} | {} | {} |\n",
            r.check,
            r.verdict,
            r.scope,
            r.trials,
            r.glyph(),
            distance
        ));
    }
    s
}

fn cmd_check(a: CheckArgs) -> Outcome {
    let rule = resolve_rule(&a.rule)?;
    let cfg = config(&a.run)?;
    let checks: Vec<CheckId> = match &a.only {
        Some(list) => list.split(',').map(|c| c.trim().parse()).collect::<Result<_, GurError>>()?,
        None => CheckId::ALL.to_vec(),
    };
    let expected = match a.expect {
        Some(Expect::Table1) => Some(expected_profile(1, &rule.name())?),
        Some(Expect::Table2) => Some(expected_profile(2, &rule.name())?),
        None => None,
    };
    let start = Instant::now();
    let results = checks.iter().map(|&c| run_check(rule.as_ref(), c, &cfg)).collect::<Result<Vec<_>, _>>()?;
    eprintln!("{} checks in {:.2?}", results.len(), start.elapsed());
    emit(&a.output, &results, || results_markdown(&results))?;
    if let Some(profile) = expected {
        let mismatches: Vec<String> = profile
            .iter()
            .filter_map(|(id, glyph)| {
                let r = results.iter().find(|r| r.check == id.id())?;
                (r.glyph() != glyph).then(|| format!("  {}: expected {glyph}, found {}", id.id(), r.glyph()))
            })
            .collect();
        if !mismatches.is_empty() {
            return Err(Failure::Mismatch(format!("{} differs from the expected profile:\n{}", rule.name(), mismatches.join("\n"))));
        }
    }
    Ok(())
}

fn cmd_table(a: TableArgs) -> Outcome {
    let cfg = config(&a.run)?;
    let golden = match &a.golden {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Golden::parse(&text).map_err(|e| Failure::Mismatch(e.to_string()))?
        }
        None => Golden::builtin(a.table)?,
    };
    let start = Instant::now();
    let report = if a.table == 1 { reproduce_table1(&cfg)? } else { reproduce_table2(&cfg)? };
    eprintln!("table {} in {:.2?}", a.table, start.elapsed());
    emit(&a.output, &report, || report.to_markdown())?;
    let mismatches = report.compare(&golden);
    if mismatches.is_empty() {
        eprintln!("all {} cells match", report.rows.len() * report.columns.len());
        return Ok(());
    }
    let lines: Vec<String> = mismatches
        .iter()
        .map(|m| format!("  {} / {}: expected {}, found {}", m.row, m.column, m.expected, m.found))
        .collect();
    Err(Failure::Mismatch(format!("{} cell(s) differ:\n{}", mismatches.len(), lines.join("\n"))))
}

fn cmd_counterexample(a: CounterexampleArgs) -> Outcome {
    let rec = counterexample(&a.name, a.mu)?;
    emit(&a.output, &rec, || {
        format!(
            "{} ({})\n\nlhs:\n{}\nrhs:\n{}\ndistance from expected {:.3e}, separation {:.6}\n",
            rec.name, rec.rule, rec.computed[0], rec.computed[1], rec.distance, rec.separation
        )
    })?;
    if rec.matches {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{}: off by {:.3e}", rec.name, rec.distance)))
    }
}

fn cmd_chsh(a: ChshArgs) -> Outcome {
    let rule = resolve_rule(&a.rule)?;
    let cfg = config(&a.run)?;
    let report = chsh(rule.as_ref(), &cfg)?;
    if report.order_dependent {
        eprintln!("warning: {} is order dependent; S differs between measurement orders", report.rule);
    }
    emit(&a.output, &report, || {
        if report.order_dependent {
            format!("S (A first) = {:.6}\nS (B first) = {:.6}\n", report.s, report.s_reversed)
        } else {
            format!("S = {:.6}\n", report.s)
        }
    })
}
