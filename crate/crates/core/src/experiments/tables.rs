//! Verdict tables over rule catalogs, with golden comparison and emitters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{run_check, CheckConfig, CheckId, Scope, Verdict};
use crate::error::{GurError, Result};
use crate::rules::parse_rule;

/// Expected glyph matrix for one table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Golden {
    pub table: u8,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<String>>,
}

impl Golden {
    pub fn parse(json: &str) -> Result<Self> {
        let g: Golden = serde_json::from_str(json).map_err(|e| GurError::InvalidParameter(format!("golden data: {e}")))?;
        if g.cells.len() != g.rows.len() || g.cells.iter().any(|r| r.len() != g.columns.len()) {
            return Err(GurError::InvalidParameter("golden data: cell matrix does not match rows × columns".into()));
        }
        Ok(g)
    }

    pub fn builtin(table: u8) -> Result<Self> {
        match table {
            1 => Self::parse(include_str!("../../golden/table1.json")),
            2 => Self::parse(include_str!("../../golden/table2.json")),
            _ => Err(GurError::InvalidParameter(format!("no table {table}; use 1 or 2"))),
        }
    }

    pub fn expected(&self, row: &str, column: &str) -> Option<&str> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == column)?;
        Some(self.cells[r][c].as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub verdict: Verdict,
    pub scope: Scope,
    pub glyph: String,
    /// Distance recorded by the witness, if any.
    pub witness_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub dims: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub row: String,
    pub column: String,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: u8,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<Cell>>,
    pub metadata: TableMetadata,
}

impl TableReport {
    pub fn cell(&self, row: &str, column: &str) -> Option<&Cell> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == column)?;
        Some(&self.cells[r][c])
    }

    /// Cells whose glyph differs from `golden`, in row-major order.
    pub fn compare(&self, golden: &Golden) -> Vec<Mismatch> {
        let mut out = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, column) in self.columns.iter().enumerate() {
                let found = &self.cells[r][c].glyph;
                let expected = golden.expected(row, column).unwrap_or("missing");
                if found != expected {
                    out.push(Mismatch {
                        row: row.clone(),
                        column: column.clone(),
                        expected: expected.to_string(),
                        found: found.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("| Table {} | {} |\n", self.table, self.columns.join(" | "));
        s.push_str(&format!("|---|{}\n", "---|".repeat(self.columns.len())));
        for (row, cells) in self.rows.iter().zip(&self.cells) {
            let glyphs: Vec<&str> = cells.iter().map(|c| c.glyph.as_str()).collect();
            s.push_str(&format!("| {} | {} |\n", row, glyphs.join(" | ")));
        }
        s.push_str(&format!(
            "\nseed {}, {} trials per scope, tol {:e}\n",
            self.metadata.seed, self.metadata.trials, self.metadata.tol
        ));
        s
    }
}

/// Runs every (row, column) cell; cells are independent and evaluated in parallel.
pub fn reproduce(table: u8, rows: &[CheckId], columns: &[&str], cfg: &CheckConfig) -> Result<TableReport> {
    cfg.validate()?;
    let rules = columns.iter().map(|c| parse_rule(c)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..rows.len()).flat_map(|r| (0..columns.len()).map(move |c| (r, c))).collect();
    let results = jobs
        .par_iter()
        .map(|&(r, c)| run_check(rules[c].as_ref(), rows[r], cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut cells: Vec<Vec<Cell>> = vec![Vec::with_capacity(columns.len()); rows.len()];
    for ((r, _), res) in jobs.iter().zip(results) {
        cells[*r].push(Cell {
            verdict: res.verdict,
            scope: res.scope,
            glyph: res.glyph().to_string(),
            witness_distance: res.witness.as_ref().map(|w| w.distance),
        });
    }
    Ok(TableReport {
        table,
        rows: rows.iter().map(|r| r.id().to_string()).collect(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
        cells,
        metadata: TableMetadata {
            seed: cfg.seed.0,
            trials: cfg.trials,
            tol: cfg.tol,
            dims: cfg.dims.iter().map(|s| s.dims().to_vec()).collect(),
        },
    })
}

pub const TABLE1_COLUMNS: [&str; 5] = ["luders", "loc-luders", "passive", "dep", "lambda:0.25"];
pub const TABLE2_COLUMNS: [&str; 5] = ["cc-dep", "cc-lambda:0.5", "mu:0.5", "von-neumann", "unitary-kick"];

/// Nine operational properties × the five valid rules.
pub fn reproduce_table1(cfg: &CheckConfig) -> Result<TableReport> {
    reproduce(1, &CheckId::PROPERTIES, &TABLE1_COLUMNS, cfg)
}

/// Requirements A1–A6 × the five invalid rules.
pub fn reproduce_table2(cfg: &CheckConfig) -> Result<TableReport> {
    reproduce(2, &CheckId::AXIOMS, &TABLE2_COLUMNS, cfg)
}

/// Expected glyph per check for a rule listed in either built-in table.
pub fn expected_profile(table: u8, rule: &str) -> Result<Vec<(CheckId, String)>> {
    let g = Golden::builtin(table)?;
    let canonical = parse_rule(rule)?.name();
    if !g.columns.contains(&canonical) {
        return Err(GurError::InvalidParameter(format!(
            "rule `{canonical}` is not a column of table {table} ({})",
            g.columns.join(", ")
        )));
    }
    g.rows
        .iter()
        .map(|row| {
            let id: CheckId = row.parse()?;
            Ok((id, g.expected(row, &canonical).unwrap_or("missing").to_string()))
        })
        .collect()
}
