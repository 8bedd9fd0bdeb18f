//! Operator comparison over seeded random instance families.

use std::time::{Duration, Instant};

use eqcad::engine::{EngineConfig, EngineError, SolverState};
use eqcad::formula::Formula;
use eqcad::projection::Operator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gen::generic_instance;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Family {
    pub vars: usize,
    pub degree: usize,
    /// Constraint counts; one batch of instances per entry.
    pub constraints: Vec<usize>,
    pub ecs: usize,
    pub seed: u64,
    pub instances: usize,
    pub coeff_bound: i64,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub operators: Vec<Operator>,
    /// Build the full decomposition, not only the projection.
    pub lift: bool,
    pub timing: bool,
    pub cell_cap: usize,
    pub time_cap: Option<Duration>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            operators: vec![Operator::McCallum, Operator::Reduced],
            lift: true,
            timing: false,
            cell_cap: 1_000_000,
            time_cap: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Row {
    pub instance: usize,
    pub n: usize,
    /// Requested policy.
    pub operator: Operator,
    /// Operator the level actually used.
    pub used: Operator,
    /// Level of the produced polynomials, counting from 1.
    pub level: usize,
    pub disc_res: usize,
    pub coefficients: usize,
    pub discriminants: usize,
    pub resultants: usize,
    pub pscs: usize,
    pub normalized: usize,
    pub cells: Option<usize>,
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Table {
    pub family: Family,
    pub rows: Vec<Row>,
}

/// The instance for constraint count `n` and index `i` of a family. Each
/// one has its own stream, so instances do not depend on each other.
pub fn family_instance(f: &Family, n: usize, i: usize) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(f.seed);
    rng.set_stream(((n as u64) << 32) | i as u64);
    generic_instance(&mut rng, f.vars, f.degree, n, f.ecs.min(n), f.coeff_bound)
}

pub fn var_names(vars: usize) -> Vec<String> {
    (0..vars).map(|i| format!("x{i}")).collect()
}

pub fn bench(f: &Family, opts: &BenchOptions) -> Table {
    let mut rows = Vec::new();
    for &n in &f.constraints {
        for i in 0..f.instances {
            let instance = family_instance(f, n, i);
            for &op in &opts.operators {
                rows.extend(run_one(f, &instance, n, i, op, opts));
            }
        }
    }
    Table { family: f.clone(), rows }
}

fn run_one(f: &Family, instance: &[Formula], n: usize, i: usize, op: Operator, opts: &BenchOptions) -> Vec<Row> {
    let config = EngineConfig { policy: op, cell_cap: opts.cell_cap, time_cap: opts.time_cap, product_ec: false };
    let mut state = SolverState::new(var_names(f.vars), vec![None; f.vars], config);
    for c in instance {
        state.stage_constraint(c.clone()).expect("generated constraints use declared variables");
    }
    let start = Instant::now();
    let (cells, verdict) = if opts.lift {
        match state.check_sat() {
            Ok(v) => (Some(state.stats().cells), Some(v.label().to_string())),
            Err(EngineError::CellCap(_)) | Err(EngineError::Timeout) => {
                state.project_only();
                (None, Some("budget".to_string()))
            }
            Err(e) => (None, Some(format!("error: {e}"))),
        }
    } else {
        state.project_only();
        (None, None)
    };
    let elapsed = start.elapsed();
    state
        .stats()
        .levels
        .iter()
        .enumerate()
        .filter_map(|(l, ls)| {
            let raw = ls.raw?;
            Some(Row {
                instance: i,
                n,
                operator: op,
                used: ls.operator,
                level: l,
                disc_res: raw.disc_res(),
                coefficients: raw.coefficients,
                discriminants: raw.discriminants,
                resultants: raw.resultants,
                pscs: raw.pscs,
                normalized: ls.normalized.unwrap_or(0),
                cells,
                verdict: verdict.clone(),
                time_ms: opts.timing.then_some(elapsed.as_secs_f64() * 1000.0),
            })
        })
        .collect()
}

/// Aligned plain-text rendering.
pub fn render_text(t: &Table, timing: bool) -> String {
    let mut header = vec![
        "instance", "n", "operator", "used", "level", "disc+res", "coeff", "disc", "res", "psc", "normalized", "cells", "verdict",
    ];
    if timing {
        header.push("time_ms");
    }
    let mut grid: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in &t.rows {
        let mut line = vec![
            r.instance.to_string(),
            r.n.to_string(),
            r.operator.to_string(),
            r.used.to_string(),
            r.level.to_string(),
            r.disc_res.to_string(),
            r.coefficients.to_string(),
            r.discriminants.to_string(),
            r.resultants.to_string(),
            r.pscs.to_string(),
            r.normalized.to_string(),
            r.cells.map_or("-".to_string(), |c| c.to_string()),
            r.verdict.clone().unwrap_or_else(|| "-".to_string()),
        ];
        if timing {
            line.push(r.time_ms.map_or("-".to_string(), |t| format!("{t:.1}")));
        }
        grid.push(line);
    }
    let widths: Vec<usize> = (0..grid[0].len()).map(|c| grid.iter().map(|row| row[c].len()).max().unwrap()).collect();
    let mut out = String::new();
    for row in grid {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (v, w))| if c == 2 || c == 3 || c == 12 { format!("{v:<w$}") } else { format!("{v:>w$}") })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn render_json(t: &Table) -> String {
    serde_json::to_string_pretty(t).expect("table serializes")
}
