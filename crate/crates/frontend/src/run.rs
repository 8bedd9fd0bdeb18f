//! Script execution against a live solver state.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::time::{Duration, Instant};

use eqcad::engine::{EngineConfig, EngineError, SolverState, Stats, VerdictKind};
use eqcad::formula::{ConstraintId, Formula, Quantifier};
use eqcad::projection::{Operator, RawCounts};
use eqcad::realalg::{compare, isolate_roots, AlgebraicNumber, SamplePoint};
use eqcad::{Polynomial, Rational, Variable};
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Value};

use crate::script::{Assertion, BoolTerm, Command, Script, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `check-sat` decides sentences and checks satisfiability otherwise.
    Auto,
    Sat,
    Decide,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub operator: Operator,
    pub order: Option<Vec<String>>,
    pub mode: Mode,
    pub stats: bool,
    pub json: bool,
    pub timing: bool,
    pub cell_cap: usize,
    pub time_cap: Option<Duration>,
    pub product_ec: bool,
    /// Decimal places of model enclosures.
    pub model_digits: u32,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            operator: Operator::Reduced,
            order: None,
            mode: Mode::Auto,
            stats: false,
            json: false,
            timing: false,
            cell_cap: 1_000_000,
            time_cap: None,
            product_ec: false,
            model_digits: 6,
        }
    }
}

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct LevelRow {
    /// Level of the produced polynomials, counting from 1.
    pub level: usize,
    pub eliminated: String,
    pub operator: Operator,
    pub raw: RawCounts,
    pub raw_total: usize,
    pub normalized: usize,
}

/// Statistics document printed with `--stats`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RunStats {
    pub projections: Vec<LevelRow>,
    pub cells: usize,
    pub lifts: usize,
    pub repairs: usize,
    pub preserved_cells: usize,
    pub created_cells: usize,
    pub ec_designations: Vec<String>,
    pub operator_flips: Vec<String>,
    pub ec_escalation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl RunStats {
    pub fn from_engine(s: &Stats, names: &[String], wall: Option<Duration>) -> Self {
        let projections = s
            .levels
            .iter()
            .enumerate()
            .filter_map(|(l, ls)| {
                let raw = ls.raw?;
                Some(LevelRow {
                    level: l,
                    eliminated: ls.variable.clone(),
                    operator: ls.operator,
                    raw,
                    raw_total: raw.total(),
                    normalized: ls.normalized.unwrap_or(0),
                })
            })
            .collect();
        RunStats {
            projections,
            cells: s.cells,
            lifts: s.lift_stacks,
            repairs: s.repairs,
            preserved_cells: s.preserved_cells,
            created_cells: s.created_cells,
            ec_designations: s
                .levels
                .iter()
                .filter_map(|ls| ls.ec.as_ref().map(|e| format!("{}: {e} = 0", ls.variable)))
                .collect(),
            operator_flips: s
                .operator_flips
                .iter()
                .map(|f| format!("{}: {} -> {}", names[f.level], f.from, f.to))
                .collect(),
            ec_escalation: s.ec_escalation,
            wall_ms: wall.map(|d| d.as_secs_f64() * 1000.0),
        }
    }
}

struct Live {
    assertion: Assertion,
    depth: u32,
    id: Option<ConstraintId>,
}

type Layout = (Vec<String>, Vec<Option<Quantifier>>);

struct Session<'w> {
    opts: RunOptions,
    declared: Vec<String>,
    live: Vec<Live>,
    depth: u32,
    state: Option<(SolverState, Layout)>,
    model: Option<SamplePoint>,
    out: &'w mut dyn Write,
}

fn term_vars<'a>(t: &'a Term, acc: &mut BTreeSet<&'a str>) {
    match t {
        Term::Num(_) => {}
        Term::Var(v) => {
            acc.insert(v);
        }
        Term::Add(ts) | Term::Sub(ts) | Term::Mul(ts) => ts.iter().for_each(|t| term_vars(t, acc)),
        Term::Neg(t) => term_vars(t, acc),
    }
}

fn bool_vars<'a>(b: &'a BoolTerm, acc: &mut BTreeSet<&'a str>) {
    match b {
        BoolTerm::True | BoolTerm::False => {}
        BoolTerm::Rel(_, x, y) => {
            term_vars(x, acc);
            term_vars(y, acc);
        }
        BoolTerm::And(bs) | BoolTerm::Or(bs) => bs.iter().for_each(|b| bool_vars(b, acc)),
        BoolTerm::Not(b) => bool_vars(b, acc),
    }
}

fn to_poly(t: &Term, index: &HashMap<&str, usize>) -> Polynomial {
    match t {
        Term::Num(r) => Polynomial::constant(r.clone()),
        Term::Var(v) => Polynomial::var(Variable(index[v.as_str()])),
        Term::Add(ts) => ts.iter().fold(Polynomial::zero(), |acc, t| &acc + &to_poly(t, index)),
        Term::Mul(ts) => ts.iter().fold(Polynomial::one(), |acc, t| &acc * &to_poly(t, index)),
        Term::Sub(ts) => ts[1..].iter().fold(to_poly(&ts[0], index), |acc, t| &acc - &to_poly(t, index)),
        Term::Neg(t) => -to_poly(t, index),
    }
}

fn to_formula(b: &BoolTerm, index: &HashMap<&str, usize>) -> Formula {
    match b {
        BoolTerm::True => Formula::True,
        BoolTerm::False => Formula::False,
        BoolTerm::Rel(r, x, y) => Formula::atom(&to_poly(x, index) - &to_poly(y, index), *r),
        BoolTerm::And(bs) => Formula::and(bs.iter().map(|b| to_formula(b, index)).collect()),
        BoolTerm::Or(bs) => Formula::or(bs.iter().map(|b| to_formula(b, index)).collect()),
        BoolTerm::Not(b) => Formula::negate(to_formula(b, index)),
    }
}

fn decimal(r: &Rational, digits: u32, round_up: bool) -> String {
    let scale = BigInt::from(10).pow(digits);
    let scaled = r * Rational::from_integer(scale.clone());
    let n = if round_up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let neg = n.is_negative();
    let mag = n.abs().to_string();
    let d = digits as usize;
    let padded = format!("{:0>width$}", mag, width = d + 1);
    let (int, frac) = padded.split_at(padded.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Exact description of a coordinate: a univariate defining polynomial
/// and an interval isolating the coordinate among its roots.
fn certificate(a: &AlgebraicNumber) -> (Polynomial, Rational, Rational) {
    let defining = a.absolute_polynomial().unwrap_or_else(|| a.defining().clone());
    if let Ok(roots) = isolate_roots(&defining) {
        // Comparing refines the roots; report the coarser initial intervals.
        let initial: Vec<_> = roots.iter().map(AlgebraicNumber::interval).collect();
        if let Some(i) = roots.iter().position(|r| compare(r, a) == std::cmp::Ordering::Equal) {
            let iv = initial[i].clone();
            return (defining, iv.lo, iv.hi);
        }
    }
    let iv = a.interval();
    (defining, iv.lo, iv.hi)
}

/// Nearest `digits`-place decimal, prefixed with `~`.
fn approx(a: &AlgebraicNumber, digits: u32) -> String {
    a.refine_to(&Rational::new(1.into(), BigInt::from(10).pow(digits + 2)));
    let iv = a.interval();
    let mid = (&iv.lo + &iv.hi) / Rational::from_integer(2.into());
    let half = Rational::new(1.into(), BigInt::from(2) * BigInt::from(10).pow(digits));
    format!("~{}", decimal(&(mid + half), digits, false))
}

fn fmt_rat(r: &Rational) -> String {
    r.to_string()
}

impl Session<'_> {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            policy: self.opts.operator,
            cell_cap: self.opts.cell_cap,
            time_cap: self.opts.time_cap,
            product_ec: self.opts.product_ec,
        }
    }

    fn layout(&self) -> Result<Layout, String> {
        let mut bound: Vec<(String, Quantifier)> = Vec::new();
        let mut free_used: BTreeSet<&str> = BTreeSet::new();
        for l in &self.live {
            let mut vars = BTreeSet::new();
            bool_vars(&l.assertion.body, &mut vars);
            if l.assertion.prefix.is_empty() {
                free_used.extend(vars);
                continue;
            }
            let own: BTreeSet<&str> = l.assertion.bound_vars().map(|(_, v)| v.as_str()).collect();
            if let Some(v) = vars.iter().find(|v| !own.contains(*v)) {
                return Err(format!("quantified assertion mentions free variable '{v}'"));
            }
            for (q, v) in l.assertion.bound_vars() {
                if bound.iter().any(|(b, _)| b == v) {
                    return Err(format!("variable '{v}' is bound by more than one assertion"));
                }
                bound.push((v.clone(), q));
            }
        }
        if let Some(v) = free_used.iter().find(|v| bound.iter().any(|(b, _)| b == *v)) {
            return Err(format!("variable '{v}' is both free and bound"));
        }
        let free: Vec<String> = if bound.is_empty() {
            self.declared.clone()
        } else {
            self.declared.iter().filter(|d| free_used.contains(d.as_str())).cloned().collect()
        };
        let mut names: Vec<String> = free.iter().cloned().chain(bound.iter().map(|(b, _)| b.clone())).collect();
        if let Some(order) = &self.opts.order {
            for o in order {
                if !names.contains(o) {
                    return Err(format!("--order names unknown or unused variable '{o}'"));
                }
            }
            let rest: Vec<String> = names.iter().filter(|n| !order.contains(n)).cloned().collect();
            names = order.iter().cloned().chain(rest).collect();
        }
        let prefix: Vec<Option<Quantifier>> =
            names.iter().map(|n| bound.iter().find(|(b, _)| b == n).map(|(_, q)| *q)).collect();
        for l in &self.live {
            let pos: Vec<usize> =
                l.assertion.bound_vars().map(|(_, v)| names.iter().position(|n| n == v).unwrap()).collect();
            if pos.windows(2).any(|w| w[0] > w[1]) {
                return Err("variable order disagrees with the quantifier prefix".to_string());
            }
        }
        Ok((names, prefix))
    }

    fn state(&mut self) -> Result<&mut SolverState, String> {
        let layout = self.layout()?;
        let config = self.config();
        let reusable = match &self.state {
            Some((s, l)) => *l == layout && *s.config() == config,
            None => false,
        };
        if !reusable {
            let (names, prefix) = layout.clone();
            self.state = Some((SolverState::new(names, prefix, config), layout.clone()));
            self.live.iter_mut().for_each(|l| l.id = None);
        }
        let index: HashMap<&str, usize> = layout.0.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let (state, _) = self.state.as_mut().unwrap();
        for l in self.live.iter_mut().filter(|l| l.id.is_none()) {
            let f = to_formula(&l.assertion.body, &index);
            l.id = Some(state.stage_constraint(f).map_err(|e| e.to_string())?);
        }
        Ok(state)
    }

    fn emit(&mut self, text: &str) {
        let _ = writeln!(self.out, "{text}");
    }

    fn emit_json(&mut self, v: Value) {
        let _ = writeln!(self.out, "{v}");
    }

    /// Returns the exit code for a verdict, or an error message with its
    /// exit code.
    fn command(&mut self, idx: usize, cmd: &Command) -> Result<Option<i32>, (String, i32)> {
        let plain = |e: String| (e, EXIT_ERROR);
        match cmd {
            Command::DeclareVar(v) => {
                self.declared.push(v.clone());
                self.ack(idx, cmd);
            }
            Command::Assert(a) => {
                self.live.push(Live { assertion: a.clone(), depth: self.depth, id: None });
                self.model = None;
                self.ack(idx, cmd);
            }
            Command::Push(n) => {
                self.depth += n;
                self.ack(idx, cmd);
            }
            Command::Pop(n) => {
                if *n > self.depth {
                    return Err(plain(format!("pop {n} exceeds push depth {}", self.depth)));
                }
                self.depth -= n;
                let depth = self.depth;
                let (keep, gone): (Vec<Live>, Vec<Live>) = self.live.drain(..).partition(|l| l.depth <= depth);
                self.live = keep;
                if let Some((state, _)) = self.state.as_mut() {
                    for id in gone.iter().filter_map(|l| l.id) {
                        state.stage_removal(id).map_err(|e| plain(e.to_string()))?;
                    }
                }
                self.model = None;
                self.ack(idx, cmd);
            }
            Command::CheckSat | Command::Decide => {
                let start = Instant::now();
                let sentence = self.layout().map_err(plain)?.1.iter().any(Option::is_some);
                let decide = match (cmd, self.opts.mode) {
                    (Command::Decide, _) | (_, Mode::Decide) => true,
                    (_, Mode::Sat) => false,
                    (_, Mode::Auto) => sentence,
                };
                let state = self.state().map_err(plain)?;
                let verdict = if decide { state.decide() } else { state.check_sat() };
                let verdict = verdict.map_err(|e| {
                    let code = match e {
                        EngineError::CellCap(_) | EngineError::Timeout => EXIT_BUDGET,
                        _ => EXIT_ERROR,
                    };
                    (e.to_string(), code)
                })?;
                let names = state.names().to_vec();
                let wall = self.opts.timing.then(|| start.elapsed());
                let stats = RunStats::from_engine(&verdict.stats, &names, wall);
                self.model = verdict.witness().cloned();
                let code = match verdict.kind {
                    VerdictKind::Sat(_) | VerdictKind::True => EXIT_SAT,
                    VerdictKind::Unsat | VerdictKind::False => EXIT_UNSAT,
                };
                if self.opts.json {
                    let mut doc = json!({"index": idx, "command": cmd.name(), "result": verdict.label()});
                    if self.opts.stats {
                        doc["stats"] = serde_json::to_value(&stats).unwrap();
                    }
                    self.emit_json(doc);
                } else {
                    self.emit(verdict.label());
                    if self.opts.stats {
                        let doc = serde_json::to_string(&stats).unwrap();
                        self.emit(&doc);
                    }
                }
                return Ok(Some(code));
            }
            Command::GetModel => {
                let Some(model) = self.model.clone() else {
                    return Err(plain("no model available: the last check did not return sat".to_string()));
                };
                let names = self.state.as_ref().map(|(s, _)| s.names().to_vec()).unwrap_or_default();
                let entries: Vec<(String, Value)> =
                    model.coords().iter().zip(&names).map(|(a, n)| self.describe(a, n, &names)).collect();
                if self.opts.json {
                    let model: Vec<Value> = entries.into_iter().map(|(_, v)| v).collect();
                    self.emit_json(json!({"index": idx, "command": "get-model", "model": model}));
                } else {
                    for (line, _) in entries {
                        self.emit(&line);
                    }
                }
            }
            Command::GetCells => {
                let digits = self.opts.model_digits;
                let state = self.state().map_err(plain)?;
                let names = state.names().to_vec();
                let cells = state.true_cells().map_err(|e| plain(e.to_string()))?;
                let render = |s: &SamplePoint| -> Vec<String> {
                    s.coords()
                        .iter()
                        .map(|a| match a.exact_rational() {
                            Some(r) => fmt_rat(&r),
                            None => approx(a, digits),
                        })
                        .collect()
                };
                if self.opts.json {
                    let list: Vec<Value> =
                        cells.iter().map(|(ix, s)| json!({"index": ix, "sample": render(s)})).collect();
                    self.emit_json(json!({"index": idx, "command": "get-cells", "cells": list}));
                } else {
                    for (ix, s) in &cells {
                        let coords: Vec<String> =
                            render(s).into_iter().zip(&names).map(|(v, n)| format!("{n} = {v}")).collect();
                        let ix: Vec<String> = ix.iter().map(usize::to_string).collect();
                        self.emit(&format!("cell ({}) {}", ix.join(" "), coords.join(", ")));
                    }
                }
            }
            Command::SetOption(k, v) => {
                let ok = self.set_option(k, v);
                if self.opts.json {
                    let result = if ok { "ok" } else { "unsupported" };
                    self.emit_json(json!({"index": idx, "command": "set-option", "result": result}));
                } else if !ok {
                    self.emit("unsupported");
                }
            }
            Command::Exit => self.ack(idx, cmd),
        }
        Ok(None)
    }

    fn ack(&mut self, idx: usize, cmd: &Command) {
        if self.opts.json {
            self.emit_json(json!({"index": idx, "command": cmd.name(), "result": "ok"}));
        }
    }

    fn set_option(&mut self, key: &str, value: &str) -> bool {
        match key {
            ":operator" => match value {
                "collins" => self.opts.operator = Operator::Collins,
                "mccallum" => self.opts.operator = Operator::McCallum,
                "ec-reduced" => self.opts.operator = Operator::Reduced,
                _ => return false,
            },
            ":product-ec" => match value {
                "true" => self.opts.product_ec = true,
                "false" => self.opts.product_ec = false,
                _ => return false,
            },
            ":cell-cap" => match value.parse() {
                Ok(n) => self.opts.cell_cap = n,
                Err(_) => return false,
            },
            ":model-digits" => match value.parse() {
                Ok(n) => self.opts.model_digits = n,
                Err(_) => return false,
            },
            _ => return false,
        }
        self.model = None;
        true
    }

    fn describe(&self, a: &AlgebraicNumber, name: &str, names: &[String]) -> (String, Value) {
        if let Some(r) = a.exact_rational() {
            return (format!("{name} = {}", fmt_rat(&r)), json!({"variable": name, "value": fmt_rat(&r)}));
        }
        let digits = self.opts.model_digits;
        let (poly, lo, hi) = certificate(a);
        a.refine_to(&Rational::new(1.into(), BigInt::from(10).pow(digits)));
        let iv = a.interval();
        let (dlo, dhi) = (decimal(&iv.lo, digits, false), decimal(&iv.hi, digits, true));
        let shown = poly.display_with(names).to_string();
        let line = format!("{name} = root of {shown} in ({}, {}) ~ [{dlo}, {dhi}]", fmt_rat(&lo), fmt_rat(&hi));
        let doc = json!({
            "variable": name,
            "polynomial": shown,
            "interval": [fmt_rat(&lo), fmt_rat(&hi)],
            "enclosure": [dlo, dhi],
        });
        (line, doc)
    }
}

/// Execute `script`, writing results to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run(script: &Script, opts: &RunOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut session = Session {
        opts: opts.clone(),
        declared: Vec::new(),
        live: Vec::new(),
        depth: 0,
        state: None,
        model: None,
        out,
    };
    let mut code = EXIT_SAT;
    for (idx, cmd) in script.commands.iter().enumerate() {
        match session.command(idx, cmd) {
            Ok(Some(c)) => code = c,
            Ok(None) => {}
            Err((msg, c)) => {
                let _ = writeln!(err, "error: command {idx} ({}): {msg}", cmd.name());
                return c;
            }
        }
        if *cmd == Command::Exit {
            break;
        }
    }
    code
}

/// Parse and run `text`, capturing both streams.
pub fn run_text(text: &str, opts: &RunOptions) -> (String, String, i32) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = match crate::parse::parse(text) {
        Ok(script) => run(&script, opts, &mut out, &mut err),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    };
    (String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap(), code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn decimal_rounding_directions() {
        let r = Rational::new(2.into(), 3.into());
        assert_eq!(decimal(&r, 3, false), "0.666");
        assert_eq!(decimal(&r, 3, true), "0.667");
        assert_eq!(decimal(&-r.clone(), 3, false), "-0.667");
        assert_eq!(decimal(&Rational::from_integer(12.into()), 2, false), "12.00");
        assert_eq!(decimal(&Rational::one(), 0, false), "1");
    }

    #[test]
    fn approximations_round_to_nearest() {
        let roots = isolate_roots(&eqcad::Polynomial::parse("64*x^2 - 15", &["x"]).unwrap()).unwrap();
        assert_eq!(approx(&roots[0], 6), "~-0.484123");
        assert_eq!(approx(&roots[1], 6), "~0.484123");
    }
}
