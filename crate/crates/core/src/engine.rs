//! Solver state: builds the projection levels and the CAD tree for a set
//! of constraints, repairs nullification by escalating operators, and keeps
//! the tree across constraint edits.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::{ConstraintId, Formula, Quantifier};
use crate::lifting::{lift_tree, Budget, Cell, LevelPlan, LiftError, LiftStats, NullificationReport, Truth};
use crate::poly::{Polynomial, Variable};
use crate::projection::{
    coprime_basis, collins_with, ec_members, mccallum_with, propagate_with, reduced_with, EcDesignation, Operator,
    ProjPoly, Projection, ProjectionCache, ProjectionLevel, Propagation, Provenance, RawCounts, Rule,
};
use crate::realalg::{sign_at, SamplePoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Smallest operator the engine may use; `Reduced` only takes effect at
    /// levels with an equational constraint.
    pub policy: Operator,
    pub cell_cap: usize,
    pub time_cap: Option<Duration>,
    /// Also take equational constraints from disjunctions whose branches
    /// all carry an equation (their product vanishes).
    pub product_ec: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { policy: Operator::Reduced, cell_cap: 1_000_000, time_cap: None, product_ec: false }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("cell budget of {0} exceeded")]
    CellCap(usize),
    #[error("time budget exceeded")]
    Timeout,
    #[error("unknown constraint {0}")]
    UnknownConstraint(ConstraintId),
    #[error("free variables present: {}", .0.join(", "))]
    FreeVariables(Vec<String>),
    #[error("quantified variables present: {}", .0.join(", "))]
    QuantifiedVariables(Vec<String>),
    #[error("formula mentions variable index {index} but only {declared} variables are declared")]
    UndeclaredVariable { index: usize, declared: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct OperatorFlip {
    pub level: usize,
    pub from: Operator,
    pub to: Operator,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct LevelStats {
    pub variable: String,
    pub operator: Operator,
    pub members: usize,
    pub ec: Option<String>,
    /// Counts of the projection that eliminated this variable.
    pub raw: Option<RawCounts>,
    pub normalized: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Stats {
    /// Cells of R^1 through R^n.
    pub cells: usize,
    pub leaves: usize,
    pub levels: Vec<LevelStats>,
    /// Totals over all refreshes.
    pub refreshes: usize,
    pub repairs: usize,
    pub lift_stacks: usize,
    /// Of the last refresh.
    pub last_repairs: usize,
    pub preserved_cells: usize,
    pub created_cells: usize,
    /// Operator changes caused by the last edit, per level.
    pub operator_flips: Vec<OperatorFlip>,
    /// Set when an edit moved some level from the reduced operator to a
    /// larger one.
    pub ec_escalation: bool,
    /// Two equational constraints with a nonzero constant resultant.
    pub unsat_certificate: bool,
    pub nullifications: Vec<String>,
    pub cache_hits: usize,
    pub cache_misses: usize,
}

#[derive(Clone, Debug)]
pub enum VerdictKind {
    Sat(SamplePoint),
    Unsat,
    True,
    False,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub stats: Stats,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self.kind, VerdictKind::Sat(_))
    }

    pub fn witness(&self) -> Option<&SamplePoint> {
        match &self.kind {
            VerdictKind::Sat(s) => Some(s),
            _ => None,
        }
    }

    /// `sat`, `unsat`, `true` or `false`.
    pub fn label(&self) -> &'static str {
        match self.kind {
            VerdictKind::Sat(_) => "sat",
            VerdictKind::Unsat => "unsat",
            VerdictKind::True => "true",
            VerdictKind::False => "false",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub struct SolverState {
    names: Vec<String>,
    prefix: Vec<Option<Quantifier>>,
    config: EngineConfig,
    constraints: BTreeMap<ConstraintId, Formula>,
    next_id: u32,
    levels: Vec<ProjectionLevel>,
    projections: Vec<Option<Projection>>,
    ec_chain: Vec<Option<EcDesignation>>,
    operators: Vec<Operator>,
    escalations: Vec<Operator>,
    root: Cell,
    built: bool,
    dirty: bool,
    cache: ProjectionCache,
    stats: Stats,
}

impl SolverState {
    /// Empty state over the variables `names`, ordered lowest first.
    /// `prefix[i]` quantifies variable `i`; `None` leaves it free.
    pub fn new(names: Vec<String>, prefix: Vec<Option<Quantifier>>, config: EngineConfig) -> Self {
        assert_eq!(names.len(), prefix.len(), "one prefix entry per variable");
        let n = names.len();
        SolverState {
            names,
            prefix,
            config,
            constraints: BTreeMap::new(),
            next_id: 0,
            levels: (0..n).map(|i| ProjectionLevel::new(Variable(i))).collect(),
            projections: vec![None; n],
            ec_chain: vec![None; n],
            operators: vec![Operator::McCallum; n],
            escalations: vec![Operator::Reduced; n],
            root: Cell::root(),
            built: false,
            dirty: true,
            cache: ProjectionCache::default(),
            stats: Stats::default(),
        }
    }

    /// Build the decomposition for `constraints` in one go.
    pub fn build(
        names: Vec<String>,
        prefix: Vec<Option<Quantifier>>,
        constraints: Vec<Formula>,
        config: EngineConfig,
    ) -> Result<Self, EngineError> {
        let mut s = SolverState::new(names, prefix, config);
        for c in constraints {
            s.stage_constraint(c)?;
        }
        s.refresh()?;
        Ok(s)
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn constraints(&self) -> &BTreeMap<ConstraintId, Formula> {
        &self.constraints
    }

    pub fn levels(&self) -> &[ProjectionLevel] {
        &self.levels
    }

    pub fn projection(&self, level: usize) -> Option<&Projection> {
        self.projections.get(level).and_then(Option::as_ref)
    }

    pub fn ec_chain(&self) -> &[Option<EcDesignation>] {
        &self.ec_chain
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    pub fn root(&self) -> &Cell {
        &self.root
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    /// Normalized level sets, one per variable.
    pub fn level_sets(&self) -> Vec<BTreeSet<Polynomial>> {
        self.levels.iter().map(|l| l.polys().into_iter().cloned().collect()).collect()
    }

    /// Conjunction of all live constraints.
    pub fn matrix(&self) -> Formula {
        match self.constraints.len() {
            0 => Formula::True,
            1 => self.constraints.values().next().unwrap().clone(),
            _ => Formula::and(self.constraints.values().cloned().collect()),
        }
    }

    /// Record a constraint without rebuilding; the next query or
    /// `refresh` picks it up.
    pub fn stage_constraint(&mut self, f: Formula) -> Result<ConstraintId, EngineError> {
        let n = self.num_vars();
        if let Some(v) = f.max_var() {
            if v.0 >= n {
                return Err(EngineError::UndeclaredVariable { index: v.0, declared: n });
            }
        }
        let id = ConstraintId(self.next_id);
        self.next_id += 1;
        self.constraints.insert(id, f);
        self.dirty = true;
        Ok(id)
    }

    pub fn stage_removal(&mut self, id: ConstraintId) -> Result<Formula, EngineError> {
        let f = self.constraints.remove(&id).ok_or(EngineError::UnknownConstraint(id))?;
        self.dirty = true;
        Ok(f)
    }

    pub fn add_constraint(&mut self, f: Formula) -> Result<ConstraintId, EngineError> {
        let id = self.stage_constraint(f)?;
        self.refresh()?;
        Ok(id)
    }

    pub fn remove_constraint(&mut self, id: ConstraintId) -> Result<(), EngineError> {
        self.stage_removal(id)?;
        self.refresh()
    }

    fn compute_projection(&mut self) {
        let n = self.num_vars();
        let mut pending: Vec<Vec<ProjPoly>> = vec![Vec::new(); n];
        let mut candidates: Vec<Vec<EcDesignation>> = vec![Vec::new(); n];
        for (&id, f) in &self.constraints {
            for atom in f.atoms() {
                for piece in self.cache.pieces(&atom.poly) {
                    let lvl = piece.main_var().unwrap().0;
                    let mut pp = ProjPoly::input(piece, id);
                    if lvl != atom.poly.main_var().map_or(usize::MAX, |v| v.0) {
                        pp.rules = BTreeSet::from([Rule::Content]);
                    }
                    pending[lvl].push(pp);
                }
            }
            let mut eqs: Vec<Polynomial> = f.top_level_equations().into_iter().cloned().collect();
            if self.config.product_ec {
                eqs.extend(f.conjuncts().into_iter().filter_map(Formula::disjunctive_equation_product));
            }
            for eq in eqs {
                if let Some(v) = eq.main_var() {
                    if let Ok(ec) = EcDesignation::at_level(&eq, v, BTreeSet::from([id]), Provenance::Input) {
                        candidates[v.0].push(ec);
                    }
                }
            }
        }
        let use_ecs = self.config.policy == Operator::Reduced;
        self.stats.unsat_certificate = false;
        for l in (0..n).rev() {
            let mut cands = std::mem::take(&mut candidates[l]);
            cands.sort_by_key(|c| {
                (
                    c.polynomial.degree(c.level).unwrap_or(0),
                    c.polynomial.total_degree().unwrap_or(0),
                    c.provenance == Provenance::Propagated,
                )
            });
            let ec = if use_ecs { cands.first().cloned() } else { None };
            if let Some(d) = &ec {
                for other in &cands[1..] {
                    match propagate_with(d, other, &mut self.cache) {
                        Propagation::Designated(e) => {
                            for piece in self.cache.pieces(&e.polynomial) {
                                let lvl = piece.main_var().unwrap().0;
                                let mut pp = ProjPoly::input(piece, ConstraintId(0));
                                pp.origins = e.origins.clone();
                                pp.rules = BTreeSet::from([Rule::Propagated]);
                                pending[lvl].push(pp);
                            }
                            candidates[e.level.0].push(e);
                        }
                        Propagation::Unsatisfiable(_) => self.stats.unsat_certificate = true,
                        Propagation::NoEc => {}
                    }
                }
            }
            let members = coprime_basis(std::mem::take(&mut pending[l]), &mut self.cache);
            let level = ProjectionLevel { level: Variable(l), members };
            let base = match (&ec, self.config.policy) {
                (Some(_), _) => Operator::Reduced,
                (None, Operator::Collins) => Operator::Collins,
                (None, _) => Operator::McCallum,
            };
            let op = base.max(self.escalations[l]);
            self.projections[l] = if l == 0 {
                None
            } else {
                let proj = match op {
                    Operator::Reduced => {
                        let mask = ec_members(&level, &ec.as_ref().unwrap().polynomial);
                        reduced_with(&level.members, &mask, level.level, &mut self.cache)
                    }
                    Operator::McCallum => mccallum_with(&level.members, level.level, &mut self.cache),
                    Operator::Collins => collins_with(&level.members, level.level, &mut self.cache),
                };
                for pp in &proj.polys {
                    pending[pp.poly.main_var().unwrap().0].push(pp.clone());
                }
                Some(proj)
            };
            self.levels[l] = level;
            self.ec_chain[l] = ec;
            self.operators[l] = op;
        }
    }

    fn plans(&self) -> Vec<LevelPlan> {
        self.levels
            .iter()
            .enumerate()
            .map(|(l, level)| {
                let operator = self.operators[l];
                let ec = match (operator, &self.ec_chain[l]) {
                    (Operator::Reduced, Some(d)) => Some(ec_members(level, &d.polynomial)),
                    _ => None,
                };
                LevelPlan { polys: level.polys().into_iter().cloned().collect(), ec, operator }
            })
            .collect()
    }

    /// Bring projection levels and the tree up to date with the staged
    /// constraints, escalating operators wherever lifting reports
    /// nullification.
    pub fn refresh(&mut self) -> Result<(), EngineError> {
        let start = Instant::now();
        let deadline = self.config.time_cap.map(|d| start + d);
        let before = self.built.then(|| self.operators.clone());
        self.escalations = vec![Operator::Reduced; self.num_vars()];
        let matrix = self.matrix();
        let mut repairs = 0;
        let mut lift_stats;
        let old = std::mem::replace(&mut self.root, Cell::root());
        let old_ref = self.built.then_some(&old);
        self.stats.nullifications.clear();
        let root = loop {
            self.compute_projection();
            let plans = self.plans();
            let budget = Budget { cell_cap: self.config.cell_cap, deadline };
            lift_stats = LiftStats::default();
            match lift_tree(&plans, &matrix, &budget, old_ref, &mut lift_stats) {
                Ok(root) => break root,
                Err(LiftError::Nullified(report)) => {
                    self.escalate(&report)?;
                    repairs += 1;
                }
                Err(e) => {
                    self.root = old;
                    self.dirty = true;
                    return Err(match e {
                        LiftError::CellCap(c) => EngineError::CellCap(c),
                        _ => EngineError::Timeout,
                    });
                }
            }
        };
        self.root = root;
        self.built = true;
        self.dirty = false;
        let flips: Vec<OperatorFlip> = match before {
            Some(prev) => prev
                .iter()
                .zip(&self.operators)
                .enumerate()
                .filter(|(_, (a, b))| a != b)
                .map(|(level, (&from, &to))| OperatorFlip { level, from, to })
                .collect(),
            None => Vec::new(),
        };
        let cells = self.root.count() - 1;
        let leaves = self.root.leaves().len();
        let s = &mut self.stats;
        s.ec_escalation = flips.iter().any(|f| f.from == Operator::Reduced && f.to > Operator::Reduced);
        s.operator_flips = flips;
        s.refreshes += 1;
        s.repairs += repairs;
        s.last_repairs = repairs;
        s.lift_stacks += lift_stats.stacks;
        s.preserved_cells = lift_stats.preserved;
        s.created_cells = lift_stats.created;
        s.cells = cells;
        s.leaves = leaves;
        s.cache_hits = self.cache.hits;
        s.cache_misses = self.cache.misses;
        self.stats.levels = self.level_stats();
        Ok(())
    }

    fn level_stats(&self) -> Vec<LevelStats> {
        (0..self.num_vars())
            .map(|l| LevelStats {
                variable: self.names[l].clone(),
                operator: self.operators[l],
                members: self.levels[l].len(),
                ec: self.ec_chain[l].as_ref().map(|d| d.polynomial.display_with(&self.names).to_string()),
                raw: self.projections[l].as_ref().map(|p| p.raw),
                normalized: self.projections[l].as_ref().map(|p| p.normalized),
            })
            .collect()
    }

    /// Recompute the projection levels only, without lifting. The tree is
    /// left stale and rebuilt by the next query.
    pub fn project_only(&mut self) -> &[LevelStats] {
        self.escalations = vec![Operator::Reduced; self.num_vars()];
        self.compute_projection();
        self.stats.levels = self.level_stats();
        self.dirty = true;
        &self.stats.levels
    }

    fn escalate(&mut self, report: &NullificationReport) -> Result<(), EngineError> {
        let l = report.level.0;
        let next = self.operators[l]
            .escalate()
            .ok_or_else(|| EngineError::Internal(format!("nullification under collins: {report}")))?;
        self.escalations[l] = next;
        self.stats.nullifications.push(report.describe(&self.names));
        Ok(())
    }

    fn ensure_fresh(&mut self) -> Result<(), EngineError> {
        if self.dirty {
            self.refresh()?;
        }
        Ok(())
    }

    fn names_where(&self, quantified: bool) -> Vec<String> {
        self.prefix
            .iter()
            .zip(&self.names)
            .filter(|(q, _)| q.is_some() == quantified)
            .map(|(_, n)| n.clone())
            .collect()
    }

    /// Satisfiability of the conjunction of all constraints. The witness
    /// is the sample of the first true cell in index order.
    pub fn check_sat(&mut self) -> Result<Verdict, EngineError> {
        let quantified = self.names_where(true);
        if !quantified.is_empty() {
            return Err(EngineError::QuantifiedVariables(quantified));
        }
        self.ensure_fresh()?;
        let leaf = self.root.leaves().into_iter().find(|c| c.truth == Truth::True).cloned();
        let kind = match leaf {
            Some(cell) => {
                let matrix = self.matrix();
                if !matrix.eval(&mut |p| sign_at(p, &cell.sample)) {
                    return Err(EngineError::Internal(format!("witness for cell {:?} fails validation", cell.index)));
                }
                VerdictKind::Sat(cell.sample)
            }
            None => VerdictKind::Unsat,
        };
        Ok(Verdict { kind, stats: self.stats.clone() })
    }

    /// Truth of the sentence with every variable quantified by the prefix.
    pub fn decide(&mut self) -> Result<Verdict, EngineError> {
        let free = self.names_where(false);
        if !free.is_empty() {
            return Err(EngineError::FreeVariables(free));
        }
        self.ensure_fresh()?;
        let value = fold(&self.root, &self.prefix);
        let kind = if value { VerdictKind::True } else { VerdictKind::False };
        Ok(Verdict { kind, stats: self.stats.clone() })
    }

    /// True cells of R^n with their samples, in index order.
    pub fn true_cells(&mut self) -> Result<Vec<(Vec<usize>, SamplePoint)>, EngineError> {
        let quantified = self.names_where(true);
        if !quantified.is_empty() {
            return Err(EngineError::QuantifiedVariables(quantified));
        }
        self.ensure_fresh()?;
        Ok(self
            .root
            .leaves()
            .into_iter()
            .filter(|c| c.truth == Truth::True)
            .map(|c| (c.index.clone(), c.sample.clone()))
            .collect())
    }
}

fn fold(cell: &Cell, prefix: &[Option<Quantifier>]) -> bool {
    if cell.children.is_empty() {
        return cell.truth == Truth::True;
    }
    match prefix[cell.level()] {
        Some(Quantifier::Forall) => cell.children.iter().all(|c| fold(c, prefix)),
        _ => cell.children.iter().any(|c| fold(c, prefix)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Relation;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    fn atom(s: &str, rel: Relation, vars: &[&str]) -> Formula {
        Formula::atom(Polynomial::parse(s, vars).unwrap(), rel)
    }

    fn xy(constraints: Vec<Formula>, policy: Operator) -> SolverState {
        let config = EngineConfig { policy, ..EngineConfig::default() };
        SolverState::build(names(&["x", "y"]), vec![None, None], constraints, config).unwrap()
    }

    const XY: &[&str] = &["x", "y"];

    #[test]
    fn circle_and_half_plane_uses_reduced_operator() {
        let s = xy(
            vec![atom("x^2+y^2-1", Relation::Eq, XY), atom("x+y", Relation::Gt, XY)],
            Operator::Reduced,
        );
        assert_eq!(s.operators()[1], Operator::Reduced);
        let p = |t: &str| Polynomial::parse(t, XY).unwrap();
        assert_eq!(s.level_sets()[0], BTreeSet::from([p("x^2-1"), p("2*x^2-1")]));
    }

    #[test]
    fn one_variable_has_three_cells() {
        let mut s = SolverState::build(
            names(&["x"]),
            vec![None],
            vec![atom("x", Relation::Gt, &["x"])],
            EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(s.stats().cells, 3);
        let cells = s.true_cells().unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].0, vec![3]);
    }

    #[test]
    fn named_sat_instances() {
        for policy in [Operator::Reduced, Operator::McCallum, Operator::Collins] {
            let mut unsat = xy(vec![atom("x^2+y^2-1", Relation::Eq, XY), atom("x+y-2", Relation::Gt, XY)], policy);
            assert!(!unsat.check_sat().unwrap().is_sat());
            let mut sat = xy(vec![atom("x^2+y^2-1", Relation::Eq, XY), atom("x+y-1", Relation::Gt, XY)], policy);
            assert!(sat.check_sat().unwrap().is_sat());
        }
        let mut s = SolverState::build(names(&["x"]), vec![None], vec![atom("x^2+1", Relation::Le, &["x"])], EngineConfig::default())
            .unwrap();
        assert!(!s.check_sat().unwrap().is_sat());
    }

    #[test]
    fn true_cells_examples() {
        let mut s =
            SolverState::build(names(&["x"]), vec![None], vec![atom("x^2-1", Relation::Lt, &["x"])], EngineConfig::default())
                .unwrap();
        let cells = s.true_cells().unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].0, vec![3]);
        assert_eq!(cells[0].1.coords()[0].exact_rational(), Some(crate::Rational::from_integer(0.into())));
        let mut c = xy(vec![atom("x^2+y^2-1", Relation::Eq, XY)], Operator::Reduced);
        let circle = Polynomial::parse("x^2+y^2-1", XY).unwrap();
        let cells = c.true_cells().unwrap();
        assert!(!cells.is_empty());
        for (ix, sample) in cells {
            assert_eq!(ix[1] % 2, 0);
            assert_eq!(sign_at(&circle, &sample), crate::realalg::Sign::Zero);
        }
    }

    #[test]
    fn decide_examples() {
        let dec = |prefix: Vec<Quantifier>, vars: &[&str], f: Formula| {
            let mut s = SolverState::build(
                names(vars),
                prefix.into_iter().map(Some).collect(),
                vec![f],
                EngineConfig::default(),
            )
            .unwrap();
            s.decide().unwrap().label()
        };
        assert_eq!(dec(vec![Quantifier::Exists], &["x"], atom("x^2+1", Relation::Eq, &["x"])), "false");
        assert_eq!(dec(vec![Quantifier::Forall], &["x"], atom("x^2+1", Relation::Gt, &["x"])), "true");
        assert_eq!(
            dec(vec![Quantifier::Forall, Quantifier::Exists], XY, atom("y^2-x", Relation::Eq, XY)),
            "false"
        );
        assert_eq!(
            dec(vec![Quantifier::Exists, Quantifier::Exists], XY, atom("y^2-x", Relation::Eq, XY)),
            "true"
        );
    }

    #[test]
    fn removing_the_ec_escalates() {
        let mut s = xy(vec![atom("x^2+y^2-1", Relation::Eq, XY)], Operator::Reduced);
        let _g = s.add_constraint(atom("x+y", Relation::Gt, XY)).unwrap();
        assert_eq!(s.operators()[1], Operator::Reduced);
        s.remove_constraint(ConstraintId(0)).unwrap();
        assert_eq!(s.operators()[1], Operator::McCallum);
        assert!(s.stats().ec_escalation);
        assert!(s.check_sat().unwrap().is_sat());
        assert!(matches!(s.remove_constraint(ConstraintId(7)), Err(EngineError::UnknownConstraint(_))));
    }

    #[test]
    fn four_variable_nullification_is_repaired() {
        let vars = ["w", "x", "y", "z"];
        let cs = vec![atom("x*z+y", Relation::Gt, &vars), atom("w", Relation::Gt, &vars)];
        let mut s = SolverState::build(
            names(&vars),
            vec![None; 4],
            cs.clone(),
            EngineConfig { policy: Operator::McCallum, ..EngineConfig::default() },
        )
        .unwrap();
        assert_eq!(s.stats().last_repairs, 1);
        assert_eq!(s.operators()[3], Operator::Collins);
        let mut c = SolverState::build(
            names(&vars),
            vec![None; 4],
            cs,
            EngineConfig { policy: Operator::Collins, ..EngineConfig::default() },
        )
        .unwrap();
        assert_eq!(c.stats().last_repairs, 0);
        assert_eq!(s.check_sat().unwrap().label(), c.check_sat().unwrap().label());
    }

    #[test]
    fn mixed_prefix_rejected() {
        let mut s = SolverState::build(
            names(&["x", "y"]),
            vec![None, Some(Quantifier::Exists)],
            vec![atom("y-x", Relation::Eq, XY)],
            EngineConfig::default(),
        )
        .unwrap();
        assert!(matches!(s.check_sat(), Err(EngineError::QuantifiedVariables(_))));
        assert!(matches!(s.decide(), Err(EngineError::FreeVariables(_))));
    }
}
