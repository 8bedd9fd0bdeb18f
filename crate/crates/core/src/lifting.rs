//! Stack construction over cells, reduced lifting at equational-constraint
//! levels, and nullification detection.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use num_traits::Zero;

use crate::formula::Formula;
use crate::poly::{Polynomial, Rational, Variable};
use crate::projection::{ec_members, Operator, ProjectionLevel};
use crate::realalg::{
    compare, sample_above, sample_below, sample_between, sign_at, substitute_partial, AlgebraicNumber, SamplePoint,
    Sign,
};

/// A root of a level polynomial: the polynomial and the 1-based ordinal of
/// the root among its real roots in the fiber.
pub type SectionId = (Polynomial, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Truth {
    True,
    False,
    Undetermined,
}

/// Position of a cell within its stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place {
    /// The single cell of R^0.
    Root,
    /// Between two sections; `None` bounds are infinite.
    Sector { lower: Option<Vec<SectionId>>, upper: Option<Vec<SectionId>> },
    /// Graph of the root functions listed in `identity`.
    Section { identity: Vec<SectionId> },
}

type RootCache = HashMap<Polynomial, Option<Vec<AlgebraicNumber>>>;

#[derive(Clone, Debug)]
pub struct Cell {
    /// Collins index: odd entries are sectors, even entries sections.
    pub index: Vec<usize>,
    pub sample: SamplePoint,
    pub place: Place,
    pub truth: Truth,
    pub children: Vec<Cell>,
    /// Signs of the level polynomials that reduced lifting did not decompose.
    pub recorded_signs: Vec<(Polynomial, Sign)>,
    /// Sector of a reduced stack: off the equational constraint, not lifted.
    pub reduced_false: bool,
    roots: RootCache,
    signs: HashMap<Polynomial, Sign>,
}

impl Cell {
    /// The cell of R^0.
    pub fn root() -> Self {
        Cell {
            index: Vec::new(),
            sample: SamplePoint::new(),
            place: Place::Root,
            truth: Truth::Undetermined,
            children: Vec::new(),
            recorded_signs: Vec::new(),
            reduced_false: false,
            roots: HashMap::new(),
            signs: HashMap::new(),
        }
    }

    /// A cell with the given index and sample and no stack above it.
    pub fn new(index: Vec<usize>, sample: SamplePoint) -> Self {
        assert_eq!(index.len(), sample.len(), "index and sample lengths differ");
        let place = match index.last() {
            None => Place::Root,
            Some(k) if k % 2 == 1 => Place::Sector { lower: None, upper: None },
            Some(_) => Place::Section { identity: Vec::new() },
        };
        Cell { index, sample, place, ..Cell::root() }
    }

    pub fn level(&self) -> usize {
        self.index.len()
    }

    pub fn dimension(&self) -> usize {
        cell_dimension(self)
    }

    pub fn is_section(&self) -> bool {
        matches!(self.place, Place::Section { .. })
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Number of cells in the subtree, this one included.
    pub fn count(&self) -> usize {
        1 + self.children.iter().map(Cell::count).sum::<usize>()
    }

    /// Leaves in index order.
    pub fn leaves(&self) -> Vec<&Cell> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Cell>) {
        if self.children.is_empty() {
            out.push(self);
        } else {
            self.children.iter().for_each(|c| c.collect_leaves(out));
        }
    }

    /// Cells at depth `level` in index order.
    pub fn cells_at(&self, level: usize) -> Vec<&Cell> {
        let mut out = Vec::new();
        self.collect_level(level, &mut out);
        out
    }

    fn collect_level<'a>(&'a self, level: usize, out: &mut Vec<&'a Cell>) {
        if self.level() == level {
            out.push(self);
        } else {
            self.children.iter().for_each(|c| c.collect_level(level, out));
        }
    }

    /// Truth value of `formula` at the sample, caching atom signs.
    pub fn evaluate(&mut self, formula: &Formula) -> bool {
        let sample = &self.sample;
        let signs = &mut self.signs;
        formula.eval(&mut |p| *signs.entry(p.clone()).or_insert_with(|| sign_at(p, sample)))
    }
}

/// Number of sector entries in the index.
pub fn cell_dimension(c: &Cell) -> usize {
    c.index.iter().filter(|&&k| k % 2 == 1).count()
}

/// A projection polynomial vanished identically over a cell where the
/// operator in use needs it not to.
#[derive(Clone, Debug)]
pub struct NullificationReport {
    pub polynomial: Polynomial,
    pub cell_index: Vec<usize>,
    pub cell_dimension: usize,
    /// Variable whose stack was being built, so the offending projection
    /// is the one that eliminated this variable.
    pub level: Variable,
    pub operator: Operator,
}

impl NullificationReport {
    /// The report with variables printed under `names`.
    pub fn describe(&self, names: &[String]) -> String {
        let var = names.get(self.level.0).cloned().unwrap_or_else(|| self.level.to_string());
        format!(
            "{} vanishes over cell {:?} (dimension {}) under {} at {var}",
            self.polynomial.display_with(names),
            self.cell_index,
            self.cell_dimension,
            self.operator
        )
    }
}

impl fmt::Display for NullificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} vanishes over cell {:?} (dimension {}) under {} at {}",
            self.polynomial, self.cell_index, self.cell_dimension, self.operator, self.level
        )
    }
}

#[derive(Clone, Debug)]
pub enum LiftMode {
    Full(Operator),
    /// Decompose only with respect to the factors of this constraint.
    Reduced(Polynomial),
}

/// Which polynomials a stack is built from, and under which operator their
/// level was projected.
#[derive(Clone, Debug)]
pub struct LevelPlan {
    pub polys: Vec<Polynomial>,
    /// Members dividing the designated constraint, when lifting is reduced.
    pub ec: Option<Vec<bool>>,
    pub operator: Operator,
}

fn roots_in(cache: &mut RootCache, p: &Polynomial, sample: &SamplePoint) -> Option<Vec<AlgebraicNumber>> {
    cache
        .entry(p.clone())
        .or_insert_with(|| {
            let s = substitute_partial(p, sample);
            if s.is_nullified() {
                None
            } else {
                Some(s.isolate_roots())
            }
        })
        .clone()
}

fn stack_over(base: &mut Cell, plan: &LevelPlan) -> Result<Vec<Cell>, NullificationReport> {
    let var = Variable(base.level());
    let dim = base.dimension();
    let report = |p: &Polynomial, operator| NullificationReport {
        polynomial: p.clone(),
        cell_index: base.index.clone(),
        cell_dimension: dim,
        level: var,
        operator,
    };
    let all: Vec<usize> = (0..plan.polys.len()).collect();
    let mut reduced = false;
    let mut chosen = all.clone();
    if let Some(mask) = &plan.ec {
        let e: Vec<usize> = all.iter().copied().filter(|&i| mask[i]).collect();
        let nullified = e.iter().find(|&&i| roots_in(&mut base.roots, &plan.polys[i], &base.sample).is_none());
        match nullified {
            Some(&i) if dim > 0 => return Err(report(&plan.polys[i], Operator::Reduced)),
            // Over a point the constraint may vanish on the whole fiber:
            // decompose by everything instead.
            Some(_) => {}
            None => {
                reduced = true;
                chosen = e;
            }
        }
    }
    let mut found: Vec<(AlgebraicNumber, SectionId)> = Vec::new();
    for &i in &chosen {
        let p = &plan.polys[i];
        match roots_in(&mut base.roots, p, &base.sample) {
            Some(rs) => found.extend(rs.into_iter().enumerate().map(|(j, r)| (r, (p.clone(), j + 1)))),
            None if plan.operator == Operator::Collins || dim == 0 => {}
            None => return Err(report(p, plan.operator)),
        }
    }
    found.sort_by(|a, b| compare(&a.0, &b.0));
    let mut groups: Vec<(AlgebraicNumber, Vec<SectionId>)> = Vec::new();
    for (r, id) in found {
        match groups.last_mut() {
            Some((g, ids)) if compare(g, &r) == Ordering::Equal => ids.push(id),
            _ => groups.push((r, vec![id])),
        }
    }
    for (_, ids) in &mut groups {
        ids.sort();
    }
    let others: Vec<&Polynomial> =
        if reduced { all.iter().filter(|&&i| !chosen.contains(&i)).map(|&i| &plan.polys[i]).collect() } else { Vec::new() };
    let child = |k: usize, sample: SamplePoint, place: Place| {
        let mut index = base.index.clone();
        index.push(k);
        let is_sector = matches!(place, Place::Sector { .. });
        let recorded_signs = others.iter().map(|g| ((*g).clone(), sign_at(g, &sample))).collect();
        Cell {
            index,
            sample,
            place,
            truth: if reduced && is_sector { Truth::False } else { Truth::Undetermined },
            recorded_signs,
            reduced_false: reduced && is_sector,
            ..Cell::root()
        }
    };
    let m = groups.len();
    let mut out = Vec::with_capacity(2 * m + 1);
    for k in 0..=m {
        let value = if m == 0 {
            Rational::zero()
        } else if k == 0 {
            sample_below(&groups[0].0.interval())
        } else if k == m {
            sample_above(&groups[m - 1].0.interval())
        } else {
            sample_between(&groups[k - 1].0, &groups[k].0)
        };
        let lower = (k > 0).then(|| groups[k - 1].1.clone());
        let upper = (k < m).then(|| groups[k].1.clone());
        let sample = base.sample.extended(AlgebraicNumber::rational(var, value));
        out.push(child(2 * k + 1, sample, Place::Sector { lower, upper }));
        if k < m {
            let sample = base.sample.extended(groups[k].0.clone());
            out.push(child(2 * k + 2, sample, Place::Section { identity: groups[k].1.clone() }));
        }
    }
    Ok(out)
}

/// The stack over `base` with respect to the members of `polys`.
pub fn lift_cell(base: &Cell, polys: &ProjectionLevel, mode: &LiftMode) -> Result<Vec<Cell>, NullificationReport> {
    assert_eq!(base.level(), polys.level.0, "base cell must sit right below the level");
    let plan = match mode {
        LiftMode::Full(op) => LevelPlan { polys: polys.polys().into_iter().cloned().collect(), ec: None, operator: *op },
        LiftMode::Reduced(f) => {
            let mask = ec_members(polys, f);
            let ec = mask.iter().any(|&b| b).then_some(mask);
            let operator = if ec.is_some() { Operator::Reduced } else { Operator::McCallum };
            LevelPlan { polys: polys.polys().into_iter().cloned().collect(), ec, operator }
        }
    };
    let mut base = base.clone();
    stack_over(&mut base, &plan)
}

#[derive(Clone, Debug)]
pub enum LiftError {
    Nullified(NullificationReport),
    CellCap(usize),
    Timeout,
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub cell_cap: usize,
    pub deadline: Option<Instant>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct LiftStats {
    pub cells: usize,
    pub stacks: usize,
    /// Cells matched to a cell of the previous tree.
    pub preserved: usize,
    pub created: usize,
}

/// Whole CAD tree for `plans` (one per variable), evaluating `formula` at
/// every leaf. Caches of cells that also occur in `old` are carried over.
pub fn lift_tree(
    plans: &[LevelPlan],
    formula: &Formula,
    budget: &Budget,
    old: Option<&Cell>,
    stats: &mut LiftStats,
) -> Result<Cell, LiftError> {
    let mut root = Cell::root();
    stats.cells += 1;
    if old.is_some() {
        stats.preserved += 1;
    } else {
        stats.created += 1;
    }
    let mut lifter = Lifter { plans, formula, budget, stats };
    lifter.lift(&mut root, old)?;
    Ok(root)
}

struct Lifter<'a> {
    plans: &'a [LevelPlan],
    formula: &'a Formula,
    budget: &'a Budget,
    stats: &'a mut LiftStats,
}

fn overlaps(a: &Option<Vec<SectionId>>, b: &Option<Vec<SectionId>>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x.iter().any(|id| y.contains(id)),
        _ => false,
    }
}

fn same_place(new: &Place, old: &Place) -> bool {
    match (new, old) {
        (Place::Section { identity: a }, Place::Section { identity: b }) => a.iter().any(|id| b.contains(id)),
        (Place::Sector { lower: l1, upper: u1 }, Place::Sector { lower: l2, upper: u2 }) => {
            overlaps(l1, l2) && overlaps(u1, u2)
        }
        _ => false,
    }
}

impl Lifter<'_> {
    fn lift(&mut self, cell: &mut Cell, old: Option<&Cell>) -> Result<(), LiftError> {
        if let Some(o) = old {
            cell.roots = o.roots.clone();
            cell.signs = o.signs.clone();
        }
        let level = cell.level();
        if level == self.plans.len() {
            if !cell.reduced_false {
                cell.truth = if cell.evaluate(self.formula) { Truth::True } else { Truth::False };
            }
            return Ok(());
        }
        if let Some(deadline) = self.budget.deadline {
            if Instant::now() > deadline {
                return Err(LiftError::Timeout);
            }
        }
        let mut children = stack_over(cell, &self.plans[level]).map_err(LiftError::Nullified)?;
        self.stats.stacks += 1;
        self.stats.cells += children.len();
        if self.stats.cells > self.budget.cell_cap {
            return Err(LiftError::CellCap(self.budget.cell_cap));
        }
        for child in &mut children {
            let matched = old.and_then(|o| o.children.iter().find(|c| same_place(&child.place, &c.place)));
            match matched {
                Some(m) => {
                    child.sample = m.sample.clone();
                    self.stats.preserved += 1;
                }
                None => self.stats.created += 1,
            }
            if !child.reduced_false {
                self.lift(child, matched)?;
            }
        }
        cell.children = children;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::ConstraintId;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, &["x", "y", "z"]).unwrap()
    }

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn circle_over_origin_gives_five_cells() {
        let base = Cell::new(vec![3], SamplePoint::from_rationals(&[rat(0)]));
        let s = ProjectionLevel::from_polys(Variable(1), &[p("x^2+y^2-1")], ConstraintId(0));
        let stack = lift_cell(&base, &s, &LiftMode::Full(Operator::McCallum)).unwrap();
        let idx: Vec<usize> = stack.iter().map(|c| *c.index.last().unwrap()).collect();
        assert_eq!(idx, vec![1, 2, 3, 4, 5]);
        assert_eq!(stack[1].sample.coords()[1].exact_rational(), Some(rat(-1)));
        assert_eq!(stack[3].sample.coords()[1].exact_rational(), Some(rat(1)));
        assert_eq!(stack.iter().map(Cell::dimension).collect::<Vec<_>>(), vec![2, 1, 2, 1, 2]);
    }

    #[test]
    fn reduced_lift_ignores_other_roots() {
        let base = Cell::new(vec![3], SamplePoint::from_rationals(&[rat(0)]));
        let s = ProjectionLevel::from_polys(Variable(1), &[p("x^2+y^2-1"), p("x+y")], ConstraintId(0));
        let stack = lift_cell(&base, &s, &LiftMode::Reduced(p("x^2+y^2-1"))).unwrap();
        assert_eq!(stack.len(), 5);
        assert!(stack.iter().filter(|c| !c.is_section()).all(|c| c.reduced_false && c.truth == Truth::False));
        for c in &stack {
            assert_eq!(c.recorded_signs.len(), 1);
            assert_eq!(c.recorded_signs[0].1, sign_at(&p("x+y"), &c.sample));
        }
        let full = lift_cell(&base, &s, &LiftMode::Full(Operator::McCallum)).unwrap();
        assert_eq!(full.len(), 7);
    }

    #[test]
    fn nullification_over_positive_dimension_is_reported() {
        // order w < x < y < z, the cell w < 0, x = 0, y = 0
        let names = ["w", "x", "y", "z"];
        let f = Polynomial::parse("x*z+y", &names).unwrap();
        let base = Cell::new(vec![1, 2, 2], SamplePoint::from_rationals(&[rat(-1), rat(0), rat(0)]));
        let s = ProjectionLevel::from_polys(Variable(3), &[f], ConstraintId(0));
        let err = lift_cell(&base, &s, &LiftMode::Full(Operator::McCallum)).unwrap_err();
        assert_eq!(err.cell_dimension, 1);
        assert_eq!(err.level, Variable(3));
        // Collins tolerates it, and so does a point cell.
        assert_eq!(lift_cell(&base, &s, &LiftMode::Full(Operator::Collins)).unwrap().len(), 1);
        let point = Cell::new(vec![2, 2, 2], SamplePoint::from_rationals(&[rat(0), rat(0), rat(0)]));
        assert_eq!(lift_cell(&point, &s, &LiftMode::Full(Operator::McCallum)).unwrap().len(), 1);
    }

    #[test]
    fn dimension_from_index() {
        let mk = |ix: Vec<usize>| Cell::new(ix, SamplePoint::from_rationals(&[rat(0), rat(0)]));
        assert_eq!(cell_dimension(&mk(vec![1, 1])), 2);
        assert_eq!(cell_dimension(&mk(vec![2, 2])), 0);
        assert_eq!(cell_dimension(&mk(vec![2, 1])), 1);
    }
}
