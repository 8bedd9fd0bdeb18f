//! Projection operators (Collins, McCallum, and the reduced operator for a
//! designated equational constraint), level sets kept as coprime square-free
//! bases, and equational-constraint selection and propagation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{ConstraintId, Formula};
use crate::poly::{
    content_primitive, discriminant, gcd, level_pieces, resultant, squarefree_part, subresultant_psc, Polynomial,
    Rational, Variable,
};

/// Projection operators in escalation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Operator {
    #[serde(rename = "ec-reduced")]
    Reduced,
    #[serde(rename = "mccallum")]
    McCallum,
    #[serde(rename = "collins")]
    Collins,
}

impl Operator {
    /// Next operator on the ladder reduced, McCallum, Collins.
    pub fn escalate(self) -> Option<Operator> {
        match self {
            Operator::Reduced => Some(Operator::McCallum),
            Operator::McCallum => Some(Operator::Collins),
            Operator::Collins => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::Reduced => "ec-reduced",
            Operator::McCallum => "mccallum",
            Operator::Collins => "collins",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which rule produced a level-set member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Rule {
    Input,
    Content,
    Coefficient,
    Discriminant,
    Resultant,
    Psc,
    Propagated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoly {
    pub poly: Polynomial,
    pub origins: BTreeSet<ConstraintId>,
    pub operators: BTreeSet<Operator>,
    pub rules: BTreeSet<Rule>,
}

impl ProjPoly {
    pub fn input(poly: Polynomial, origin: ConstraintId) -> Self {
        ProjPoly {
            poly,
            origins: BTreeSet::from([origin]),
            operators: BTreeSet::new(),
            rules: BTreeSet::from([Rule::Input]),
        }
    }

    fn absorb(&mut self, other: &ProjPoly) {
        self.origins.extend(other.origins.iter().copied());
        self.operators.extend(other.operators.iter().copied());
        self.rules.extend(other.rules.iter().copied());
    }

    fn with_poly(&self, poly: Polynomial) -> ProjPoly {
        ProjPoly { poly, ..self.clone() }
    }
}

/// Per-rule counts of polynomials an operator generated, before constants
/// were dropped and before normalization or deduplication.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct RawCounts {
    pub coefficients: usize,
    pub discriminants: usize,
    pub resultants: usize,
    pub pscs: usize,
}

impl RawCounts {
    pub fn total(&self) -> usize {
        self.coefficients + self.discriminants + self.resultants + self.pscs
    }

    pub fn disc_res(&self) -> usize {
        self.discriminants + self.resultants
    }

    fn bump(&mut self, rule: Rule) {
        match rule {
            Rule::Coefficient => self.coefficients += 1,
            Rule::Discriminant => self.discriminants += 1,
            Rule::Resultant => self.resultants += 1,
            Rule::Psc => self.pscs += 1,
            Rule::Input | Rule::Content | Rule::Propagated => {}
        }
    }
}

/// Validity conditions an operator's output depends on.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Assumption {
    /// Projection polynomials must not vanish identically over cells of
    /// positive dimension below this level.
    WellOriented { level: Variable },
    /// The designated equational constraint is primitive at this level.
    PrimitiveConstraint { level: Variable },
}

/// The polynomials at one level: members have main variable `level`, are
/// normalized, square-free and pairwise coprime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionLevel {
    pub level: Variable,
    pub members: Vec<ProjPoly>,
}

impl ProjectionLevel {
    pub fn new(level: Variable) -> Self {
        ProjectionLevel { level, members: Vec::new() }
    }

    /// Level set generated by arbitrary polynomials with main variable
    /// `level`, each tagged as input of `origin`.
    pub fn from_polys(level: Variable, polys: &[Polynomial], origin: ConstraintId) -> Self {
        let mut cache = ProjectionCache::default();
        let items = polys
            .iter()
            .flat_map(|p| cache.pieces(p))
            .filter(|q| q.main_var() == Some(level))
            .map(|q| ProjPoly::input(q, origin))
            .collect();
        ProjectionLevel { level, members: coprime_basis(items, &mut cache) }
    }

    pub fn polys(&self) -> Vec<&Polynomial> {
        self.members.iter().map(|m| &m.poly).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Output of one projection step: normalized square-free pieces, each free
/// of the projected variable, plus bookkeeping.
#[derive(Clone, Debug, Default)]
pub struct Projection {
    pub polys: Vec<ProjPoly>,
    pub raw: RawCounts,
    /// Distinct normalized square-free outputs (at most `raw.total()`).
    pub normalized: usize,
    pub assumptions: Vec<Assumption>,
}

impl Projection {
    pub fn poly_set(&self) -> BTreeSet<Polynomial> {
        self.polys.iter().map(|p| p.poly.clone()).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("equational constraint is not primitive in {level}: content {content}")]
    NotPrimitive { level: Variable, content: Polynomial },
    #[error("equational constraint has degree 0 in {level}")]
    ZeroDegree { level: Variable },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Provenance {
    Input,
    Propagated,
}

/// An equational constraint designated at a level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EcDesignation {
    pub level: Variable,
    pub polynomial: Polynomial,
    pub origins: BTreeSet<ConstraintId>,
    pub provenance: Provenance,
}

impl EcDesignation {
    /// Designate `raw = 0` at its main variable, subject to the positive
    /// degree and primitivity gates.
    pub fn new(raw: &Polynomial, origins: BTreeSet<ConstraintId>, provenance: Provenance) -> Result<Self, ProjectionError> {
        let level = raw.main_var().ok_or(ProjectionError::ZeroDegree { level: Variable(0) })?;
        Self::at_level(raw, level, origins, provenance)
    }

    pub fn at_level(
        raw: &Polynomial,
        level: Variable,
        origins: BTreeSet<ConstraintId>,
        provenance: Provenance,
    ) -> Result<Self, ProjectionError> {
        if raw.degree(level).unwrap_or(0) == 0 || raw.main_var() != Some(level) {
            return Err(ProjectionError::ZeroDegree { level });
        }
        let (content, pp) = content_primitive(raw, level);
        if !content.is_constant() {
            return Err(ProjectionError::NotPrimitive { level, content });
        }
        Ok(EcDesignation { level, polynomial: pp, origins, provenance })
    }
}

/// Result of combining two equational constraints at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Designated(EcDesignation),
    /// The resultant is zero or fails a gate.
    NoEc,
    /// The resultant is a nonzero constant: the two equations have no
    /// common solution.
    Unsatisfiable(Rational),
}

/// Memo tables for the expensive algebra, shared across rebuilds.
#[derive(Default)]
pub struct ProjectionCache {
    pieces: HashMap<Polynomial, Vec<Polynomial>>,
    disc: HashMap<(Polynomial, Variable), Polynomial>,
    res: HashMap<(Polynomial, Polynomial, Variable), Polynomial>,
    psc: HashMap<(Polynomial, Polynomial, Variable), Vec<Polynomial>>,
    gcd: HashMap<(Polynomial, Polynomial), Polynomial>,
    pub hits: usize,
    pub misses: usize,
}

impl ProjectionCache {
    pub fn pieces(&mut self, p: &Polynomial) -> Vec<Polynomial> {
        if let Some(v) = self.pieces.get(p) {
            self.hits += 1;
            return v.clone();
        }
        self.misses += 1;
        let v = level_pieces(p);
        self.pieces.insert(p.clone(), v.clone());
        v
    }

    fn disc(&mut self, p: &Polynomial, v: Variable) -> Polynomial {
        let key = (p.clone(), v);
        if let Some(r) = self.disc.get(&key) {
            self.hits += 1;
            return r.clone();
        }
        self.misses += 1;
        let r = discriminant(p, v).expect("degree checked by caller");
        self.disc.insert(key, r.clone());
        r
    }

    fn ordered(a: &Polynomial, b: &Polynomial) -> (Polynomial, Polynomial) {
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    fn res(&mut self, a: &Polynomial, b: &Polynomial, v: Variable) -> Polynomial {
        let (x, y) = Self::ordered(a, b);
        let key = (x, y, v);
        if let Some(r) = self.res.get(&key) {
            self.hits += 1;
            return r.clone();
        }
        self.misses += 1;
        let r = resultant(&key.0, &key.1, v).expect("positive degrees checked by caller");
        self.res.insert(key, r.clone());
        r
    }

    /// psc chain with the higher-degree argument first.
    fn psc(&mut self, a: &Polynomial, b: &Polynomial, v: Variable) -> Vec<Polynomial> {
        let (x, y) = if a.degree(v) >= b.degree(v) { (a, b) } else { (b, a) };
        let key = (x.clone(), y.clone(), v);
        if let Some(r) = self.psc.get(&key) {
            self.hits += 1;
            return r.clone();
        }
        self.misses += 1;
        let r = subresultant_psc(x, y, v);
        self.psc.insert(key, r.clone());
        r
    }

    fn gcd(&mut self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        let key = Self::ordered(a, b);
        if let Some(g) = self.gcd.get(&key) {
            self.hits += 1;
            return g.clone();
        }
        self.misses += 1;
        let g = gcd(a, b);
        self.gcd.insert(key, g.clone());
        g
    }
}

/// Coarsest pairwise-coprime basis of square-free polynomials that all have
/// the same main variable. Inputs are processed in canonical order, so the
/// result does not depend on the order in which they were produced.
pub fn coprime_basis(mut items: Vec<ProjPoly>, cache: &mut ProjectionCache) -> Vec<ProjPoly> {
    items.sort_by(|a, b| a.poly.canonical_cmp(&b.poly));
    let mut merged: Vec<ProjPoly> = Vec::new();
    for it in items {
        match merged.last_mut() {
            Some(last) if last.poly == it.poly => last.absorb(&it),
            _ => merged.push(it),
        }
    }
    let mut basis: Vec<ProjPoly> = Vec::new();
    for item in merged {
        let mut pending = vec![item];
        while let Some(f) = pending.pop() {
            if f.poly.is_constant() {
                continue;
            }
            let mut placed = false;
            for i in 0..basis.len() {
                if basis[i].poly == f.poly {
                    basis[i].absorb(&f);
                    placed = true;
                    break;
                }
                let g = cache.gcd(&basis[i].poly, &f.poly);
                if g.is_constant() {
                    continue;
                }
                let b = basis.remove(i);
                let b_rest = b.poly.div_exact(&g).expect("gcd divides").normalize();
                let f_rest = f.poly.div_exact(&g).expect("gcd divides").normalize();
                let mut common = b.with_poly(g);
                common.absorb(&f);
                pending.push(common);
                pending.push(b.with_poly(b_rest));
                pending.push(f.with_poly(f_rest));
                placed = true;
                break;
            }
            if !placed {
                basis.push(f);
            }
        }
    }
    basis.sort_by(|a, b| a.poly.canonical_cmp(&b.poly));
    basis
}

struct Collector<'c> {
    level: Variable,
    op: Operator,
    cache: &'c mut ProjectionCache,
    out: BTreeMap<Polynomial, ProjPoly>,
    raw: RawCounts,
    normalized: HashSet<Polynomial>,
}

impl<'c> Collector<'c> {
    fn new(level: Variable, op: Operator, cache: &'c mut ProjectionCache) -> Self {
        Collector { level, op, cache, out: BTreeMap::new(), raw: RawCounts::default(), normalized: HashSet::new() }
    }

    fn add(&mut self, p: &Polynomial, origins: &BTreeSet<ConstraintId>, rule: Rule) {
        self.raw.bump(rule);
        debug_assert!(p.degree(self.level).unwrap_or(0) == 0, "projection output mentions {}", self.level);
        if p.is_constant() {
            return;
        }
        self.normalized.insert(squarefree_part(p, p.main_var().unwrap()));
        for piece in self.cache.pieces(p) {
            let entry = self.out.entry(piece.clone()).or_insert_with(|| ProjPoly {
                poly: piece,
                origins: BTreeSet::new(),
                operators: BTreeSet::new(),
                rules: BTreeSet::new(),
            });
            entry.origins.extend(origins.iter().copied());
            entry.operators.insert(self.op);
            entry.rules.insert(rule);
        }
    }

    fn finish(self, assumptions: Vec<Assumption>) -> Projection {
        let mut polys: Vec<ProjPoly> = self.out.into_values().collect();
        polys.sort_by(|a, b| a.poly.canonical_cmp(&b.poly));
        Projection { polys, raw: self.raw, normalized: self.normalized.len(), assumptions }
    }
}

fn union(a: &BTreeSet<ConstraintId>, b: &BTreeSet<ConstraintId>) -> BTreeSet<ConstraintId> {
    a.union(b).copied().collect()
}

fn add_coefficients(c: &mut Collector<'_>, m: &ProjPoly) {
    for coeff in m.poly.coeffs_in(c.level) {
        if !coeff.is_zero() {
            c.add(&coeff, &m.origins, Rule::Coefficient);
        }
    }
}

fn add_discriminant(c: &mut Collector<'_>, m: &ProjPoly) {
    if m.poly.degree(c.level).unwrap_or(0) >= 2 {
        let d = c.cache.disc(&m.poly, c.level);
        c.add(&d, &m.origins, Rule::Discriminant);
    }
}

fn add_resultant(c: &mut Collector<'_>, a: &ProjPoly, b: &ProjPoly) {
    let r = c.cache.res(&a.poly, &b.poly, c.level);
    c.add(&r, &union(&a.origins, &b.origins), Rule::Resultant);
}

pub(crate) fn mccallum_with(members: &[ProjPoly], level: Variable, cache: &mut ProjectionCache) -> Projection {
    let mut c = Collector::new(level, Operator::McCallum, cache);
    for m in members {
        add_coefficients(&mut c, m);
    }
    for m in members {
        add_discriminant(&mut c, m);
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            add_resultant(&mut c, &members[i], &members[j]);
        }
    }
    c.finish(vec![Assumption::WellOriented { level }])
}

/// Reducta `f, red f, red^2 f, ...`, stopping after the first one whose
/// leading coefficient is a nonzero constant (later reducta cannot matter
/// because that coefficient never vanishes) or at zero.
fn reducta(f: &Polynomial, v: Variable) -> Vec<Polynomial> {
    let mut out = Vec::new();
    let mut coeffs = f.coeffs_in(v);
    while let Some(lc) = coeffs.last().cloned() {
        out.push(Polynomial::from_coeffs(v, coeffs.clone()));
        if lc.is_constant() {
            break;
        }
        coeffs.pop();
        while coeffs.last().is_some_and(Polynomial::is_zero) {
            coeffs.pop();
        }
    }
    out
}

pub(crate) fn collins_with(members: &[ProjPoly], level: Variable, cache: &mut ProjectionCache) -> Projection {
    let mut c = Collector::new(level, Operator::Collins, cache);
    let reds: Vec<Vec<Polynomial>> = members.iter().map(|m| reducta(&m.poly, level)).collect();
    for (m, rs) in members.iter().zip(&reds) {
        for r in rs {
            c.add(&r.leading_coeff_in(level), &m.origins, Rule::Coefficient);
        }
        for r in rs {
            let d = r.degree(level).unwrap_or(0);
            if d < 2 {
                continue;
            }
            let chain = c.cache.psc(r, &r.derivative(level), level);
            for p in chain.iter().take(d - 1) {
                c.add(p, &m.origins, Rule::Psc);
            }
        }
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let origins = union(&members[i].origins, &members[j].origins);
            for a in reds[i].iter().filter(|r| r.degree(level).unwrap_or(0) > 0) {
                for b in reds[j].iter().filter(|r| r.degree(level).unwrap_or(0) > 0) {
                    let k = a.degree(level).unwrap().min(b.degree(level).unwrap());
                    let chain = c.cache.psc(a, b, level);
                    for p in chain.iter().take(k) {
                        c.add(p, &origins, Rule::Psc);
                    }
                }
            }
        }
    }
    c.finish(Vec::new())
}

/// Reduced operator: McCallum on the members `E` of the equational
/// constraint, plus resultants of each of them with every other member.
pub(crate) fn reduced_with(members: &[ProjPoly], in_ec: &[bool], level: Variable, cache: &mut ProjectionCache) -> Projection {
    let mut c = Collector::new(level, Operator::Reduced, cache);
    let e: Vec<&ProjPoly> = members.iter().zip(in_ec).filter(|(_, &b)| b).map(|(m, _)| m).collect();
    let rest: Vec<&ProjPoly> = members.iter().zip(in_ec).filter(|(_, &b)| !b).map(|(m, _)| m).collect();
    for m in &e {
        add_coefficients(&mut c, m);
    }
    for m in &e {
        add_discriminant(&mut c, m);
    }
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            add_resultant(&mut c, e[i], e[j]);
        }
    }
    for m in &e {
        for g in &rest {
            add_resultant(&mut c, m, g);
        }
    }
    c.finish(vec![Assumption::WellOriented { level }, Assumption::PrimitiveConstraint { level }])
}

/// Members of a level set that divide the designated constraint.
pub fn ec_members(level: &ProjectionLevel, ec: &Polynomial) -> Vec<bool> {
    level.members.iter().map(|m| ec.div_exact(&m.poly).is_some()).collect()
}

/// Collins projection of a level set.
pub fn project_collins(s: &ProjectionLevel) -> Projection {
    collins_with(&s.members, s.level, &mut ProjectionCache::default())
}

/// McCallum projection of a level set; the result carries the
/// well-orientedness assumption.
pub fn project_mccallum(s: &ProjectionLevel) -> Projection {
    mccallum_with(&s.members, s.level, &mut ProjectionCache::default())
}

/// Reduced projection of `s` with respect to the designated constraint `f`.
pub fn project_reduced(f: &EcDesignation, s: &ProjectionLevel) -> Result<Projection, ProjectionError> {
    let checked = EcDesignation::at_level(&f.polynomial, s.level, f.origins.clone(), f.provenance)?;
    let mut cache = ProjectionCache::default();
    let mut members = s.members.clone();
    let mut mask = ec_members(s, &checked.polynomial);
    if !mask.iter().any(|&b| b) {
        // The constraint is not in the set yet: add its square-free part.
        let sq = squarefree_part(&checked.polynomial, s.level);
        let mut items = members.clone();
        items.push(ProjPoly { poly: sq, origins: checked.origins.clone(), operators: BTreeSet::new(), rules: BTreeSet::from([Rule::Input]) });
        members = coprime_basis(items, &mut cache);
        let lvl = ProjectionLevel { level: s.level, members: members.clone() };
        mask = ec_members(&lvl, &checked.polynomial);
    }
    Ok(reduced_with(&members, &mask, s.level, &mut cache))
}

/// Combine two constraints designated at the same level.
pub fn propagate_ec(f1: &EcDesignation, f2: &EcDesignation) -> Propagation {
    assert_eq!(f1.level, f2.level, "constraints must share a level");
    propagate_with(f1, f2, &mut ProjectionCache::default())
}

pub(crate) fn propagate_with(f1: &EcDesignation, f2: &EcDesignation, cache: &mut ProjectionCache) -> Propagation {
    let r = cache.res(&f1.polynomial, &f2.polynomial, f1.level);
    if r.is_zero() {
        return Propagation::NoEc;
    }
    if let Some(c) = r.as_constant() {
        return Propagation::Unsatisfiable(c.clone());
    }
    match EcDesignation::new(&r, union(&f1.origins, &f2.origins), Provenance::Propagated) {
        Ok(ec) => Propagation::Designated(ec),
        Err(_) => Propagation::NoEc,
    }
}

/// Order candidates by degree in the level variable, then total degree;
/// ties keep their given order.
pub fn rank_candidates(cands: &mut [EcDesignation]) {
    cands.sort_by_key(|c| (c.polynomial.degree(c.level).unwrap_or(0), c.polynomial.total_degree().unwrap_or(0)));
}

/// Equational constraint for `level` among the top-level equations of
/// `formula`, after the primitivity and degree gates and the tie-break.
pub fn choose_ec(formula: &Formula, level: Variable) -> Option<EcDesignation> {
    let mut cands: Vec<EcDesignation> = formula
        .top_level_equations()
        .into_iter()
        .filter(|p| p.main_var() == Some(level))
        .filter_map(|p| EcDesignation::at_level(p, level, BTreeSet::new(), Provenance::Input).ok())
        .collect();
    rank_candidates(&mut cands);
    cands.into_iter().next()
}
