//! Real algebraic numbers, root isolation over algebraic sample points and
//! exact sign determination.
//!
//! A coordinate at level `k` is stored relative to the coordinates below it:
//! its defining polynomial has main variable `x_k` and may mention lower
//! variables, which are read at the base coordinates. The isolating interval
//! contains exactly one root of the specialized defining polynomial, that
//! root is simple, and neither endpoint is a root.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::{
    content_primitive, resultant, squarefree_part, u_pseudo_divide, u_subresultant_chain, Polynomial, Rational,
    Variable,
};

/// Number of interval rounds before sign determination switches to the exact
/// zero test.
const INTERVAL_ROUNDS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(r: &Rational) -> Sign {
        if r.is_zero() {
            Sign::Zero
        } else if r.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(r: Rational) -> Self {
        Interval { lo: r.clone(), hi: r }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    fn excludes_zero(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Positive)
        } else if self.hi.is_negative() {
            Some(Sign::Negative)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Sign::Zero)
        } else {
            None
        }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    fn mul(&self, o: &Interval) -> Interval {
        if self.lo == self.hi && o.lo == o.hi {
            return Interval::point(&self.lo * &o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealAlgError {
    #[error("cannot isolate the roots of the zero polynomial")]
    ZeroPolynomial,
    #[error("expected a polynomial in a single variable")]
    NotUnivariate,
}

/// A real algebraic number. Clones share refinement state.
#[derive(Clone)]
pub struct AlgebraicNumber(Arc<Inner>);

struct Inner {
    var: Variable,
    defining: Polynomial,
    base: Vec<AlgebraicNumber>,
    state: Mutex<RootState>,
}

#[derive(Clone)]
struct RootState {
    lo: Rational,
    hi: Rational,
    sign_lo: Sign,
    exact: Option<Rational>,
}

impl AlgebraicNumber {
    /// The rational `r` as the coordinate for `var`.
    pub fn rational(var: Variable, r: Rational) -> Self {
        let defining = &Polynomial::var(var) - &Polynomial::constant(r.clone());
        AlgebraicNumber(Arc::new(Inner {
            var,
            defining,
            base: Vec::new(),
            state: Mutex::new(RootState { lo: r.clone(), hi: r.clone(), sign_lo: Sign::Zero, exact: Some(r) }),
        }))
    }

    fn isolated(var: Variable, defining: Polynomial, base: &[AlgebraicNumber], lo: Rational, hi: Rational, sign_lo: Sign) -> Self {
        AlgebraicNumber(Arc::new(Inner {
            var,
            defining,
            base: base.to_vec(),
            state: Mutex::new(RootState { lo, hi, sign_lo, exact: None }),
        }))
    }

    fn state(&self) -> MutexGuard<'_, RootState> {
        self.0.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn var(&self) -> Variable {
        self.0.var
    }

    /// Defining polynomial; its main variable is [`Self::var`] and it may
    /// involve the variables of [`Self::base`].
    pub fn defining(&self) -> &Polynomial {
        &self.0.defining
    }

    /// Coordinates the defining polynomial is read over.
    pub fn base(&self) -> &[AlgebraicNumber] {
        &self.0.base
    }

    pub fn exact_rational(&self) -> Option<Rational> {
        self.state().exact.clone()
    }

    pub fn is_rational(&self) -> bool {
        self.state().exact.is_some()
    }

    /// Current isolating interval (degenerate for exact rationals).
    pub fn interval(&self) -> Interval {
        let st = self.state();
        match &st.exact {
            Some(r) => Interval::point(r.clone()),
            None => Interval { lo: st.lo.clone(), hi: st.hi.clone() },
        }
    }

    /// One bisection step.
    pub fn refine_once(&self) {
        let (lo, hi, sign_lo) = {
            let st = self.state();
            if st.exact.is_some() {
                return;
            }
            (st.lo.clone(), st.hi.clone(), st.sign_lo)
        };
        let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
        let s = sign_inner(&self.0.defining.eval_var(self.0.var, &mid), &self.0.base);
        let mut st = self.state();
        if st.exact.is_some() || st.lo != lo || st.hi != hi {
            return;
        }
        if s == Sign::Zero {
            st.lo = mid.clone();
            st.hi = mid.clone();
            st.exact = Some(mid);
        } else if s == sign_lo {
            st.lo = mid;
        } else {
            st.hi = mid;
        }
    }

    /// Refine until the isolating interval has width at most `width`.
    pub fn refine_to(&self, width: &Rational) {
        while self.interval().width() > *width {
            self.refine_once();
        }
    }

    /// Floating-point approximation (midpoint of the current interval).
    pub fn approx_f64(&self) -> f64 {
        let iv = self.interval();
        ((iv.lo + iv.hi) / Rational::from_integer(BigInt::from(2))).to_f64().unwrap_or(f64::NAN)
    }

    /// Rename the variable of a number defined without base coordinates.
    pub fn with_var(&self, var: Variable) -> Self {
        if self.0.var == var {
            return self.clone();
        }
        assert!(self.0.base.is_empty(), "only absolute numbers can be renamed");
        let st = self.state().clone();
        AlgebraicNumber(Arc::new(Inner {
            var,
            defining: self.0.defining.with_var(var),
            base: Vec::new(),
            state: Mutex::new(st),
        }))
    }

    /// A square-free polynomial in [`Self::var`] alone that vanishes at this
    /// number, obtained by eliminating the base coordinates with resultants.
    /// `None` when the elimination degenerates to the zero polynomial.
    pub fn absolute_polynomial(&self) -> Option<Polynomial> {
        if let Some(r) = self.exact_rational() {
            return Some(&Polynomial::var(self.0.var) - &Polynomial::constant(r));
        }
        let mut acc = self.0.defining.clone();
        for c in self.0.base.iter().rev() {
            if acc.degree(c.var()).unwrap_or(0) == 0 {
                continue;
            }
            acc = match c.exact_rational() {
                Some(r) => acc.eval_var(c.var(), &r),
                None => resultant(&acc, c.defining(), c.var()).ok()?,
            };
            if acc.is_zero() {
                return None;
            }
        }
        Some(squarefree_part(&acc, self.0.var))
    }

    pub fn compare(&self, other: &AlgebraicNumber) -> Ordering {
        compare(self, other)
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = self.state();
        match &st.exact {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "root of {} in ({}, {})", self.0.defining, st.lo, st.hi),
        }
    }
}

/// Coordinates `x_0 .. x_{k-1}` of a point.
#[derive(Clone, Debug, Default)]
pub struct SamplePoint {
    coords: Vec<AlgebraicNumber>,
}

impl SamplePoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rationals(values: &[Rational]) -> Self {
        let coords = values
            .iter()
            .enumerate()
            .map(|(i, r)| AlgebraicNumber::rational(Variable(i), r.clone()))
            .collect();
        SamplePoint { coords }
    }

    pub fn coords(&self) -> &[AlgebraicNumber] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// This point extended by one more coordinate, which must be defined
    /// over this point.
    pub fn extended(&self, next: AlgebraicNumber) -> SamplePoint {
        assert_eq!(next.var(), Variable(self.coords.len()));
        let mut coords = self.coords.clone();
        coords.push(next);
        SamplePoint { coords }
    }

    /// Approximations of every coordinate.
    pub fn approx_f64(&self) -> Vec<f64> {
        self.coords.iter().map(AlgebraicNumber::approx_f64).collect()
    }
}

// ---------------------------------------------------------------------------
// Sign determination

/// Exact sign of `p` at `s`. Every variable of `p` must be a coordinate of `s`.
pub fn sign_at(p: &Polynomial, s: &SamplePoint) -> Sign {
    sign_inner(p, s.coords())
}

fn substitute_exact(p: &Polynomial, coords: &[AlgebraicNumber]) -> Polynomial {
    let mut out = p.clone();
    for v in p.variables() {
        if let Some(r) = coords.get(v.0).and_then(AlgebraicNumber::exact_rational) {
            out = out.eval_var(v, &r);
        }
    }
    out
}

fn interval_eval(p: &Polynomial, coords: &[AlgebraicNumber]) -> Interval {
    match p.as_constant() {
        Some(c) => Interval::point(c.clone()),
        None => {
            let v = p.main_var().unwrap();
            let x = coords[v.0].interval();
            let cs = p.main_coeffs();
            let mut acc = interval_eval(cs.last().unwrap(), coords);
            for c in cs.iter().rev().skip(1) {
                acc = acc.mul(&x).add(&interval_eval(c, coords));
            }
            acc
        }
    }
}

fn refine_vars(p: &Polynomial, coords: &[AlgebraicNumber]) {
    for v in p.variables() {
        coords[v.0].refine_once();
    }
}

/// Refine until interval evaluation excludes zero. Only valid when the value
/// is known to be nonzero.
fn nonzero_enclosure(p: &Polynomial, coords: &[AlgebraicNumber]) -> (Sign, Interval) {
    loop {
        let iv = interval_eval(p, coords);
        if let Some(s) = iv.excludes_zero() {
            return (s, iv);
        }
        refine_vars(p, coords);
    }
}

pub(crate) fn sign_inner(p: &Polynomial, coords: &[AlgebraicNumber]) -> Sign {
    if let Some(c) = p.as_constant() {
        return Sign::of(c);
    }
    let p = substitute_exact(p, coords);
    if let Some(c) = p.as_constant() {
        return Sign::of(c);
    }
    for _ in 0..INTERVAL_ROUNDS {
        if let Some(s) = interval_eval(&p, coords).excludes_zero() {
            return s;
        }
        refine_vars(&p, coords);
    }
    let k = p.main_var().unwrap();
    let lower = &coords[..k.0];
    let cs = p.main_coeffs();
    let Some(top) = (0..cs.len()).rev().find(|&i| sign_inner(&cs[i], lower) != Sign::Zero) else {
        return Sign::Zero;
    };
    if top == 0 {
        return sign_inner(&cs[0], lower);
    }
    let truncated = Polynomial::from_coeffs(k, cs[..=top].to_vec());
    if vanishes_at_root(&truncated, &coords[k.0], lower) {
        return Sign::Zero;
    }
    nonzero_enclosure(&p, coords).0
}

/// Whether `p(base, a) = 0`, where `p` has main variable `a.var()` and a
/// leading coefficient that does not vanish at `base`.
///
/// The gcd of `p` and the defining polynomial of `a` over `base` is read off
/// the subresultant chain; `a` is a root of `p` exactly when that gcd changes
/// sign across the isolating interval of `a`.
fn vanishes_at_root(p: &Polynomial, a: &AlgebraicNumber, base: &[AlgebraicNumber]) -> bool {
    let k = a.var();
    let q = a.defining();
    let (pc, qc) = (p.coeffs_in(k), q.coeffs_in(k));
    let chain = if pc.len() >= qc.len() { u_subresultant_chain(&pc, &qc) } else { u_subresultant_chain(&qc, &pc) };
    let entry = chain
        .iter()
        .rev()
        .find(|e| sign_inner(&e.psc, base) != Sign::Zero)
        .expect("first subresultant has a nonvanishing coefficient");
    if entry.degree == 0 {
        return false;
    }
    let g = Polynomial::from_coeffs(k, entry.poly.clone());
    let iv = a.interval();
    if iv.lo == iv.hi {
        return sign_inner(&g.eval_var(k, &iv.lo), base) == Sign::Zero;
    }
    let s_lo = sign_inner(&g.eval_var(k, &iv.lo), base);
    let s_hi = sign_inner(&g.eval_var(k, &iv.hi), base);
    s_lo != s_hi
}

// ---------------------------------------------------------------------------
// Comparison

fn separated(a: &AlgebraicNumber, b: &AlgebraicNumber) -> Option<Ordering> {
    let (ia, ib) = (a.interval(), b.interval());
    if let (Some(x), Some(y)) = (a.exact_rational(), b.exact_rational()) {
        return Some(x.cmp(&y));
    }
    if ia.hi <= ib.lo {
        Some(Ordering::Less)
    } else if ib.hi <= ia.lo {
        Some(Ordering::Greater)
    } else {
        None
    }
}

/// Exact comparison of two numbers at the same level over the same base
/// coordinates (or two numbers without base coordinates).
pub fn compare(a: &AlgebraicNumber, b: &AlgebraicNumber) -> Ordering {
    if Arc::ptr_eq(&a.0, &b.0) {
        return Ordering::Equal;
    }
    if a.var() != b.var() && a.base().is_empty() && b.base().is_empty() {
        return compare(&a.with_var(Variable(0)), &b.with_var(Variable(0)));
    }
    for _ in 0..INTERVAL_ROUNDS {
        if let Some(o) = separated(a, b) {
            return o;
        }
        a.refine_once();
        b.refine_once();
    }
    // The side that is not exact provides the defining polynomial.
    let (x, y, flip) = if b.is_rational() { (b, a, true) } else { (a, b, false) };
    let mut coords = y.base().to_vec();
    if coords.len() < x.var().0 {
        coords = x.base().to_vec();
    }
    coords.push(x.clone());
    let ord = if sign_inner(y.defining(), &coords) == Sign::Zero {
        loop {
            if let Some(o) = separated(x, y) {
                break o;
            }
            let (ix, iy) = (x.interval(), y.interval());
            if iy.lo < ix.lo && ix.hi < iy.hi {
                break Ordering::Equal;
            }
            x.refine_once();
        }
    } else {
        loop {
            if let Some(o) = separated(x, y) {
                break o;
            }
            x.refine_once();
            y.refine_once();
        }
    };
    if flip {
        ord.reverse()
    } else {
        ord
    }
}

/// Shrink `a` until its interval has width at most `width`, returning it.
pub fn refine(a: &AlgebraicNumber, width: &Rational) -> AlgebraicNumber {
    a.refine_to(width);
    a.clone()
}

// ---------------------------------------------------------------------------
// Root isolation

/// A polynomial with its lower coordinates fixed at a sample point, ready
/// for root isolation in the next variable.
#[derive(Clone, Debug)]
pub struct Substituted {
    var: Variable,
    poly: Polynomial,
    base: Vec<AlgebraicNumber>,
    nullified: bool,
}

impl Substituted {
    /// True when every coefficient in the next variable vanishes at the point.
    pub fn is_nullified(&self) -> bool {
        self.nullified
    }

    /// The polynomial with exact coordinates substituted and vanishing
    /// leading coefficients removed.
    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn var(&self) -> Variable {
        self.var
    }

    /// Distinct real roots in ascending order. Empty when nullified.
    pub fn isolate_roots(&self) -> Vec<AlgebraicNumber> {
        if self.nullified || self.poly.degree(self.var).unwrap_or(0) == 0 {
            return Vec::new();
        }
        let q = squarefree_at(&self.poly, self.var, &self.base);
        descartes_isolate(&q, self.var, &self.base)
    }
}

/// Fix the coordinates of `s` in `p`, whose remaining variable is the one
/// right above the point.
pub fn substitute_partial(p: &Polynomial, s: &SamplePoint) -> Substituted {
    substitute_over(p, s.coords())
}

pub(crate) fn substitute_over(p: &Polynomial, base: &[AlgebraicNumber]) -> Substituted {
    let var = Variable(base.len());
    assert!(p.main_var().is_none_or(|v| v <= var), "polynomial has variables above the point");
    let p = substitute_exact(p, base);
    let cs = p.coeffs_in(var);
    let top = (0..cs.len()).rev().find(|&i| sign_inner(&cs[i], base) != Sign::Zero);
    match top {
        None => Substituted { var, poly: Polynomial::zero(), base: base.to_vec(), nullified: true },
        Some(t) => Substituted {
            var,
            poly: Polynomial::from_coeffs(var, cs[..=t].to_vec()),
            base: base.to_vec(),
            nullified: false,
        },
    }
}

/// Roots of a polynomial in one variable, ascending.
pub fn isolate_roots(p: &Polynomial) -> Result<Vec<AlgebraicNumber>, RealAlgError> {
    if p.is_zero() {
        return Err(RealAlgError::ZeroPolynomial);
    }
    let vars = p.variables();
    if vars.len() > 1 {
        return Err(RealAlgError::NotUnivariate);
    }
    let Some(&v) = vars.iter().next() else {
        return Ok(Vec::new());
    };
    let p0 = p.with_var(Variable(0));
    let roots = substitute_over(&p0, &[]).isolate_roots();
    Ok(roots.into_iter().map(|r| if v.0 == 0 { r } else { r.with_var(v) }).collect())
}

/// A polynomial whose roots over `base` are the distinct roots of `p` over
/// `base`, each simple, with a leading coefficient nonzero at `base`.
fn squarefree_at(p: &Polynomial, k: Variable, base: &[AlgebraicNumber]) -> Polynomial {
    let cs = p.coeffs_in(k);
    if cs.iter().all(Polynomial::is_constant) {
        return squarefree_part(p, k);
    }
    let d = p.derivative(k);
    let chain = u_subresultant_chain(&cs, &d.coeffs_in(k));
    let entry = chain
        .iter()
        .rev()
        .find(|e| sign_inner(&e.psc, base) != Sign::Zero)
        .expect("first subresultant has a nonvanishing coefficient");
    let q = if entry.degree == 0 {
        p.clone()
    } else {
        let (quo, _) = u_pseudo_divide(&cs, &entry.poly);
        Polynomial::from_coeffs(k, quo)
    };
    content_primitive(&q, k).1
}

fn taylor_shift(c: &mut [Polynomial], s: &Rational) {
    let n = c.len();
    if s.is_zero() {
        return;
    }
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            let t = c[j + 1].scale(s);
            c[j] = &c[j] + &t;
        }
    }
}

/// Descartes bound on the number of roots in the open interval (lo, hi);
/// stops counting at 2.
fn variations(coeffs: &[Polynomial], lo: &Rational, hi: &Rational, base: &[AlgebraicNumber]) -> usize {
    let mut c = coeffs.to_vec();
    taylor_shift(&mut c, lo);
    let w = hi - lo;
    let mut pw = Rational::one();
    for x in c.iter_mut() {
        *x = x.scale(&pw);
        pw *= &w;
    }
    c.reverse();
    taylor_shift(&mut c, &Rational::one());
    let mut count = 0;
    let mut last = Sign::Zero;
    for x in &c {
        let s = sign_inner(x, base);
        if s == Sign::Zero {
            continue;
        }
        if last != Sign::Zero && s != last {
            count += 1;
            if count >= 2 {
                return count;
            }
        }
        last = s;
    }
    count
}

fn two() -> Rational {
    Rational::from_integer(BigInt::from(2))
}

/// Power of two strictly above the absolute value of every root.
fn root_bound(coeffs: &[Polynomial], base: &[AlgebraicNumber]) -> Rational {
    let lead = coeffs.last().unwrap();
    let (_, iv) = nonzero_enclosure(lead, base);
    let lead_min = if iv.lo.is_positive() { iv.lo } else { -iv.hi };
    let mut max = Rational::zero();
    for c in &coeffs[..coeffs.len() - 1] {
        let iv = interval_eval(c, base);
        let m = iv.lo.abs().max(iv.hi.abs());
        if m > max {
            max = m;
        }
    }
    let cauchy = Rational::one() + max / lead_min;
    let mut b = Rational::one();
    while b <= cauchy {
        b *= two();
    }
    b
}

fn descartes_isolate(q: &Polynomial, k: Variable, base: &[AlgebraicNumber]) -> Vec<AlgebraicNumber> {
    let coeffs = q.coeffs_in(k);
    let univariate = coeffs.iter().all(Polynomial::is_constant);
    let q = if univariate { q.normalize() } else { q.clone() };
    let coeffs = q.coeffs_in(k);
    let sign_at_x = |x: &Rational| sign_inner(&q.eval_var(k, x), base);
    let b = root_bound(&coeffs, base);
    let mut out: Vec<AlgebraicNumber> = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match variations(&coeffs, &lo, &hi, base) {
            0 => {}
            1 => {
                let sign_lo = sign_at_x(&lo);
                let root = AlgebraicNumber::isolated(k, q.clone(), base, lo, hi, sign_lo);
                if univariate {
                    detect_rational(&root, &q);
                }
                out.push(root);
            }
            _ => {
                let mid = (&lo + &hi) / two();
                if sign_at_x(&mid) != Sign::Zero {
                    stack.push((mid.clone(), hi));
                    stack.push((lo, mid));
                    continue;
                }
                out.push(AlgebraicNumber::rational(k, mid.clone()));
                // Step away from the exact root until both gaps are root-free.
                let mut delta = (&hi - &lo) / Rational::from_integer(BigInt::from(4));
                loop {
                    let (l, h) = (&mid - &delta, &mid + &delta);
                    if sign_at_x(&l) != Sign::Zero
                        && sign_at_x(&h) != Sign::Zero
                        && variations(&coeffs, &l, &mid, base) == 0
                        && variations(&coeffs, &mid, &h, base) == 0
                    {
                        stack.push((h, hi));
                        stack.push((lo, l));
                        break;
                    }
                    delta /= two();
                }
            }
        }
    }
    out.sort_by(|x, y| x.interval().lo.cmp(&y.interval().lo));
    out
}

/// Replace the interval by the exact value when the root of an integer
/// polynomial is rational. Two rationals with denominators dividing the
/// leading coefficient `l` are at least `1/l^2` apart, so once the interval is
/// that narrow its simplest rational is the only candidate.
fn detect_rational(root: &AlgebraicNumber, q: &Polynomial) {
    let lead = q.leading_base_coeff().abs();
    if !lead.is_integer() || lead.numer().bits() > 32 {
        return;
    }
    let limit = Rational::one() / (&lead * &lead);
    while root.interval().width() >= limit {
        root.refine_once();
    }
    let iv = root.interval();
    if iv.lo == iv.hi {
        return;
    }
    let cand = simplest_rational_between(&iv.lo, &iv.hi);
    if q.eval_var(root.var(), &cand).is_zero() {
        let mut st = root.state();
        st.lo = cand.clone();
        st.hi = cand.clone();
        st.exact = Some(cand);
    }
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]`, found by continued fractions.
pub fn simplest_rational_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi);
    if lo.is_positive() {
        simplest_positive(lo, hi)
    } else if hi.is_negative() {
        -simplest_positive(&-hi, &-lo)
    } else {
        Rational::zero()
    }
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl.clone() + Rational::one() <= *hi {
        return fl + Rational::one();
    }
    // lo and hi share the integer part; recurse on reciprocals of the
    // fractional parts.
    let a = lo - &fl;
    let b = hi - &fl;
    let inner = simplest_positive(&b.recip(), &a.recip());
    fl + inner.recip()
}

/// The simplest sample in the open interval `(lo, hi)`: zero if possible,
/// else the integer nearest zero, else the dyadic rational with the smallest
/// denominator nearest zero.
pub fn simple_dyadic_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi);
    if lo.is_negative() && hi.is_positive() {
        return Rational::zero();
    }
    if !lo.is_negative() {
        let mut scale = Rational::one();
        loop {
            let cand = ((lo * &scale).floor() + Rational::one()) / &scale;
            if cand < *hi {
                return cand;
            }
            scale *= two();
        }
    }
    -simple_dyadic_between(&-hi, &-lo)
}

/// Sample strictly below every value in `iv`.
pub fn sample_below(iv: &Interval) -> Rational {
    iv.lo.floor() - Rational::one()
}

/// Sample strictly above every value in `iv`.
pub fn sample_above(iv: &Interval) -> Rational {
    iv.hi.ceil() + Rational::one()
}

/// A rational sample strictly between two roots `a < b` at the same level.
pub fn sample_between(a: &AlgebraicNumber, b: &AlgebraicNumber) -> Rational {
    loop {
        let (ia, ib) = (a.interval(), b.interval());
        if ia.hi < ib.lo {
            return simple_dyadic_between(&ia.hi, &ib.lo);
        }
        if ia.hi == ib.lo && !a.is_rational() && !b.is_rational() {
            // A shared endpoint of two isolating intervals is not a root.
            return ia.hi;
        }
        a.refine_once();
        b.refine_once();
    }
}

/// Rational with `digits` decimal places nearest to `r`, as a string.
pub fn decimal_string(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = (r * Rational::from_integer(scale.clone())).round().to_integer();
    let neg = scaled.is_negative();
    let mag = scaled.abs();
    let (int, frac) = mag.div_rem(&scale);
    let sign = if neg && !(int.is_zero() && frac.is_zero()) { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
}
