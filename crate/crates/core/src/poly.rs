//! Exact multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] is stored recursively in its main variable (the variable
//! with the highest index that occurs), with coefficients that only involve
//! lower variables. The representation is canonical: the leading
//! coefficient is never zero, a polynomial of degree zero in its main
//! variable collapses to its constant coefficient, and the zero polynomial
//! is the constant `0`. Structural equality is therefore mathematical
//! equality, which the projection sets rely on for deduplication.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;

/// Arbitrary-precision rational number used for every coefficient.
pub type Rational = BigRational;

/// Position of a variable in the global order. Higher indices are projected
/// first; the variable with index `n - 1` is the main variable of the whole
/// problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Variable(pub usize);

impl Variable {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Const(Rational),
    /// `coeffs[i]` multiplies `var^i`; at least two entries, last one nonzero,
    /// every entry free of `var` and of all higher variables.
    Rec { var: Variable, coeffs: Vec<Polynomial> },
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}


impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { repr: Repr::Const(Rational::zero()) }
    }

    pub fn one() -> Self {
        Polynomial { repr: Repr::Const(Rational::one()) }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial { repr: Repr::Const(c) }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(rat(n))
    }

    /// The polynomial `x_v`.
    pub fn var(v: Variable) -> Self {
        Self::var_pow(v, 1)
    }

    /// The monomial `x_v^e`.
    pub fn var_pow(v: Variable, e: usize) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut coeffs = vec![Self::zero(); e + 1];
        coeffs[e] = Self::one();
        Polynomial { repr: Repr::Rec { var: v, coeffs } }
    }

    /// `c * prod(x_v^e)`.
    pub fn monomial(c: Rational, powers: &[(Variable, usize)]) -> Self {
        powers
            .iter()
            .fold(Self::constant(c), |acc, &(v, e)| &acc * &Self::var_pow(v, e))
    }

    /// Build from coefficients that are all free of `var` and of every higher
    /// variable. Trailing zeros are trimmed.
    fn rec(var: Variable, mut coeffs: Vec<Polynomial>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        match coeffs.len() {
            0 => Self::zero(),
            1 => coeffs.pop().unwrap(),
            _ => {
                debug_assert!(coeffs.iter().all(|c| c.main_var().is_none_or(|w| w < var)));
                Polynomial { repr: Repr::Rec { var, coeffs } }
            }
        }
    }

    /// `sum(coeffs[i] * x_v^i)` for arbitrary coefficient polynomials.
    pub fn from_coeffs(v: Variable, coeffs: Vec<Polynomial>) -> Self {
        if coeffs.iter().all(|c| c.main_var().is_none_or(|w| w < v)) {
            return Self::rec(v, coeffs);
        }
        let mut acc = Self::zero();
        for c in coeffs.into_iter().rev() {
            acc = &(&acc * &Self::var(v)) + &c;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, Repr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.repr, Repr::Const(c) if c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.repr, Repr::Const(_))
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        match &self.repr {
            Repr::Const(c) => Some(c),
            Repr::Rec { .. } => None,
        }
    }

    /// Highest-index variable occurring in the polynomial.
    pub fn main_var(&self) -> Option<Variable> {
        match &self.repr {
            Repr::Const(_) => None,
            Repr::Rec { var, .. } => Some(*var),
        }
    }

    /// Degree in the main variable (0 for constants).
    pub fn main_degree(&self) -> usize {
        match &self.repr {
            Repr::Const(_) => 0,
            Repr::Rec { coeffs, .. } => coeffs.len() - 1,
        }
    }

    /// Degree in `v`; `None` stands for the degree of the zero polynomial
    /// (minus infinity).
    pub fn degree(&self, v: Variable) -> Option<usize> {
        match &self.repr {
            Repr::Const(c) => (!c.is_zero()).then_some(0),
            Repr::Rec { var, coeffs } => match var.cmp(&v) {
                Ordering::Equal => Some(coeffs.len() - 1),
                Ordering::Less => Some(0),
                Ordering::Greater => coeffs.iter().filter_map(|c| c.degree(v)).max(),
            },
        }
    }

    pub fn total_degree(&self) -> Option<usize> {
        match &self.repr {
            Repr::Const(c) => (!c.is_zero()).then_some(0),
            Repr::Rec { coeffs, .. } => coeffs
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c.total_degree().map(|d| d + i))
                .max(),
        }
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        if let Repr::Rec { var, coeffs } = &self.repr {
            out.insert(*var);
            for c in coeffs {
                c.collect_vars(out);
            }
        }
    }

    /// Coefficients with respect to `v`, lowest power first. Empty for the
    /// zero polynomial. Coefficients may involve variables above `v` when `v`
    /// is not the main variable.
    pub fn coeffs_in(&self, v: Variable) -> Vec<Polynomial> {
        if self.is_zero() {
            return Vec::new();
        }
        match &self.repr {
            Repr::Const(_) => vec![self.clone()],
            Repr::Rec { var, coeffs } => match var.cmp(&v) {
                Ordering::Equal => coeffs.clone(),
                Ordering::Less => vec![self.clone()],
                Ordering::Greater => {
                    let parts: Vec<Vec<Polynomial>> = coeffs.iter().map(|c| c.coeffs_in(v)).collect();
                    let len = parts.iter().map(Vec::len).max().unwrap_or(0);
                    (0..len)
                        .map(|j| {
                            let column = parts
                                .iter()
                                .map(|p| p.get(j).cloned().unwrap_or_else(Self::zero))
                                .collect();
                            Self::rec(*var, column)
                        })
                        .collect()
                }
            },
        }
    }

    /// Coefficients in the main variable without copying; a constant is its
    /// own single coefficient.
    pub fn main_coeffs(&self) -> &[Polynomial] {
        match &self.repr {
            Repr::Const(_) => std::slice::from_ref(self),
            Repr::Rec { coeffs, .. } => coeffs,
        }
    }

    /// Leading coefficient with respect to `v` (zero for the zero polynomial).
    pub fn leading_coeff_in(&self, v: Variable) -> Polynomial {
        self.coeffs_in(v).pop().unwrap_or_else(Self::zero)
    }

    /// Leading rational coefficient under the lexicographic order, found by
    /// following leading coefficients down to a constant.
    pub fn leading_base_coeff(&self) -> Rational {
        match &self.repr {
            Repr::Const(c) => c.clone(),
            Repr::Rec { coeffs, .. } => coeffs.last().unwrap().leading_base_coeff(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        match &self.repr {
            Repr::Const(x) => Self::constant(x * c),
            Repr::Rec { var, coeffs } => Polynomial {
                repr: Repr::Rec { var: *var, coeffs: coeffs.iter().map(|k| k.scale(c)).collect() },
            },
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, v: Variable) -> Self {
        match &self.repr {
            Repr::Const(_) => Self::zero(),
            Repr::Rec { var, coeffs } => match var.cmp(&v) {
                Ordering::Equal => Self::rec(
                    *var,
                    coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&rat(i as i64))).collect(),
                ),
                Ordering::Less => Self::zero(),
                Ordering::Greater => Self::rec(*var, coeffs.iter().map(|c| c.derivative(v)).collect()),
            },
        }
    }

    /// Substitute the rational `value` for `v`.
    pub fn eval_var(&self, v: Variable, value: &Rational) -> Self {
        match &self.repr {
            Repr::Const(_) => self.clone(),
            Repr::Rec { var, coeffs } => match var.cmp(&v) {
                Ordering::Less => self.clone(),
                Ordering::Equal => {
                    let mut acc = Self::zero();
                    for c in coeffs.iter().rev() {
                        acc = &acc.scale(value) + c;
                    }
                    acc
                }
                Ordering::Greater => Self::rec(*var, coeffs.iter().map(|c| c.eval_var(v, value)).collect()),
            },
        }
    }

    /// Evaluate at a full rational point (`point[i]` is the value of `x_i`).
    pub fn eval(&self, point: &[Rational]) -> Rational {
        match &self.repr {
            Repr::Const(c) => c.clone(),
            Repr::Rec { var, coeffs } => {
                let x = &point[var.0];
                let mut acc = Rational::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * x + c.eval(point);
                }
                acc
            }
        }
    }

    /// Rename the single variable of a polynomial in one variable.
    pub fn with_var(&self, to: Variable) -> Self {
        match &self.repr {
            Repr::Const(_) => self.clone(),
            Repr::Rec { coeffs, .. } => {
                debug_assert!(coeffs.iter().all(Polynomial::is_constant));
                Polynomial { repr: Repr::Rec { var: to, coeffs: coeffs.clone() } }
            }
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let vd = d.main_var().unwrap();
        let va = self.main_var()?;
        match va.cmp(&vd) {
            Ordering::Less => None,
            Ordering::Greater => {
                let Repr::Rec { coeffs, .. } = &self.repr else { unreachable!() };
                let q = coeffs.iter().map(|c| c.div_exact(d)).collect::<Option<Vec<_>>>()?;
                Some(Self::rec(va, q))
            }
            Ordering::Equal => {
                let Repr::Rec { coeffs: dc, .. } = &d.repr else { unreachable!() };
                let dd = dc.len() - 1;
                let lcd = &dc[dd];
                let mut rem: Vec<Polynomial> = self.coeffs_in(va);
                if rem.len() - 1 < dd {
                    return None;
                }
                let mut quot = vec![Self::zero(); rem.len() - dd];
                while let Some(top) = rem.len().checked_sub(1) {
                    if rem[top].is_zero() {
                        rem.pop();
                        continue;
                    }
                    if top < dd {
                        return None;
                    }
                    let q = rem[top].div_exact(lcd)?;
                    let shift = top - dd;
                    for (i, c) in dc.iter().enumerate() {
                        rem[i + shift] = &rem[i + shift] - &(&q * c);
                    }
                    quot[shift] = q;
                    rem.pop();
                }
                Some(Self::rec(va, quot))
            }
        }
    }

    fn for_each_leaf(&self, f: &mut impl FnMut(&Rational)) {
        match &self.repr {
            Repr::Const(c) => f(c),
            Repr::Rec { coeffs, .. } => coeffs.iter().for_each(|c| c.for_each_leaf(f)),
        }
    }

    /// Canonical associate: integer coefficients with gcd 1 and a positive
    /// lexicographic leading coefficient. Nonzero constants map to `1`.
    pub fn normalize(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        self.for_each_leaf(&mut |c| {
            if !c.is_zero() {
                den_lcm = den_lcm.lcm(c.denom());
                num_gcd = num_gcd.gcd(c.numer());
            }
        });
        let mut factor = Rational::new(den_lcm, num_gcd);
        if self.leading_base_coeff().is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// True when every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        let mut ok = true;
        self.for_each_leaf(&mut |c| ok &= c.is_integer());
        ok
    }

    /// Expanded terms as (exponent vector indexed by variable, coefficient),
    /// in descending lexicographic order.
    pub fn terms(&self) -> Vec<(Vec<usize>, Rational)> {
        let width = self.main_var().map_or(0, |v| v.0 + 1);
        let mut out = Vec::new();
        self.collect_terms(&mut vec![0; width], &mut out);
        out
    }

    fn collect_terms(&self, exps: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Rational)>) {
        match &self.repr {
            Repr::Const(c) => {
                if !c.is_zero() {
                    out.push((exps.clone(), c.clone()));
                }
            }
            Repr::Rec { var, coeffs } => {
                for (i, c) in coeffs.iter().enumerate().rev() {
                    exps[var.0] = i;
                    c.collect_terms(exps, out);
                }
                exps[var.0] = 0;
            }
        }
    }

    /// Render with caller-supplied variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWith { poly: self, names }
    }

    /// Parse a polynomial written in ordinary infix notation, e.g.
    /// `"x^2 + 2*x*y - 3/4"`. Variables are looked up in `names`.
    pub fn parse(text: &str, names: &[&str]) -> Result<Polynomial, PolyError> {
        infix::parse(text, names)
    }

    /// Ordering used to keep polynomial sets deterministic: by main variable,
    /// then main degree, then total degree, then structure.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.main_var()
            .cmp(&other.main_var())
            .then(self.main_degree().cmp(&other.main_degree()))
            .then(self.total_degree().cmp(&other.total_degree()))
            .then_with(|| self.cmp(other))
    }

}

struct DisplayWith<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

fn write_poly(p: &Polynomial, f: &mut fmt::Formatter<'_>, name: &dyn Fn(usize) -> String) -> fmt::Result {
    let terms = p.terms();
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (k, (exps, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        let mut factors: Vec<String> = Vec::new();
        for (i, &e) in exps.iter().enumerate().rev() {
            match e {
                0 => {}
                1 => factors.push(name(i)),
                _ => factors.push(format!("{}^{}", name(i), e)),
            }
        }
        if factors.is_empty() {
            write!(f, "{mag}")?;
        } else {
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "{}", factors.join("*"))?;
        }
    }
    Ok(())
}

impl fmt::Display for DisplayWith<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(self.poly, f, &|i| self.names.get(i).cloned().unwrap_or_else(|| format!("x{i}")))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(self, f, &|i| format!("x{i}"))
    }
}

// ---------------------------------------------------------------------------
// Ring operations

fn add_ref(a: &Polynomial, b: &Polynomial) -> Polynomial {
    match (&a.repr, &b.repr) {
        (Repr::Const(x), Repr::Const(y)) => Polynomial::constant(x + y),
        (Repr::Rec { var: va, coeffs: ca }, _) if b.main_var().is_none_or(|vb| *va > vb) => {
            let mut coeffs = ca.clone();
            coeffs[0] = add_ref(&coeffs[0], b);
            Polynomial { repr: Repr::Rec { var: *va, coeffs } }
        }
        (_, Repr::Rec { var: vb, coeffs: cb }) if a.main_var().is_none_or(|va| *vb > va) => {
            let mut coeffs = cb.clone();
            coeffs[0] = add_ref(a, &coeffs[0]);
            Polynomial { repr: Repr::Rec { var: *vb, coeffs } }
        }
        (Repr::Rec { var, coeffs: ca }, Repr::Rec { coeffs: cb, .. }) => {
            let len = ca.len().max(cb.len());
            let coeffs = (0..len)
                .map(|i| match (ca.get(i), cb.get(i)) {
                    (Some(x), Some(y)) => add_ref(x, y),
                    (Some(x), None) | (None, Some(x)) => x.clone(),
                    (None, None) => unreachable!(),
                })
                .collect();
            Polynomial::rec(*var, coeffs)
        }
        _ => unreachable!(),
    }
}

fn neg_ref(a: &Polynomial) -> Polynomial {
    match &a.repr {
        Repr::Const(c) => Polynomial::constant(-c),
        Repr::Rec { var, coeffs } => Polynomial { repr: Repr::Rec { var: *var, coeffs: coeffs.iter().map(neg_ref).collect() } },
    }
}

fn mul_ref(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero();
    }
    match (&a.repr, &b.repr) {
        (Repr::Const(x), _) => b.scale(x),
        (_, Repr::Const(y)) => a.scale(y),
        (Repr::Rec { var: va, coeffs: ca }, Repr::Rec { var: vb, coeffs: cb }) => match va.cmp(vb) {
            Ordering::Greater => Polynomial { repr: Repr::Rec { var: *va, coeffs: ca.iter().map(|c| mul_ref(c, b)).collect() } },
            Ordering::Less => Polynomial { repr: Repr::Rec { var: *vb, coeffs: cb.iter().map(|c| mul_ref(a, c)).collect() } },
            Ordering::Equal => {
                let mut coeffs = vec![Polynomial::zero(); ca.len() + cb.len() - 1];
                for (i, x) in ca.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in cb.iter().enumerate() {
                        if !y.is_zero() {
                            coeffs[i + j] = add_ref(&coeffs[i + j], &mul_ref(x, y));
                        }
                    }
                }
                Polynomial::rec(*va, coeffs)
            }
        },
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        add_ref(self, rhs)
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        add_ref(self, &neg_ref(rhs))
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        mul_ref(self, rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        neg_ref(self)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        add_ref(&self, &rhs)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        mul_ref(&self, &rhs)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        neg_ref(&self)
    }
}

/// Which ring operation [`arith`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn arith(p: &Polynomial, q: &Polynomial, op: ArithOp) -> Polynomial {
    match op {
        ArithOp::Add => p + q,
        ArithOp::Sub => p - q,
        ArithOp::Mul => p * q,
    }
}

// ---------------------------------------------------------------------------
// Univariate views: coefficient vectors in one variable whose entries are
// polynomials in the remaining variables.

pub(crate) type UPoly = Vec<Polynomial>;

fn u_trim(u: &mut UPoly) {
    while u.last().is_some_and(Polynomial::is_zero) {
        u.pop();
    }
}

fn u_deg(u: &UPoly) -> Option<usize> {
    u.len().checked_sub(1)
}

fn u_lc(u: &UPoly) -> &Polynomial {
    u.last().expect("leading coefficient of zero polynomial")
}

fn u_scale(u: &UPoly, c: &Polynomial) -> UPoly {
    let mut out: UPoly = u.iter().map(|x| x * c).collect();
    u_trim(&mut out);
    out
}

fn u_div_exact(u: &UPoly, c: &Polynomial) -> UPoly {
    u.iter()
        .map(|x| x.div_exact(c).expect("subresultant division must be exact"))
        .collect()
}

/// Pseudo-division: `lc(b)^(deg a - deg b + 1) * a = q * b + r`.
pub(crate) fn u_pseudo_divide(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    let n = u_deg(b).expect("pseudo-division by zero");
    let Some(m) = u_deg(a) else {
        return (Vec::new(), Vec::new());
    };
    if m < n {
        return (Vec::new(), a.clone());
    }
    let vn = &b[n];
    let mut u = a.clone();
    let mut q = vec![Polynomial::zero(); m - n + 1];
    // Knuth, TAOCP 4.6.1, Algorithm R.
    for k in (0..=m - n).rev() {
        q[k] = &u[n + k] * &vn.pow(k);
        let top = u[n + k].clone();
        for j in (0..n + k).rev() {
            let sub = if j >= k { &top * &b[j - k] } else { Polynomial::zero() };
            u[j] = &(vn * &u[j]) - &sub;
        }
    }
    u.truncate(n);
    u_trim(&mut u);
    u_trim(&mut q);
    (q, u)
}

fn poly_of(v: Variable, u: &UPoly) -> Polynomial {
    Polynomial::from_coeffs(v, u.clone())
}

/// One regular member of a subresultant chain.
#[derive(Clone, Debug)]
pub(crate) struct SubresEntry {
    /// Index `j` of the subresultant (its degree).
    pub degree: usize,
    /// The subresultant polynomial `S_j` (for `j = deg b` with equal input
    /// degrees this is `b` itself).
    pub poly: UPoly,
    /// Principal subresultant coefficient `psc_j` under the determinant
    /// definition.
    pub psc: Polynomial,
}

/// Regular subresultants of `a` and `b` (requires `deg a >= deg b`, `b != 0`),
/// from the subresultant pseudo-remainder sequence, highest index first.
/// Principal coefficients at indices not listed are identically zero.
pub(crate) fn u_subresultant_chain(a: &UPoly, b: &UPoly) -> Vec<SubresEntry> {
    let p = u_deg(a).expect("nonzero a");
    let q = u_deg(b).expect("nonzero b");
    assert!(p >= q);
    let mut out = Vec::new();
    let lcb = u_lc(b).clone();
    let (s_q, first) = if p > q {
        (lcb.pow(p - q), u_scale(b, &lcb.pow(p - q - 1)))
    } else {
        (Polynomial::one(), b.clone())
    };
    out.push(SubresEntry { degree: q, poly: first, psc: s_q.clone() });
    if q == 0 {
        return out;
    }
    let (_, r) = u_pseudo_divide(a, b);
    let mut g = if (p - q).is_multiple_of(2) { r.iter().map(|c| -c).collect() } else { r };
    let mut s = s_q;
    let mut fprev = b.clone();
    while let Some(ng) = u_deg(&g) {
        let delta = u_deg(&fprev).unwrap() - ng;
        let lcg = u_lc(&g).clone();
        let s_g = lcg
            .pow(delta)
            .div_exact(&s.pow(delta - 1))
            .expect("principal subresultant coefficient must divide exactly");
        let reg = if delta == 1 {
            g.clone()
        } else {
            u_div_exact(&u_scale(&g, &lcg.pow(delta - 1)), &s.pow(delta - 1))
        };
        out.push(SubresEntry { degree: ng, poly: reg, psc: s_g.clone() });
        if ng == 0 {
            break;
        }
        let minus_s = -&s;
        let beta = -&(u_lc(&fprev) * &minus_s.pow(delta));
        let (_, r) = u_pseudo_divide(&fprev, &g);
        let h = u_div_exact(&r, &beta);
        fprev = std::mem::replace(&mut g, h);
        s = s_g;
    }
    out
}

fn sign_factor(exp: usize) -> Rational {
    if exp.is_multiple_of(2) {
        rat(1)
    } else {
        rat(-1)
    }
}

/// Principal subresultant coefficients `psc_0 .. psc_min(deg p, deg q)` of
/// `p` and `q` in `v`, computed from the subresultant pseudo-remainder
/// sequence. Signs follow the same convention as [`resultant`], so that
/// `psc_0` equals the resultant whenever both degrees are positive.
pub fn subresultant_psc(p: &Polynomial, q: &Polynomial, v: Variable) -> Vec<Polynomial> {
    let dp = p.degree(v).expect("p must be nonzero");
    let Some(dq) = q.degree(v) else {
        return Vec::new();
    };
    assert!(dp >= dq, "subresultant_psc expects deg p >= deg q");
    let chain = u_subresultant_chain(&p.coeffs_in(v), &q.coeffs_in(v));
    let mut out = vec![Polynomial::zero(); dq + 1];
    for e in chain {
        out[e.degree] = e.psc.scale(&sign_factor((dp - e.degree) * (dq - e.degree)));
    }
    out
}

/// Resultant of `p` and `q` with respect to `v`, with the sign convention
/// `res(f, g) = lc(g)^deg(f) * prod f(b)` over the roots `b` of `g`.
pub fn resultant(p: &Polynomial, q: &Polynomial, v: Variable) -> Result<Polynomial, PolyError> {
    let dp = p.degree(v).unwrap_or(0);
    let dq = q.degree(v).unwrap_or(0);
    if dp == 0 || dq == 0 {
        return Err(PolyError::DegenerateDegree { var: v });
    }
    let (a, b) = (p.coeffs_in(v), q.coeffs_in(v));
    let det_last = |chain: Vec<SubresEntry>| {
        chain
            .into_iter()
            .find(|e| e.degree == 0)
            .map_or_else(Polynomial::zero, |e| e.psc)
    };
    Ok(if dp >= dq {
        det_last(u_subresultant_chain(&a, &b)).scale(&sign_factor(dp * dq))
    } else {
        // det(p, q) = (-1)^(pq) det(q, p), which cancels the convention factor.
        det_last(u_subresultant_chain(&b, &a))
    })
}

/// Discriminant `(-1)^(d(d-1)/2) res(p, dp/dv) / lc(p)` for `d = deg_v p >= 2`.
pub fn discriminant(p: &Polynomial, v: Variable) -> Result<Polynomial, PolyError> {
    let d = p.degree(v).unwrap_or(0);
    if d < 2 {
        return Err(PolyError::DegreeTooLow { var: v, degree: d });
    }
    let r = resultant(p, &p.derivative(v), v)?;
    let lc = p.leading_coeff_in(v);
    let q = r.div_exact(&lc).expect("leading coefficient divides the resultant");
    Ok(q.scale(&sign_factor(d * (d - 1) / 2)))
}

// ---------------------------------------------------------------------------
// GCD, content, square-free parts

/// Normalized greatest common divisor. Constants are units, so the gcd of two
/// nonzero polynomials without common nonconstant factor is `1`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.normalize();
    }
    if b.is_zero() {
        return a.normalize();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one();
    }
    let va = a.main_var().unwrap();
    let vb = b.main_var().unwrap();
    match va.cmp(&vb) {
        Ordering::Greater => gcd(&main_content(a), b),
        Ordering::Less => gcd(a, &main_content(b)),
        Ordering::Equal => {
            if a == b {
                return a.normalize();
            }
            let ca = main_content(a);
            let cb = main_content(b);
            let c = gcd(&ca, &cb);
            let pa = a.div_exact(&ca).expect("content divides");
            let pb = b.div_exact(&cb).expect("content divides");
            let g = primitive_prs_gcd(&pa, &pb, va);
            (&c * &g).normalize()
        }
    }
}

/// gcd of a list of polynomials (normalized; `0` for an all-zero list).
pub fn gcd_many<'a>(items: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
    let mut acc = Polynomial::zero();
    for p in items {
        acc = gcd(&acc, p);
        if acc.is_one() {
            break;
        }
    }
    acc
}

/// Content with respect to the main variable.
fn main_content(p: &Polynomial) -> Polynomial {
    match &p.repr {
        Repr::Const(_) => p.normalize(),
        Repr::Rec { coeffs, .. } => gcd_many(coeffs.iter()),
    }
}

fn u_primitive(v: Variable, u: &UPoly) -> UPoly {
    let c = gcd_many(u.iter());
    poly_of(v, &u_div_exact(u, &c)).normalize().coeffs_in(v)
}

fn primitive_prs_gcd(a: &Polynomial, b: &Polynomial, v: Variable) -> Polynomial {
    let (mut r0, mut r1) = (a.coeffs_in(v), b.coeffs_in(v));
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    loop {
        let (_, r) = u_pseudo_divide(&r0, &r1);
        match u_deg(&r) {
            None => return poly_of(v, &u_primitive(v, &r1)),
            Some(0) => return Polynomial::one(),
            Some(_) => {
                r0 = r1;
                r1 = u_primitive(v, &r);
            }
        }
    }
}

/// Split `p` into `content * primitive_part` with respect to `v`. The
/// primitive part is normalized (integer coprime coefficients, positive
/// leading coefficient) and the product is exactly `p`.
pub fn content_primitive(p: &Polynomial, v: Variable) -> (Polynomial, Polynomial) {
    if p.is_zero() {
        return (Polynomial::zero(), Polynomial::zero());
    }
    let g = gcd_many(p.coeffs_in(v).iter());
    let raw = p.div_exact(&g).expect("content divides");
    let pp = raw.normalize();
    let unit = raw.leading_base_coeff() / pp.leading_base_coeff();
    (g.scale(&unit), pp)
}

/// Square-free part with respect to `v`: every root in `v` becomes simple
/// while the content in `v` is kept. Returned normalized.
pub fn squarefree_part(p: &Polynomial, v: Variable) -> Polynomial {
    let (c, pp) = content_primitive(p, v);
    if pp.degree(v).unwrap_or(0) == 0 {
        return p.normalize();
    }
    let g = gcd(&pp, &pp.derivative(v));
    let s = pp.div_exact(&g).expect("gcd divides");
    (&c * &s).normalize()
}

/// Split a polynomial into normalized, square-free, primitive pieces, one
/// per main variable level: the primitive part in the main variable, then
/// recursively the pieces of the content. Constants produce nothing.
pub fn level_pieces(p: &Polynomial) -> Vec<Polynomial> {
    let mut out = Vec::new();
    let mut cur = p.clone();
    while let Some(v) = cur.main_var() {
        let (c, pp) = content_primitive(&cur, v);
        let g = gcd(&pp, &pp.derivative(v));
        out.push(pp.div_exact(&g).expect("gcd divides").normalize());
        cur = c;
    }
    out
}

/// True when `content_primitive(p, v)` has a constant content.
pub fn is_primitive_in(p: &Polynomial, v: Variable) -> bool {
    content_primitive(p, v).0.is_constant()
}

/// A deduplicated set of normalized nonconstant polynomials, iterated in
/// insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolySet {
    items: Vec<Polynomial>,
}

impl PolySet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert the normalized form of `p`; returns false for constants and
    /// duplicates.
    pub fn insert(&mut self, p: &Polynomial) -> bool {
        if p.is_constant() {
            return false;
        }
        let n = p.normalize();
        if self.items.contains(&n) {
            return false;
        }
        self.items.push(n);
        true
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.items.contains(&p.normalize())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Polynomial> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl FromIterator<Polynomial> for PolySet {
    fn from_iter<I: IntoIterator<Item = Polynomial>>(iter: I) -> Self {
        let mut s = PolySet::new();
        for p in iter {
            s.insert(&p);
        }
        s
    }
}

impl<'a> IntoIterator for &'a PolySet {
    type Item = &'a Polynomial;
    type IntoIter = std::slice::Iter<'a, Polynomial>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}


mod infix {
    use super::*;

    struct Parser<'a> {
        chars: Vec<char>,
        pos: usize,
        names: &'a [&'a str],
    }

    pub(super) fn parse(text: &str, names: &[&str]) -> Result<Polynomial, PolyError> {
        let mut p = Parser { chars: text.chars().collect(), pos: 0, names };
        let out = p.sum()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.err("end of input"));
        }
        Ok(out)
    }

    impl Parser<'_> {
        fn err(&self, expected: &str) -> PolyError {
            PolyError::Parse { position: self.pos, expected: expected.to_string() }
        }

        fn skip_ws(&mut self) {
            while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
                self.pos += 1;
            }
        }

        fn peek(&mut self) -> Option<char> {
            self.skip_ws();
            self.chars.get(self.pos).copied()
        }

        fn sum(&mut self) -> Result<Polynomial, PolyError> {
            let mut acc = self.product()?;
            while let Some(c) = self.peek() {
                match c {
                    '+' => {
                        self.pos += 1;
                        acc = &acc + &self.product()?;
                    }
                    '-' => {
                        self.pos += 1;
                        acc = &acc - &self.product()?;
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn product(&mut self) -> Result<Polynomial, PolyError> {
            let mut acc = self.power()?;
            while self.peek() == Some('*') {
                self.pos += 1;
                acc = &acc * &self.power()?;
            }
            Ok(acc)
        }

        fn power(&mut self) -> Result<Polynomial, PolyError> {
            let base = self.atom()?;
            if self.peek() == Some('^') {
                self.pos += 1;
                self.skip_ws();
                let e = self.integer()?;
                let e = e.to_usize().ok_or_else(|| self.err("small exponent"))?;
                return Ok(base.pow(e));
            }
            Ok(base)
        }

        fn integer(&mut self) -> Result<BigInt, PolyError> {
            let start = self.pos;
            while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("integer"));
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            Ok(s.parse().unwrap())
        }

        fn atom(&mut self) -> Result<Polynomial, PolyError> {
            match self.peek() {
                Some('-') => {
                    self.pos += 1;
                    Ok(-&self.power()?)
                }
                Some('(') => {
                    self.pos += 1;
                    let inner = self.sum()?;
                    if self.peek() != Some(')') {
                        return Err(self.err("')'"));
                    }
                    self.pos += 1;
                    Ok(inner)
                }
                Some(c) if c.is_ascii_digit() => {
                    let n = self.integer()?;
                    if self.chars.get(self.pos) == Some(&'/') {
                        self.pos += 1;
                        let d = self.integer()?;
                        if d.is_zero() {
                            return Err(self.err("nonzero denominator"));
                        }
                        return Ok(Polynomial::constant(Rational::new(n, d)));
                    }
                    Ok(Polynomial::constant(Rational::from_integer(n)))
                }
                Some(c) if c.is_alphabetic() || c == '_' => {
                    let start = self.pos;
                    while self.chars.get(self.pos).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                        self.pos += 1;
                    }
                    let name: String = self.chars[start..self.pos].iter().collect();
                    let idx = self
                        .names
                        .iter()
                        .position(|n| *n == name)
                        .ok_or(PolyError::UnknownVariable(name))?;
                    Ok(Polynomial::var(Variable(idx)))
                }
                _ => Err(self.err("number, variable or '('")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, &["x", "y", "z", "w"]).unwrap()
    }

    fn p4(s: &str) -> Polynomial {
        // w < x < y < z
        Polynomial::parse(s, &["w", "x", "y", "z"]).unwrap()
    }

    const X: Variable = Variable(0);
    const Y: Variable = Variable(1);
    const Z: Variable = Variable(2);

    #[test]
    fn arith_examples() {
        assert_eq!(arith(&p("x+1"), &p("x-1"), ArithOp::Add), p("2*x"));
        assert_eq!(arith(&p("x+y"), &p("x-y"), ArithOp::Mul), p("x^2-y^2"));
        assert_eq!(arith(&p("x*y+3"), &Polynomial::zero(), ArithOp::Add), p("x*y+3"));
        assert_eq!(arith(&p("x*y+3"), &p("x*y+3"), ArithOp::Sub), Polynomial::zero());
    }

    #[test]
    fn degree_examples() {
        let f = p("x^2*y + y");
        assert_eq!(f.degree(Y), Some(1));
        assert_eq!(f.degree(X), Some(2));
        assert_eq!(Polynomial::zero().degree(X), None);
        assert_eq!(p("5").degree(X), Some(0));
    }

    #[test]
    fn canonical_form_collapses() {
        let f = &p("x*y + x") - &p("x*y");
        assert_eq!(f, p("x"));
        assert_eq!(f.main_var(), Some(X));
        let g = &p("y^2") - &p("y^2");
        assert!(g.is_zero());
    }

    #[test]
    fn content_primitive_examples() {
        assert_eq!(content_primitive(&p("x*z + x"), Z), (p("x"), p("z+1")));
        assert_eq!(content_primitive(&p("x*z + y"), Z), (p("1"), p("x*z+y")));
        assert_eq!(content_primitive(&p("2*x^2+4*x"), X), (p("2"), p("x^2+2*x")));
        let (c, pp) = content_primitive(&p("-2*x^2-4*x"), X);
        assert_eq!(&c * &pp, p("-2*x^2-4*x"));
        assert_eq!(pp, p("x^2+2*x"));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&p("x^2+y^2-1"), &p("y-x"), Y).unwrap(), p("2*x^2-1"));
        // y - a and y - b with a = x, b = z; convention gives b - a
        assert_eq!(resultant(&p("y-x"), &p("y-z"), Y).unwrap(), p("z-x"));
        let f = p("y^2 - x*y + 3");
        assert!(resultant(&f, &f, Y).unwrap().is_zero());
        assert_eq!(resultant(&p("y-1"), &p("y+1"), Y).unwrap(), p("-2"));
        assert!(matches!(resultant(&p("x"), &p("y"), Y), Err(PolyError::DegenerateDegree { .. })));
    }

    #[test]
    fn resultant_swapped_order_matches_convention() {
        // res(f, g) = lc(g)^deg f * prod f(roots of g); g = y^2 - 1, f = y - x
        // => (1 - x)(-1 - x) = x^2 - 1
        assert_eq!(resultant(&p("y-x"), &p("y^2-1"), Y).unwrap(), p("x^2-1"));
        // and res(g, f) = lc(f)^2 * g(x) = x^2 - 1 too ((-1)^(2*1) = 1)
        assert_eq!(resultant(&p("y^2-1"), &p("y-x"), Y).unwrap(), p("x^2-1"));
        // odd case: res(y - x, y - z) vs res(y - z, y - x) differ by sign
        assert_eq!(resultant(&p("y-z"), &p("y-x"), Y).unwrap(), p("x-z"));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&p("y^2 + x*y + z"), Y).unwrap(), p("x^2 - 4*z"));
        assert_eq!(discriminant(&p("y^2 - x"), Y).unwrap(), p("4*x"));
        assert_eq!(discriminant(&p("x^2+y^2-1"), X).unwrap(), p("4 - 4*y^2"));
        assert!(matches!(discriminant(&p("y + x"), Y), Err(PolyError::DegreeTooLow { .. })));
        // cubic y^3 + a y + b: -4a^3 - 27b^2
        assert_eq!(discriminant(&p("y^3 + x*y + z"), Y).unwrap(), p("-4*x^3 - 27*z^2"));
    }

    #[test]
    fn psc_examples() {
        let chain = subresultant_psc(&p("y^2 - x"), &p("2*y"), Y);
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0], p("-4*x"));
        assert_eq!(chain[0], resultant(&p("y^2 - x"), &p("2*y"), Y).unwrap());
        assert_eq!(chain[1], p("2"));
        let chain = subresultant_psc(&p("y+1"), &p("1"), Y);
        assert_eq!(chain, vec![p("1")]);
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&p("(x-1)^2*(x+2)"), X), p("(x-1)*(x+2)"));
        assert_eq!(squarefree_part(&p("x^2-2"), X), p("x^2-2"));
        assert_eq!(squarefree_part(&p("y^2*x"), Y), p("y*x"));
        assert_eq!(squarefree_part(&p("3*(y-x)^3*(y+1)"), Y), p("(y-x)*(y+1)"));
    }

    #[test]
    fn gcd_multivariate() {
        let a = p("(x*y - z)*(y + x^2)");
        let b = p("(x*y - z)*(y - 1)*z");
        assert_eq!(gcd(&a, &b), p("z - x*y"));
        assert_eq!(gcd(&p("2*x"), &p("4*x^2")), p("x"));
        assert_eq!(gcd(&p("x+1"), &p("x-1")), p("1"));
    }

    #[test]
    fn div_exact_detects_non_divisibility() {
        assert_eq!(p("x^2-y^2").div_exact(&p("x-y")), Some(p("x+y")));
        assert_eq!(p("x^2+y^2").div_exact(&p("x-y")), None);
        assert_eq!(p("x").div_exact(&p("y")), None);
    }

    #[test]
    fn level_pieces_split_content() {
        let pieces = level_pieces(&p4("x*z + x"));
        assert_eq!(pieces, vec![p4("z+1"), p4("x")]);
        let pieces = level_pieces(&p("(y-x)^2*(x^2-2)^3"));
        assert_eq!(pieces, vec![p("y-x"), p("x^2-2")]);
    }

    #[test]
    fn coeffs_in_lower_variable() {
        let f = p("x^2*y + y + 3*x");
        let c = f.coeffs_in(X);
        assert_eq!(c, vec![p("y"), p("3"), p("y")]);
        assert_eq!(Polynomial::from_coeffs(X, c), f);
    }

    #[test]
    fn normalize_is_canonical() {
        assert_eq!(p("-2*x + 4/3").normalize(), p("3*x - 2"));
        assert_eq!(p("-7").normalize(), p("1"));
    }

    #[test]
    fn display_round_trips_through_parse() {
        let f = p("-3*x^2*y + y - 7/2");
        let shown = f.display_with(&["x".into(), "y".into()]).to_string();
        assert_eq!(shown, "-3*y*x^2 + y - 7/2");
        assert_eq!(Polynomial::parse(&shown, &["x", "y"]).unwrap(), f);
    }
}
