//! Tarski formulas: sign conditions on polynomials under and/or/not, with a
//! quantifier prefix over the whole variable list.

use std::fmt;

use crate::poly::{Polynomial, Variable};
use crate::realalg::Sign;

/// Identifier of one asserted constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct ConstraintId(pub u32);

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Relation {
    Eq,
    Ne,
    Gt,
    Ge,
    Lt,
    Le,
}

impl Relation {
    pub fn holds(self, s: Sign) -> bool {
        match self {
            Relation::Eq => s == Sign::Zero,
            Relation::Ne => s != Sign::Zero,
            Relation::Gt => s == Sign::Positive,
            Relation::Ge => s != Sign::Negative,
            Relation::Lt => s == Sign::Negative,
            Relation::Le => s != Sign::Positive,
        }
    }

    pub fn negate(self) -> Relation {
        match self {
            Relation::Eq => Relation::Ne,
            Relation::Ne => Relation::Eq,
            Relation::Gt => Relation::Le,
            Relation::Ge => Relation::Lt,
            Relation::Lt => Relation::Ge,
            Relation::Le => Relation::Gt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Le => "<=",
        }
    }
}

/// `poly rel 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub poly: Polynomial,
    pub rel: Relation,
}

impl Atom {
    pub fn new(poly: Polynomial, rel: Relation) -> Self {
        Atom { poly, rel }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn atom(poly: Polynomial, rel: Relation) -> Self {
        Formula::Atom(Atom::new(poly, rel))
    }

    pub fn and(parts: Vec<Formula>) -> Self {
        Formula::And(parts)
    }

    pub fn or(parts: Vec<Formula>) -> Self {
        Formula::Or(parts)
    }

    pub fn negate(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Truth value given the sign of every atom polynomial.
    pub fn eval(&self, sign: &mut dyn FnMut(&Polynomial) -> Sign) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => a.rel.holds(sign(&a.poly)),
            Formula::And(parts) => parts.iter().all(|p| p.eval(sign)),
            Formula::Or(parts) => parts.iter().any(|p| p.eval(sign)),
            Formula::Not(inner) => !inner.eval(sign),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.push(a),
            Formula::And(parts) | Formula::Or(parts) => parts.iter().for_each(|p| p.collect_atoms(out)),
            Formula::Not(inner) => inner.collect_atoms(out),
        }
    }

    /// Conjuncts after flattening nested conjunctions.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(parts) => parts.iter().flat_map(Formula::conjuncts).collect(),
            other => vec![other],
        }
    }

    /// Polynomials of the equations that are top-level conjuncts.
    pub fn top_level_equations(&self) -> Vec<&Polynomial> {
        self.conjuncts()
            .into_iter()
            .filter_map(|c| match c {
                Formula::Atom(Atom { poly, rel: Relation::Eq }) => Some(poly),
                _ => None,
            })
            .collect()
    }

    /// For a disjunction whose every branch has a top-level equation, the
    /// product of one such equation per branch. Each branch implies its
    /// equation, so the disjunction implies the product vanishes.
    pub fn disjunctive_equation_product(&self) -> Option<Polynomial> {
        let Formula::Or(branches) = self else { return None };
        let mut acc = Polynomial::one();
        for b in branches {
            let eq = b.top_level_equations().into_iter().next()?;
            acc = &acc * eq;
        }
        Some(acc)
    }

    /// Highest variable occurring in any atom.
    pub fn max_var(&self) -> Option<Variable> {
        self.atoms().iter().filter_map(|a| a.poly.main_var()).max()
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        FormulaDisplay { f: self, names }
    }
}

struct FormulaDisplay<'a> {
    f: &'a Formula,
    names: &'a [String],
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names;
        let join = |out: &mut fmt::Formatter<'_>, parts: &[Formula], op: &str| -> fmt::Result {
            write!(out, "(")?;
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(out, " {op} ")?;
                }
                write!(out, "{}", p.display_with(names))?;
            }
            write!(out, ")")
        };
        match self.f {
            Formula::True => write!(out, "true"),
            Formula::False => write!(out, "false"),
            Formula::Atom(a) => write!(out, "{} {} 0", a.poly.display_with(names), a.rel.symbol()),
            Formula::And(parts) => join(out, parts, "and"),
            Formula::Or(parts) => join(out, parts, "or"),
            Formula::Not(inner) => write!(out, "not {}", inner.display_with(names)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn relation_truth_table() {
        use Sign::*;
        assert!(Relation::Ge.holds(Zero));
        assert!(!Relation::Gt.holds(Zero));
        assert!(Relation::Ne.holds(Negative));
        for r in [Relation::Eq, Relation::Ne, Relation::Gt, Relation::Ge, Relation::Lt, Relation::Le] {
            for s in [Negative, Zero, Positive] {
                assert_eq!(r.holds(s), !r.negate().holds(s));
            }
        }
    }

    #[test]
    fn top_level_equations_flatten_conjunctions() {
        let f = Formula::and(vec![
            Formula::atom(p("x^2+y^2-1"), Relation::Eq),
            Formula::and(vec![Formula::atom(p("y-x"), Relation::Eq), Formula::atom(p("x"), Relation::Gt)]),
            Formula::or(vec![Formula::atom(p("y"), Relation::Eq), Formula::atom(p("x"), Relation::Eq)]),
        ]);
        assert_eq!(f.top_level_equations(), vec![&p("x^2+y^2-1"), &p("y-x")]);
        let d = f.conjuncts()[3].disjunctive_equation_product().unwrap();
        assert_eq!(d, p("x*y"));
    }
}
