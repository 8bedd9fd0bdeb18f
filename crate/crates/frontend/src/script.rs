//! Script syntax tree and its printer. Printing and re-parsing gives back an
//! equal script.

use std::fmt;

use eqcad::formula::{Quantifier, Relation};
use eqcad::Rational;
use num_traits::{One, Signed};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// Non-negative literal; negative values are written with `Neg`.
    Num(Rational),
    Var(String),
    Add(Vec<Term>),
    /// `(- a b c)` is `a - b - c`.
    Sub(Vec<Term>),
    Mul(Vec<Term>),
    Neg(Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolTerm {
    True,
    False,
    Rel(Relation, Term, Term),
    And(Vec<BoolTerm>),
    Or(Vec<BoolTerm>),
    Not(Box<BoolTerm>),
}

/// A quantifier block `(forall ((x Real) (y Real)) ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub quantifier: Quantifier,
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub prefix: Vec<Binder>,
    pub body: BoolTerm,
}

impl Assertion {
    pub fn bound_vars(&self) -> impl Iterator<Item = (Quantifier, &String)> {
        self.prefix.iter().flat_map(|b| b.vars.iter().map(move |v| (b.quantifier, v)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    DeclareVar(String),
    Assert(Assertion),
    Push(u32),
    Pop(u32),
    CheckSat,
    Decide,
    GetModel,
    GetCells,
    SetOption(String, String),
    Exit,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::DeclareVar(_) => "declare-fun",
            Command::Assert(_) => "assert",
            Command::Push(_) => "push",
            Command::Pop(_) => "pop",
            Command::CheckSat => "check-sat",
            Command::Decide => "decide",
            Command::GetModel => "get-model",
            Command::GetCells => "get-cells",
            Command::SetOption(..) => "set-option",
            Command::Exit => "exit",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub commands: Vec<Command>,
}

pub fn relation_symbol(r: Relation) -> &'static str {
    match r {
        Relation::Eq => "=",
        Relation::Lt => "<",
        Relation::Le => "<=",
        Relation::Gt => ">",
        Relation::Ge => ">=",
        Relation::Ne => "distinct",
    }
}

fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, head: &str, items: &[T]) -> fmt::Result {
    write!(f, "({head}")?;
    for it in items {
        write!(f, " {it}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Num(r) => {
                debug_assert!(!r.is_negative());
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "(/ {} {})", r.numer(), r.denom())
                }
            }
            Term::Var(v) => f.write_str(v),
            Term::Add(ts) => list(f, "+", ts),
            Term::Sub(ts) => list(f, "-", ts),
            Term::Mul(ts) => list(f, "*", ts),
            Term::Neg(t) => write!(f, "(- {t})"),
        }
    }
}

impl fmt::Display for BoolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolTerm::True => f.write_str("true"),
            BoolTerm::False => f.write_str("false"),
            BoolTerm::Rel(r, a, b) => write!(f, "({} {a} {b})", relation_symbol(*r)),
            BoolTerm::And(ts) => list(f, "and", ts),
            BoolTerm::Or(ts) => list(f, "or", ts),
            BoolTerm::Not(t) => write!(f, "(not {t})"),
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.prefix {
            let q = match b.quantifier {
                Quantifier::Exists => "exists",
                Quantifier::Forall => "forall",
            };
            write!(f, "({q} (")?;
            for (i, v) in b.vars.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "({v} Real)")?;
            }
            write!(f, ") ")?;
        }
        write!(f, "{}", self.body)?;
        for _ in &self.prefix {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::DeclareVar(v) => write!(f, "(declare-fun {v} () Real)"),
            Command::Assert(a) => write!(f, "(assert {a})"),
            Command::Push(n) => write!(f, "(push {n})"),
            Command::Pop(n) => write!(f, "(pop {n})"),
            Command::SetOption(k, v) => write!(f, "(set-option {k} {v})"),
            other => write!(f, "({})", other.name()),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.commands {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
