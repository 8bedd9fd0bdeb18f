//! S-expression reader and script parser.

use std::collections::HashSet;

use eqcad::formula::{Quantifier, Relation};
use eqcad::Rational;
use num_bigint::BigInt;
use num_traits::{Num, Zero};
use thiserror::Error;

use crate::script::{Assertion, Binder, BoolTerm, Command, Script, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{}:{}: syntax error: expected {}, found {found}", pos.line, pos.col, expected.join(" or "))]
    Syntax { pos: Pos, expected: Vec<String>, found: String },
    #[error("{}:{}: arity error: {op} expects {expected} arguments, got {got}", pos.line, pos.col)]
    Arity { pos: Pos, op: String, expected: String, got: usize },
    #[error("{}:{}: {message}", pos.line, pos.col)]
    Invalid { pos: Pos, message: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::Arity { pos, .. } | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn describe(&self) -> String {
        match self {
            Sexp::Atom(a, _) => format!("'{a}'"),
            Sexp::List(..) => "'('".to_string(),
        }
    }
}

fn syntax(pos: Pos, expected: &[&str], found: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, expected: expected.iter().map(|s| s.to_string()).collect(), found: found.into() }
}

fn invalid(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Invalid { pos, message: message.into() }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read_all(&mut self) -> Result<Vec<Sexp>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_blank();
            match self.chars.peek() {
                None => return Ok(out),
                Some(')') => return Err(syntax(self.pos, &["'('", "end of input"], "')'")),
                Some(_) => out.push(self.read()?),
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_blank();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Err(syntax(start, &["'('", "symbol"], "end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return Err(syntax(self.pos, &["')'"], "end of input")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(syntax(start, &["'('", "symbol"], "')'")),
            Some('"') => {
                self.bump();
                let mut s = String::from("\"");
                loop {
                    match self.bump() {
                        None => return Err(syntax(self.pos, &["'\"'"], "end of input")),
                        Some('"') => break,
                        Some(c) => s.push(c),
                    }
                }
                s.push('"');
                Ok(Sexp::Atom(s, start))
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

const COMMANDS: &[&str] = &[
    "declare-fun",
    "declare-const",
    "assert",
    "push",
    "pop",
    "check-sat",
    "decide",
    "get-model",
    "get-cells",
    "set-option",
    "exit",
];

const ARITH: &[&str] = &["'+'", "'-'", "'*'", "'/'", "numeral", "variable"];
const BOOL: &[&str] = &["'='", "'<'", "'<='", "'>'", "'>='", "'distinct'", "'and'", "'or'", "'not'", "'true'", "'false'"];

fn arity(pos: Pos, op: &str, expected: &str, got: usize) -> ParseError {
    ParseError::Arity { pos, op: op.to_string(), expected: expected.to_string(), got }
}

fn is_symbol(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || "_~!@$%^&?.".contains(c))
        && s.chars().all(|c| c.is_alphanumeric() || "_~!@$%^&?.-+*/<>=".contains(c))
}

fn numeral(s: &str) -> Option<Rational> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    match s.split_once('.') {
        None => BigInt::from_str_radix(s, 10).ok().map(Rational::from_integer),
        Some((int, frac)) if !int.is_empty() && !frac.is_empty() && !frac.contains('.') => {
            let num = BigInt::from_str_radix(&format!("{int}{frac}"), 10).ok()?;
            Some(Rational::new(num, BigInt::from(10).pow(frac.len() as u32)))
        }
        _ => None,
    }
}

struct Parser {
    declared: HashSet<String>,
}

impl Parser {
    fn command(&mut self, e: &Sexp) -> Result<Command, ParseError> {
        let Sexp::List(items, pos) = e else {
            return Err(syntax(e.pos(), &["'('"], e.describe()));
        };
        let Some(Sexp::Atom(head, hpos)) = items.first() else {
            let found = items.first().map_or("')'".to_string(), Sexp::describe);
            return Err(syntax(items.first().map_or(*pos, Sexp::pos), COMMANDS, found));
        };
        let args = &items[1..];
        let want = |n: usize| if args.len() == n { Ok(()) } else { Err(arity(*pos, head, &n.to_string(), args.len())) };
        match head.as_str() {
            "declare-fun" => {
                want(3)?;
                let name = self.fresh_name(&args[0])?;
                match &args[1] {
                    Sexp::List(a, _) if a.is_empty() => {}
                    other => return Err(invalid(other.pos(), "only nullary functions (variables) are supported")),
                }
                self.real_sort(&args[2])?;
                self.declared.insert(name.clone());
                Ok(Command::DeclareVar(name))
            }
            "declare-const" => {
                want(2)?;
                let name = self.fresh_name(&args[0])?;
                self.real_sort(&args[1])?;
                self.declared.insert(name.clone());
                Ok(Command::DeclareVar(name))
            }
            "assert" => {
                want(1)?;
                Ok(Command::Assert(self.assertion(&args[0])?))
            }
            "push" | "pop" => {
                let n = match args {
                    [] => 1,
                    [Sexp::Atom(a, p)] => a.parse::<u32>().map_err(|_| syntax(*p, &["numeral"], format!("'{a}'")))?,
                    _ => return Err(arity(*pos, head, "0 or 1", args.len())),
                };
                Ok(if head == "push" { Command::Push(n) } else { Command::Pop(n) })
            }
            "check-sat" | "decide" | "get-model" | "get-cells" | "exit" => {
                want(0)?;
                Ok(match head.as_str() {
                    "check-sat" => Command::CheckSat,
                    "decide" => Command::Decide,
                    "get-model" => Command::GetModel,
                    "get-cells" => Command::GetCells,
                    _ => Command::Exit,
                })
            }
            "set-option" => {
                want(2)?;
                let key = match &args[0] {
                    Sexp::Atom(k, _) if k.starts_with(':') => k.clone(),
                    other => return Err(syntax(other.pos(), &["keyword"], other.describe())),
                };
                let value = match &args[1] {
                    Sexp::Atom(v, _) => v.clone(),
                    other => return Err(syntax(other.pos(), &["value"], other.describe())),
                };
                Ok(Command::SetOption(key, value))
            }
            other => Err(syntax(*hpos, COMMANDS, format!("'{other}'"))),
        }
    }

    fn fresh_name(&self, e: &Sexp) -> Result<String, ParseError> {
        match e {
            Sexp::Atom(a, p) if is_symbol(a) && !is_reserved(a) => {
                if self.declared.contains(a) {
                    Err(invalid(*p, format!("variable '{a}' already declared")))
                } else {
                    Ok(a.clone())
                }
            }
            other => Err(syntax(other.pos(), &["symbol"], other.describe())),
        }
    }

    fn real_sort(&self, e: &Sexp) -> Result<(), ParseError> {
        match e {
            Sexp::Atom(s, _) if s == "Real" => Ok(()),
            other => Err(syntax(other.pos(), &["'Real'"], other.describe())),
        }
    }

    fn assertion(&self, e: &Sexp) -> Result<Assertion, ParseError> {
        let mut prefix = Vec::new();
        let mut bound: HashSet<String> = HashSet::new();
        let mut cur = e;
        while let Sexp::List(items, pos) = cur {
            let q = match items.first() {
                Some(Sexp::Atom(h, _)) if h == "forall" => Quantifier::Forall,
                Some(Sexp::Atom(h, _)) if h == "exists" => Quantifier::Exists,
                _ => break,
            };
            if items.len() != 3 {
                let Some(Sexp::Atom(h, _)) = items.first() else { unreachable!() };
                return Err(arity(*pos, h, "2", items.len() - 1));
            }
            let Sexp::List(decls, dpos) = &items[1] else {
                return Err(syntax(items[1].pos(), &["'('"], items[1].describe()));
            };
            if decls.is_empty() {
                return Err(syntax(*dpos, &["'('"], "')'"));
            }
            let mut vars = Vec::new();
            for d in decls {
                match d {
                    Sexp::List(pair, _) if pair.len() == 2 => {
                        let name = match &pair[0] {
                            Sexp::Atom(a, _) if is_symbol(a) && !is_reserved(a) => a.clone(),
                            other => return Err(syntax(other.pos(), &["symbol"], other.describe())),
                        };
                        self.real_sort(&pair[1])?;
                        if !bound.insert(name.clone()) {
                            return Err(invalid(pair[0].pos(), format!("variable '{name}' bound twice")));
                        }
                        vars.push(name);
                    }
                    other => return Err(syntax(other.pos(), &["(name Real)"], other.describe())),
                }
            }
            prefix.push(Binder { quantifier: q, vars });
            cur = &items[2];
        }
        let body = self.bool_term(cur, &bound)?;
        Ok(Assertion { prefix, body })
    }

    fn bool_term(&self, e: &Sexp, bound: &HashSet<String>) -> Result<BoolTerm, ParseError> {
        match e {
            Sexp::Atom(a, _) if a == "true" => Ok(BoolTerm::True),
            Sexp::Atom(a, _) if a == "false" => Ok(BoolTerm::False),
            Sexp::Atom(a, p) => Err(syntax(*p, BOOL, format!("'{a}'"))),
            Sexp::List(items, pos) => {
                let Some(Sexp::Atom(head, hpos)) = items.first() else {
                    let found = items.first().map_or("')'".to_string(), Sexp::describe);
                    return Err(syntax(items.first().map_or(*pos, Sexp::pos), BOOL, found));
                };
                let args = &items[1..];
                let rel = match head.as_str() {
                    "=" => Some(Relation::Eq),
                    "<" => Some(Relation::Lt),
                    "<=" => Some(Relation::Le),
                    ">" => Some(Relation::Gt),
                    ">=" => Some(Relation::Ge),
                    "distinct" => Some(Relation::Ne),
                    _ => None,
                };
                if let Some(r) = rel {
                    if args.len() != 2 {
                        return Err(arity(*pos, head, "2", args.len()));
                    }
                    return Ok(BoolTerm::Rel(r, self.term(&args[0], bound)?, self.term(&args[1], bound)?));
                }
                match head.as_str() {
                    "and" | "or" => {
                        if args.is_empty() {
                            return Err(arity(*pos, head, "at least 1", 0));
                        }
                        let parts = args.iter().map(|a| self.bool_term(a, bound)).collect::<Result<Vec<_>, _>>()?;
                        Ok(if head == "and" { BoolTerm::And(parts) } else { BoolTerm::Or(parts) })
                    }
                    "not" => {
                        if args.len() != 1 {
                            return Err(arity(*pos, head, "1", args.len()));
                        }
                        Ok(BoolTerm::Not(Box::new(self.bool_term(&args[0], bound)?)))
                    }
                    "forall" | "exists" => Err(invalid(*hpos, "quantifiers are only allowed as a prefix of an assertion")),
                    other => Err(syntax(*hpos, BOOL, format!("'{other}'"))),
                }
            }
        }
    }

    fn term(&self, e: &Sexp, bound: &HashSet<String>) -> Result<Term, ParseError> {
        match e {
            Sexp::Atom(a, p) => {
                if let Some(r) = numeral(a) {
                    return Ok(Term::Num(r));
                }
                if bound.contains(a) || self.declared.contains(a) {
                    return Ok(Term::Var(a.clone()));
                }
                if is_symbol(a) && !is_reserved(a) {
                    Err(invalid(*p, format!("unknown variable '{a}'")))
                } else {
                    Err(syntax(*p, ARITH, format!("'{a}'")))
                }
            }
            Sexp::List(items, pos) => {
                let Some(Sexp::Atom(head, hpos)) = items.first() else {
                    let found = items.first().map_or("')'".to_string(), Sexp::describe);
                    return Err(syntax(items.first().map_or(*pos, Sexp::pos), &["'+'", "'-'", "'*'", "'/'"], found));
                };
                let args = &items[1..];
                let sub = |s: &Parser| args.iter().map(|a| s.term(a, bound)).collect::<Result<Vec<_>, _>>();
                match head.as_str() {
                    "+" | "*" => {
                        if args.is_empty() {
                            return Err(arity(*pos, head, "at least 1", 0));
                        }
                        let ts = sub(self)?;
                        Ok(if head == "+" { Term::Add(ts) } else { Term::Mul(ts) })
                    }
                    "-" => match args.len() {
                        0 => Err(arity(*pos, head, "at least 1", 0)),
                        1 => Ok(Term::Neg(Box::new(self.term(&args[0], bound)?))),
                        _ => Ok(Term::Sub(sub(self)?)),
                    },
                    "/" => {
                        if args.len() != 2 {
                            return Err(arity(*pos, head, "2", args.len()));
                        }
                        let lit = |s: &Sexp| match s {
                            Sexp::Atom(a, _) => numeral(a),
                            _ => None,
                        };
                        match (lit(&args[0]), lit(&args[1])) {
                            (Some(n), Some(d)) if !d.is_zero() => Ok(Term::Num(n / d)),
                            (Some(_), Some(_)) => Err(invalid(args[1].pos(), "division by zero")),
                            _ => Err(invalid(*hpos, "division is only allowed between numerals")),
                        }
                    }
                    other => Err(syntax(*hpos, &["'+'", "'-'", "'*'", "'/'"], format!("'{other}'"))),
                }
            }
        }
    }
}

fn is_reserved(s: &str) -> bool {
    matches!(s, "true" | "false" | "and" | "or" | "not" | "forall" | "exists" | "distinct" | "Real")
}

/// Parse a whole script. Variables must be declared before use; bound
/// variables of a quantifier prefix are declared by the prefix.
pub fn parse(text: &str) -> Result<Script, ParseError> {
    let mut reader = Reader { chars: text.chars().peekable(), pos: Pos { line: 1, col: 1 } };
    let exprs = reader.read_all()?;
    let mut parser = Parser { declared: HashSet::new() };
    let commands = exprs.iter().map(|e| parser.command(e)).collect::<Result<Vec<_>, _>>()?;
    Ok(Script { commands })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_script() {
        let s = parse("(declare-fun x () Real)(assert (> x 0))(check-sat)").unwrap();
        assert_eq!(s.commands.len(), 3);
        assert_eq!(s.commands[2], Command::CheckSat);
    }

    #[test]
    fn arity_error_at_the_atom() {
        let err = parse("(declare-fun x () Real)\n(assert (> x))").unwrap_err();
        assert!(matches!(err, ParseError::Arity { ref op, got: 1, .. } if op == ">"));
        assert_eq!(err.pos(), Pos { line: 2, col: 9 });
    }

    #[test]
    fn syntax_errors_list_expected_tokens() {
        let err = parse("(declare-fun x () Real)(assert (> x 0)").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { ref expected, .. } if expected == &vec!["')'".to_string()]));
        let err = parse("(frobnicate)").unwrap_err();
        let ParseError::Syntax { expected, pos, .. } = err else { panic!() };
        assert!(expected.contains(&"check-sat".to_string()));
        assert_eq!(pos, Pos { line: 1, col: 2 });
    }

    #[test]
    fn undeclared_variables_rejected() {
        assert!(matches!(parse("(assert (> y 0))"), Err(ParseError::Invalid { .. })));
        assert!(parse("(assert (forall ((y Real)) (> (* y y) (- 1))))").is_ok());
    }

    #[test]
    fn literals() {
        let s = parse("(declare-const x Real)(assert (= x (/ 3 6)))(assert (< x 0.25))").unwrap();
        let Command::Assert(a) = &s.commands[1] else { panic!() };
        assert_eq!(a.body, BoolTerm::Rel(Relation::Eq, Term::Var("x".into()), Term::Num(Rational::new(1.into(), 2.into()))));
        assert!(parse("(declare-const x Real)(assert (= x (/ x 2)))").is_err());
    }

    #[test]
    fn nested_quantifier_rejected() {
        let err = parse("(declare-const x Real)(assert (and (> x 0) (exists ((y Real)) (> y x))))").unwrap_err();
        assert!(matches!(err, ParseError::Invalid { .. }));
    }
}
