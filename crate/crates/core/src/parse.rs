//! Front end for game files and standalone formulas.
//!
//! ```text
//! (game (vars (x Int) (y Int))
//!       (player0 (= y 0))
//!       (init (and (= x 0) (= y 0)))
//!       (safe (>= x 0))
//!       (edges (and (= y' (- 1 y)) (or (= x' (+ x 1)) (= x' (- x 1))))))
//! ```

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::formula::{CmpOp, Formula, Term, Var, NEXT_SUFFIX};
use crate::game::GameDef;
use crate::sexp::{self, Pos, Sexp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredVariable(String),
    PrimedOutsideEdges(String),
    NonLiteral(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError {
            pos,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "{}: syntax error: {m}", self.pos),
            ParseErrorKind::UndeclaredVariable(v) => {
                write!(f, "{}: undeclared variable `{v}`", self.pos)
            }
            ParseErrorKind::PrimedOutsideEdges(v) => {
                write!(f, "{}: primed variable `{v}'` outside `edges`", self.pos)
            }
            ParseErrorKind::NonLiteral(m) => write!(f, "{}: {m}", self.pos),
        }
    }
}

impl core::error::Error for ParseError {}

impl From<sexp::SexpError> for ParseError {
    fn from(e: sexp::SexpError) -> Self {
        ParseError::syntax(e.pos, e.message)
    }
}

const RESERVED: &[&str] = &[
    "true", "false", "and", "or", "not", "=>", "mod", "div", "game", "vars", "player0", "init",
    "safe", "edges", "Int", "forall", "exists", "let",
];

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&s)
}

/// Name resolution context for formulas.
#[derive(Clone, Copy, Debug)]
pub struct Scope<'a> {
    pub vars: &'a [String],
    /// Whether `x'` is legal here (only inside `edges`).
    pub allow_primed: bool,
    /// Read `x_next` as the primed copy of `x` (solver wire format).
    pub wire: bool,
}

impl<'a> Scope<'a> {
    pub fn state(vars: &'a [String]) -> Self {
        Scope {
            vars,
            allow_primed: false,
            wire: false,
        }
    }

    pub fn edges(vars: &'a [String]) -> Self {
        Scope {
            vars,
            allow_primed: true,
            wire: false,
        }
    }

    pub fn wire(vars: &'a [String]) -> Self {
        Scope {
            vars,
            allow_primed: true,
            wire: true,
        }
    }

    fn resolve(&self, atom: &str, pos: Pos) -> Result<Var, ParseError> {
        let declared = |n: &str| self.vars.iter().any(|v| v == n);
        let (name, primed) = if let Some(base) = atom.strip_suffix('\'') {
            (base, true)
        } else if self.wire && !declared(atom) {
            match atom.strip_suffix(NEXT_SUFFIX) {
                Some(base) if declared(base) => (base, true),
                _ => (atom, false),
            }
        } else {
            (atom, false)
        };
        if !is_ident(name) {
            return Err(ParseError::syntax(pos, format!("invalid identifier `{atom}`")));
        }
        if !declared(name) {
            return Err(ParseError {
                pos,
                kind: ParseErrorKind::UndeclaredVariable(name.to_string()),
            });
        }
        if primed && !self.allow_primed {
            return Err(ParseError {
                pos,
                kind: ParseErrorKind::PrimedOutsideEdges(name.to_string()),
            });
        }
        Ok(Var {
            name: name.to_string(),
            primed,
        })
    }
}

fn parse_int(atom: &str) -> Option<i64> {
    let digits = atom.strip_prefix('-').unwrap_or(atom);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    atom.parse().ok()
}

/// Integer literal, accepting the wire form `(- 5)` as well as `-5`.
fn literal_int(s: &Sexp) -> Option<i64> {
    match s {
        Sexp::Atom(a, _) => parse_int(a),
        Sexp::List(items, _) => match items.as_slice() {
            [Sexp::Atom(op, _), inner] if op == "-" => literal_int(inner)?.checked_neg(),
            _ => None,
        },
    }
}

pub fn term_from_sexp(s: &Sexp, scope: &Scope<'_>) -> Result<Term, ParseError> {
    match s {
        Sexp::Atom(a, pos) => match parse_int(a) {
            Some(c) => Ok(Term::Const(c)),
            None if a.starts_with(|c: char| c.is_ascii_digit() || c == '-') => {
                Err(ParseError::syntax(*pos, format!("bad integer literal `{a}`")))
            }
            None => Ok(Term::Var(scope.resolve(a, *pos)?)),
        },
        Sexp::List(items, pos) => {
            let Some(op) = s.head() else {
                return Err(ParseError::syntax(*pos, "expected an operator"));
            };
            let args = &items[1..];
            match (op, args.len()) {
                ("+", n) if n >= 2 => Ok(Term::Add(
                    args.iter()
                        .map(|a| term_from_sexp(a, scope))
                        .collect::<Result<_, _>>()?,
                )),
                ("-", 1) => Ok(Term::Neg(Box::new(term_from_sexp(&args[0], scope)?))),
                ("-", 2) => Ok(Term::Sub(
                    Box::new(term_from_sexp(&args[0], scope)?),
                    Box::new(term_from_sexp(&args[1], scope)?),
                )),
                ("*", 2) => {
                    let (coeff, other) = match (literal_int(&args[0]), literal_int(&args[1])) {
                        (Some(c), _) => (c, &args[1]),
                        (None, Some(c)) => (c, &args[0]),
                        (None, None) => {
                            return Err(ParseError {
                                pos: *pos,
                                kind: ParseErrorKind::NonLiteral(
                                    "multiplication needs a literal integer coefficient".into(),
                                ),
                            })
                        }
                    };
                    Ok(Term::MulConst(coeff, Box::new(term_from_sexp(other, scope)?)))
                }
                ("mod" | "div", 2) => {
                    let divisor = match literal_int(&args[1]) {
                        Some(k) if k > 0 => k,
                        _ => {
                            return Err(ParseError {
                                pos: args[1].pos(),
                                kind: ParseErrorKind::NonLiteral(format!(
                                    "`{op}` needs a literal positive divisor"
                                )),
                            })
                        }
                    };
                    let t = Box::new(term_from_sexp(&args[0], scope)?);
                    Ok(if op == "mod" {
                        Term::Mod(t, divisor)
                    } else {
                        Term::Div(t, divisor)
                    })
                }
                _ => Err(ParseError::syntax(
                    *pos,
                    format!("unknown term operator `{op}` with {} argument(s)", args.len()),
                )),
            }
        }
    }
}

pub fn formula_from_sexp(s: &Sexp, scope: &Scope<'_>) -> Result<Formula, ParseError> {
    match s {
        Sexp::Atom(a, pos) => match a.as_str() {
            "true" => Ok(Formula::Bool(true)),
            "false" => Ok(Formula::Bool(false)),
            _ => Err(ParseError::syntax(*pos, format!("expected a formula, found `{a}`"))),
        },
        Sexp::List(items, pos) => {
            let Some(op) = s.head() else {
                return Err(ParseError::syntax(*pos, "expected a formula operator"));
            };
            let args = &items[1..];
            let sub = |a: &Sexp| formula_from_sexp(a, scope);
            match op {
                "and" | "or" if !args.is_empty() => {
                    let fs = args.iter().map(sub).collect::<Result<Vec<_>, _>>()?;
                    Ok(if op == "and" {
                        Formula::And(fs)
                    } else {
                        Formula::Or(fs)
                    })
                }
                "not" if args.len() == 1 => Ok(Formula::not(sub(&args[0])?)),
                "=>" if args.len() == 2 => Ok(Formula::implies(sub(&args[0])?, sub(&args[1])?)),
                _ => match CmpOp::from_symbol(op) {
                    Some(cmp) if args.len() == 2 => Ok(Formula::Cmp(
                        cmp,
                        term_from_sexp(&args[0], scope)?,
                        term_from_sexp(&args[1], scope)?,
                    )),
                    _ => Err(ParseError::syntax(
                        *pos,
                        format!("unknown formula `{op}` with {} argument(s)", args.len()),
                    )),
                },
            }
        }
    }
}

/// Parses one formula over `vars` in game-file syntax.
pub fn parse_formula(text: &str, scope: &Scope<'_>) -> Result<Formula, ParseError> {
    formula_from_sexp(&sexp::parse_one(text)?, scope)
}

/// Parses a formula in solver wire syntax (`x_next` read back as `x'`).
pub fn parse_wire_formula(text: &str, vars: &[String]) -> Result<Formula, ParseError> {
    parse_formula(text, &Scope::wire(vars))
}

pub fn parse_game(text: &str) -> Result<GameDef, ParseError> {
    let top = sexp::parse_one(text)?;
    let pos = top.pos();
    if top.head() != Some("game") {
        return Err(ParseError::syntax(pos, "expected `(game ...)`"));
    }
    let sections = &top.as_list().unwrap_or(&[])[1..];

    let mut vars: Option<Vec<String>> = None;
    let mut raw: [Option<&Sexp>; 4] = [None; 4];
    const NAMES: [&str; 4] = ["player0", "init", "safe", "edges"];

    for sec in sections {
        let Some(head) = sec.head() else {
            return Err(ParseError::syntax(sec.pos(), "expected a game section"));
        };
        let body = &sec.as_list().unwrap_or(&[])[1..];
        if head == "vars" {
            if vars.is_some() {
                return Err(ParseError::syntax(sec.pos(), "duplicate `vars` section"));
            }
            vars = Some(parse_vars(body, sec.pos())?);
            continue;
        }
        let Some(idx) = NAMES.iter().position(|n| *n == head) else {
            return Err(ParseError::syntax(sec.pos(), format!("unknown section `{head}`")));
        };
        if raw[idx].is_some() {
            return Err(ParseError::syntax(sec.pos(), format!("duplicate `{head}` section")));
        }
        if body.len() != 1 {
            return Err(ParseError::syntax(
                sec.pos(),
                format!("`{head}` takes exactly one formula"),
            ));
        }
        raw[idx] = Some(&body[0]);
    }

    let vars = vars.ok_or_else(|| ParseError::syntax(pos, "missing `vars` section"))?;
    let mut parsed = Vec::with_capacity(4);
    for (i, name) in NAMES.iter().enumerate() {
        let s = raw[i].ok_or_else(|| ParseError::syntax(pos, format!("missing `{name}` section")))?;
        let scope = if *name == "edges" {
            Scope::edges(&vars)
        } else {
            Scope::state(&vars)
        };
        parsed.push(formula_from_sexp(s, &scope)?);
    }
    let edges = parsed.pop().unwrap();
    let safe = parsed.pop().unwrap();
    let init = parsed.pop().unwrap();
    let player0 = parsed.pop().unwrap();
    Ok(GameDef::new(vars, player0, init, safe, edges))
}

fn parse_vars(body: &[Sexp], pos: Pos) -> Result<Vec<String>, ParseError> {
    if body.is_empty() {
        return Err(ParseError::syntax(pos, "`vars` needs at least one declaration"));
    }
    let mut names = Vec::new();
    let mut seen = BTreeSet::new();
    for decl in body {
        let ok = match decl.as_list() {
            Some([Sexp::Atom(name, _), Sexp::Atom(sort, _)]) if sort == "Int" => Some(name),
            _ => None,
        };
        let Some(name) = ok else {
            return Err(ParseError::syntax(decl.pos(), "expected `(IDENT Int)`"));
        };
        if !is_ident(name) {
            return Err(ParseError::syntax(decl.pos(), format!("invalid identifier `{name}`")));
        }
        if !seen.insert(name.clone()) {
            return Err(ParseError::syntax(decl.pos(), format!("duplicate variable `{name}`")));
        }
        names.push(name.clone());
    }
    // `x_next` would collide with the wire name of `x'`
    for n in &names {
        if let Some(base) = n.strip_suffix(NEXT_SUFFIX) {
            if seen.contains(base) {
                return Err(ParseError::syntax(
                    pos,
                    format!("variable `{n}` collides with the successor copy of `{base}`"),
                ));
            }
        }
    }
    Ok(names)
}
