//! Quantifier-free linear integer arithmetic over game variables and their
//! primed (successor) copies.
//!
//! Division and remainder by a literal positive integer use Euclidean
//! semantics, matching the SMT-LIB `Ints` theory, so that [`Formula::eval`]
//! agrees with the external solver on every assignment.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Suffix used for primed variables on the solver wire.
pub const NEXT_SUFFIX: &str = "_next";

/// A game variable or its primed copy `x'`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub primed: bool,
}

impl Var {
    pub fn current(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            primed: false,
        }
    }

    pub fn next(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            primed: true,
        }
    }

    /// Symbol used on the solver wire: `x` or `x_next`.
    pub fn wire_name(&self) -> String {
        if self.primed {
            let mut s = self.name.clone();
            s.push_str(NEXT_SUFFIX);
            s
        } else {
            self.name.clone()
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.primed {
            f.write_str("'")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(i64),
    Var(Var),
    /// At least two operands.
    Add(Vec<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    MulConst(i64, Box<Term>),
    /// Euclidean remainder by a positive literal.
    Mod(Box<Term>, i64),
    /// Euclidean quotient by a positive literal.
    Div(Box<Term>, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "=" => CmpOp::Eq,
            "<=" => CmpOp::Le,
            "<" => CmpOp::Lt,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }

    pub fn holds(self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Eq => l == r,
            CmpOp::Le => l <= r,
            CmpOp::Lt => l < r,
            CmpOp::Ge => l >= r,
            CmpOp::Gt => l > r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Bool(bool),
    Cmp(CmpOp, Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

/// Which variable class [`Formula::instantiate`] replaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Unprimed,
    Primed,
    Both,
}

impl Which {
    fn selects(self, v: &Var) -> bool {
        match self {
            Which::Unprimed => !v.primed,
            Which::Primed => v.primed,
            Which::Both => true,
        }
    }
}

/// Concrete integer valuation of current-state and successor-state variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub current: BTreeMap<String, i64>,
    pub next: BTreeMap<String, i64>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.current.insert(name.to_string(), value);
        self
    }

    pub fn with_next(mut self, name: &str, value: i64) -> Self {
        self.next.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, var: &Var, value: i64) {
        let map = if var.primed {
            &mut self.next
        } else {
            &mut self.current
        };
        map.insert(var.name.clone(), value);
    }

    pub fn get(&self, var: &Var) -> Option<i64> {
        if var.primed {
            self.next.get(&var.name).copied()
        } else {
            self.current.get(&var.name).copied()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    Unbound(Var),
    Overflow,
    BadDivisor(i64),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Unbound(v) => write!(f, "unbound variable `{v}`"),
            EvalError::Overflow => f.write_str("integer overflow during evaluation"),
            EvalError::BadDivisor(k) => write!(f, "divisor {k} is not positive"),
        }
    }
}

impl core::error::Error for EvalError {}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::current(name))
    }

    pub fn next(name: &str) -> Self {
        Term::Var(Var::next(name))
    }

    pub fn eval(&self, a: &Assignment) -> Result<i64, EvalError> {
        Ok(match self {
            Term::Const(c) => *c,
            Term::Var(v) => a.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?,
            Term::Add(ts) => {
                let mut acc: i64 = 0;
                for t in ts {
                    acc = acc.checked_add(t.eval(a)?).ok_or(EvalError::Overflow)?;
                }
                acc
            }
            Term::Sub(l, r) => l
                .eval(a)?
                .checked_sub(r.eval(a)?)
                .ok_or(EvalError::Overflow)?,
            Term::Neg(t) => t.eval(a)?.checked_neg().ok_or(EvalError::Overflow)?,
            Term::MulConst(c, t) => t.eval(a)?.checked_mul(*c).ok_or(EvalError::Overflow)?,
            Term::Mod(t, k) => {
                if *k <= 0 {
                    return Err(EvalError::BadDivisor(*k));
                }
                t.eval(a)?.rem_euclid(*k)
            }
            Term::Div(t, k) => {
                if *k <= 0 {
                    return Err(EvalError::BadDivisor(*k));
                }
                t.eval(a)?.div_euclid(*k)
            }
        })
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Add(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Term::Sub(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Term::Neg(t) | Term::MulConst(_, t) | Term::Mod(t, _) | Term::Div(t, _) => {
                t.collect_vars(out)
            }
        }
    }

    /// Applies `f` to every variable leaf; returning `Some(term)` replaces it.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Option<Term>) -> Term {
        match self {
            Term::Const(c) => Term::Const(*c),
            Term::Var(v) => f(v).unwrap_or_else(|| Term::Var(v.clone())),
            Term::Add(ts) => Term::Add(ts.iter().map(|t| t.map_vars(f)).collect()),
            Term::Sub(l, r) => Term::Sub(Box::new(l.map_vars(f)), Box::new(r.map_vars(f))),
            Term::Neg(t) => Term::Neg(Box::new(t.map_vars(f))),
            Term::MulConst(c, t) => Term::MulConst(*c, Box::new(t.map_vars(f))),
            Term::Mod(t, k) => Term::Mod(Box::new(t.map_vars(f)), *k),
            Term::Div(t, k) => Term::Div(Box::new(t.map_vars(f)), *k),
        }
    }

    fn write(&self, out: &mut String, wire: bool) {
        match self {
            Term::Const(c) => write_int(out, *c, wire),
            Term::Var(v) => {
                if wire {
                    out.push_str(&v.wire_name())
                } else {
                    out.push_str(&v.name);
                    if v.primed {
                        out.push('\'');
                    }
                }
            }
            Term::Add(ts) => write_app(out, "+", ts.iter().map(|t| t as &dyn Emit), wire),
            Term::Sub(l, r) => write_app(out, "-", [&**l as &dyn Emit, &**r].into_iter(), wire),
            Term::Neg(t) => write_app(out, "-", core::iter::once(&**t as &dyn Emit), wire),
            Term::MulConst(c, t) => {
                out.push_str("(* ");
                write_int(out, *c, wire);
                out.push(' ');
                t.write(out, wire);
                out.push(')');
            }
            Term::Mod(t, k) | Term::Div(t, k) => {
                out.push_str(if matches!(self, Term::Mod(..)) {
                    "(mod "
                } else {
                    "(div "
                });
                t.write(out, wire);
                out.push(' ');
                write_int(out, *k, wire);
                out.push(')');
            }
        }
    }
}

trait Emit {
    fn emit(&self, out: &mut String, wire: bool);
}

impl Emit for Term {
    fn emit(&self, out: &mut String, wire: bool) {
        self.write(out, wire)
    }
}

impl Emit for Formula {
    fn emit(&self, out: &mut String, wire: bool) {
        self.write(out, wire)
    }
}

fn write_app<'a>(out: &mut String, op: &str, args: impl Iterator<Item = &'a dyn Emit>, wire: bool) {
    out.push('(');
    out.push_str(op);
    for a in args {
        out.push(' ');
        a.emit(out, wire);
    }
    out.push(')');
}

fn write_int(out: &mut String, c: i64, wire: bool) {
    use core::fmt::Write;
    // SMT-LIB numerals are non-negative; negatives go through unary minus.
    if wire && c < 0 {
        let _ = write!(out, "(- {})", c.unsigned_abs());
    } else {
        let _ = write!(out, "{c}");
    }
}

impl Formula {
    pub fn cmp(op: CmpOp, l: Term, r: Term) -> Self {
        Formula::Cmp(op, l, r)
    }

    /// Conjunction; collapses the empty and singleton cases.
    pub fn and(mut fs: Vec<Formula>) -> Self {
        match fs.len() {
            0 => Formula::Bool(true),
            1 => fs.remove(0),
            _ => Formula::And(fs),
        }
    }

    /// Disjunction; collapses the empty and singleton cases.
    pub fn or(mut fs: Vec<Formula>) -> Self {
        match fs.len() {
            0 => Formula::Bool(false),
            1 => fs.remove(0),
            _ => Formula::Or(fs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, EvalError> {
        Ok(match self {
            Formula::Bool(b) => *b,
            Formula::Cmp(op, l, r) => op.holds(l.eval(a)?, r.eval(a)?),
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(a)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(a)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Not(f) => !f.eval(a)?,
            Formula::Implies(l, r) => !l.eval(a)? || r.eval(a)?,
        })
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Bool(_) => {}
            Formula::Cmp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Not(f) => f.collect_vars(out),
            Formula::Implies(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Option<Term>) -> Formula {
        match self {
            Formula::Bool(b) => Formula::Bool(*b),
            Formula::Cmp(op, l, r) => Formula::Cmp(*op, l.map_vars(f), r.map_vars(f)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.map_vars(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.map_vars(f)).collect()),
            Formula::Not(g) => Formula::Not(Box::new(g.map_vars(f))),
            Formula::Implies(l, r) => {
                Formula::Implies(Box::new(l.map_vars(f)), Box::new(r.map_vars(f)))
            }
        }
    }

    /// Replaces the selected variable class by the constants bound in `a`.
    /// Variables outside the selected class are left free.
    pub fn instantiate(&self, a: &Assignment, which: Which) -> Result<Formula, EvalError> {
        let mut missing = None;
        let out = self.map_vars(&mut |v| {
            if !which.selects(v) {
                return None;
            }
            match a.get(v) {
                Some(c) => Some(Term::Const(c)),
                None => {
                    missing.get_or_insert_with(|| v.clone());
                    None
                }
            }
        });
        match missing {
            Some(v) => Err(EvalError::Unbound(v)),
            None => Ok(out),
        }
    }

    /// Renames every unprimed variable to its primed copy: `H(x)` becomes `H(x')`.
    pub fn prime(&self) -> Formula {
        self.map_vars(&mut |v| (!v.primed).then(|| Term::Var(Var::next(v.name.clone()))))
    }

    /// SMT-LIB 2 rendering; primed variables become `<name>_next`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, true);
        s
    }

    fn write(&self, out: &mut String, wire: bool) {
        match self {
            Formula::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Formula::Cmp(op, l, r) => {
                write_app(out, op.symbol(), [l as &dyn Emit, r].into_iter(), wire)
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let (op, unit) = if matches!(self, Formula::And(_)) {
                    ("and", "true")
                } else {
                    ("or", "false")
                };
                match fs.len() {
                    0 => out.push_str(unit),
                    1 => fs[0].write(out, wire),
                    _ => write_app(out, op, fs.iter().map(|f| f as &dyn Emit), wire),
                }
            }
            Formula::Not(f) => write_app(out, "not", core::iter::once(&**f as &dyn Emit), wire),
            Formula::Implies(l, r) => {
                write_app(out, "=>", [&**l as &dyn Emit, &**r].into_iter(), wire)
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Bool(_) | Formula::Cmp(..) => 1,
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            Formula::Not(f) => 1 + f.size(),
            Formula::Implies(l, r) => 1 + l.size() + r.size(),
        }
    }
}

/// Game-file surface syntax (primes as apostrophes).
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, false);
        f.write_str(&s)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, false);
        f.write_str(&s)
    }
}
