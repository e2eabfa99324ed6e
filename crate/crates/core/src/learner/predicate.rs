//! Threshold and octagonal predicates over data points.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::sample::DataPoint;
use crate::formula::{CmpOp, Formula, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// The linear form a predicate compares against its constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    /// `d[i]`
    Attr(usize),
    /// `d[i] + d[j]` or `d[i] - d[j]`, with `i < j`.
    Oct(usize, usize, Sign),
}

impl Axis {
    pub fn value(self, d: &DataPoint) -> i64 {
        let c = d.coords();
        match self {
            Axis::Attr(i) => c[i],
            Axis::Oct(i, j, Sign::Plus) => c[i].saturating_add(c[j]),
            Axis::Oct(i, j, Sign::Minus) => c[i].saturating_sub(c[j]),
        }
    }

    fn term(self, vars: &[String]) -> Term {
        match self {
            Axis::Attr(i) => Term::var(&vars[i]),
            Axis::Oct(i, j, Sign::Plus) => Term::Add(alloc::vec![Term::var(&vars[i]), Term::var(&vars[j])]),
            Axis::Oct(i, j, Sign::Minus) => {
                Term::Sub(Box::new(Term::var(&vars[i])), Box::new(Term::var(&vars[j])))
            }
        }
    }
}

/// `d[attr] <= c` or `d[i] +/- d[j] <= c`.
///
/// The derived order (kind, then indices and sign, then constant) is the
/// deterministic pool order used for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Threshold { attr: usize, c: i64 },
    Octagonal { i: usize, j: usize, sign: Sign, c: i64 },
}

impl Predicate {
    pub fn threshold(attr: usize, c: i64) -> Self {
        Predicate::Threshold { attr, c }
    }

    pub fn octagonal(i: usize, j: usize, sign: Sign, c: i64) -> Self {
        debug_assert!(i != j);
        Predicate::Octagonal { i, j, sign, c }
    }

    pub fn axis(&self) -> Axis {
        match *self {
            Predicate::Threshold { attr, .. } => Axis::Attr(attr),
            Predicate::Octagonal { i, j, sign, .. } => Axis::Oct(i, j, sign),
        }
    }

    pub fn constant(&self) -> i64 {
        match *self {
            Predicate::Threshold { c, .. } | Predicate::Octagonal { c, .. } => c,
        }
    }

    pub fn holds(&self, d: &DataPoint) -> bool {
        self.axis().value(d) <= self.constant()
    }

    pub fn max_index(&self) -> usize {
        match *self {
            Predicate::Threshold { attr, .. } => attr,
            Predicate::Octagonal { i, j, .. } => i.max(j),
        }
    }

    pub fn to_formula(&self, vars: &[String]) -> Formula {
        Formula::cmp(CmpOp::Le, self.axis().term(vars), Term::Const(self.constant()))
    }

    /// Display helper naming attributes by the game's variables.
    pub fn display<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        PredicateDisplay { pred: self, vars }
    }
}

struct PredicateDisplay<'a> {
    pred: &'a Predicate,
    vars: &'a [String],
}

impl fmt::Display for PredicateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.vars;
        match *self.pred {
            Predicate::Threshold { attr, c } => write!(f, "(<= {} {c})", v[attr]),
            Predicate::Octagonal { i, j, sign, c } => {
                let op = if sign == Sign::Plus { "+" } else { "-" };
                write!(f, "(<= ({op} {} {}) {c})", v[i], v[j])
            }
        }
    }
}

/// Thresholds at every realized attribute value, plus (if `octagonal`) the
/// octagonal predicates at every realized sum and difference of attribute
/// pairs. Sorted and deduplicated.
pub fn generate_predicates<'a>(
    points: impl IntoIterator<Item = &'a DataPoint>,
    octagonal: bool,
) -> Vec<Predicate> {
    let mut out = BTreeSet::new();
    for d in points {
        let n = d.arity();
        for attr in 0..n {
            out.insert(Predicate::threshold(attr, d.coords()[attr]));
        }
        if octagonal {
            for i in 0..n {
                for j in i + 1..n {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let c = Axis::Oct(i, j, sign).value(d);
                        out.insert(Predicate::octagonal(i, j, sign, c));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}
