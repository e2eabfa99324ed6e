//! Decision trees over predicates: valuation, leaf flipping, conversion to
//! formulas and the s-expression / DOT formats.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::predicate::{Predicate, Sign};
use super::sample::{DataPoint, GameSample, HornSample};
use crate::formula::Formula;
use crate::parse::ParseError;
use crate::sexp::{self, Sexp};

/// Inner nodes descend left when the predicate holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DecisionTree {
    Leaf(bool),
    Node {
        pred: Predicate,
        left: Box<DecisionTree>,
        right: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn node(pred: Predicate, left: DecisionTree, right: DecisionTree) -> Self {
        DecisionTree::Node {
            pred,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// The valuation `t(d)`.
    pub fn eval(&self, d: &DataPoint) -> bool {
        let mut t = self;
        loop {
            match t {
                DecisionTree::Leaf(b) => return *b,
                DecisionTree::Node { pred, left, right } => {
                    t = if pred.holds(d) { left } else { right };
                }
            }
        }
    }

    /// Same structure, every leaf label negated.
    pub fn flip_leaves(&self) -> DecisionTree {
        match self {
            DecisionTree::Leaf(b) => DecisionTree::Leaf(!b),
            DecisionTree::Node { pred, left, right } => {
                DecisionTree::node(*pred, left.flip_leaves(), right.flip_leaves())
            }
        }
    }

    pub fn inner_nodes(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { left, right, .. } => 1 + left.inner_nodes() + right.inner_nodes(),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Node { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Index of the leaf `d` reaches, counting leaves left to right.
    pub fn leaf_index(&self, d: &DataPoint) -> usize {
        let mut t = self;
        let mut offset = 0;
        loop {
            match t {
                DecisionTree::Leaf(_) => return offset,
                DecisionTree::Node { pred, left, right } => {
                    if pred.holds(d) {
                        t = left;
                    } else {
                        offset += left.leaves();
                        t = right;
                    }
                }
            }
        }
    }

    /// Replaces leaf labels left to right.
    pub fn relabel(&self, labels: &[bool]) -> DecisionTree {
        fn go(t: &DecisionTree, labels: &[bool], next: &mut usize) -> DecisionTree {
            match t {
                DecisionTree::Leaf(_) => {
                    let b = labels[*next];
                    *next += 1;
                    DecisionTree::Leaf(b)
                }
                DecisionTree::Node { pred, left, right } => {
                    let l = go(left, labels, next);
                    let r = go(right, labels, next);
                    DecisionTree::node(*pred, l, r)
                }
            }
        }
        go(self, labels, &mut 0)
    }

    /// Disjunction over root-to-true-leaf paths of the conjunction of the
    /// predicates on the path, negated where the path goes right.
    pub fn to_formula(&self, vars: &[String]) -> Formula {
        fn go(t: &DecisionTree, vars: &[String], path: &mut Vec<Formula>, out: &mut Vec<Formula>) {
            match t {
                DecisionTree::Leaf(true) => out.push(Formula::and(path.clone())),
                DecisionTree::Leaf(false) => {}
                DecisionTree::Node { pred, left, right } => {
                    let p = pred.to_formula(vars);
                    path.push(p.clone());
                    go(left, vars, path, out);
                    path.pop();
                    path.push(Formula::not(p));
                    go(right, vars, path, out);
                    path.pop();
                }
            }
        }
        let mut disjuncts = Vec::new();
        go(self, vars, &mut Vec::new(), &mut disjuncts);
        Formula::or(disjuncts)
    }

    /// `(node (<= x 2) (leaf 1) (leaf 0))`
    pub fn to_sexp(&self, vars: &[String]) -> String {
        let mut s = String::new();
        self.write_sexp(vars, &mut s);
        s
    }

    fn write_sexp(&self, vars: &[String], out: &mut String) {
        match self {
            DecisionTree::Leaf(b) => {
                let _ = write!(out, "(leaf {})", u8::from(*b));
            }
            DecisionTree::Node { pred, left, right } => {
                let _ = write!(out, "(node {} ", pred.display(vars));
                left.write_sexp(vars, out);
                out.push(' ');
                right.write_sexp(vars, out);
                out.push(')');
            }
        }
    }

    pub fn to_dot(&self, vars: &[String]) -> String {
        fn go(t: &DecisionTree, vars: &[String], out: &mut String, next: &mut usize) -> usize {
            let id = *next;
            *next += 1;
            match t {
                DecisionTree::Leaf(b) => {
                    let _ = writeln!(out, "  n{id} [shape=box, label=\"{}\"];", u8::from(*b));
                }
                DecisionTree::Node { pred, left, right } => {
                    let _ = writeln!(out, "  n{id} [label=\"{}\"];", pred.display(vars));
                    let l = go(left, vars, out, next);
                    let r = go(right, vars, out, next);
                    let _ = writeln!(out, "  n{id} -> n{l} [label=\"yes\"];");
                    let _ = writeln!(out, "  n{id} -> n{r} [label=\"no\", style=dashed];");
                }
            }
            id
        }
        let mut out = String::from("digraph tree {\n");
        go(self, vars, &mut out, &mut 0);
        out.push_str("}\n");
        out
    }
}

/// Reads the s-expression tree format, resolving attribute names against `vars`.
pub fn parse_tree(text: &str, vars: &[String]) -> Result<DecisionTree, ParseError> {
    tree_from_sexp(&sexp::parse_one(text)?, vars)
}

fn syntax(s: &Sexp, msg: impl Into<String>) -> ParseError {
    ParseError {
        pos: s.pos(),
        kind: crate::parse::ParseErrorKind::Syntax(msg.into()),
    }
}

fn tree_from_sexp(s: &Sexp, vars: &[String]) -> Result<DecisionTree, ParseError> {
    let items = s.as_list().ok_or_else(|| syntax(s, "expected `(leaf ..)` or `(node ..)`"))?;
    match (s.head(), items.len()) {
        (Some("leaf"), 2) => match items[1].as_atom() {
            Some("1" | "true") => Ok(DecisionTree::Leaf(true)),
            Some("0" | "false") => Ok(DecisionTree::Leaf(false)),
            _ => Err(syntax(&items[1], "leaf label must be 0 or 1")),
        },
        (Some("node"), 4) => Ok(DecisionTree::node(
            predicate_from_sexp(&items[1], vars)?,
            tree_from_sexp(&items[2], vars)?,
            tree_from_sexp(&items[3], vars)?,
        )),
        _ => Err(syntax(s, "expected `(leaf b)` or `(node pred left right)`")),
    }
}

fn predicate_from_sexp(s: &Sexp, vars: &[String]) -> Result<Predicate, ParseError> {
    let attr = |e: &Sexp| -> Result<usize, ParseError> {
        let name = e.as_atom().ok_or_else(|| syntax(e, "expected a variable"))?;
        vars.iter().position(|v| v == name).ok_or_else(|| ParseError {
            pos: e.pos(),
            kind: crate::parse::ParseErrorKind::UndeclaredVariable(name.into()),
        })
    };
    let items = s.as_list().ok_or_else(|| syntax(s, "expected `(<= ...)`"))?;
    if s.head() != Some("<=") || items.len() != 3 {
        return Err(syntax(s, "predicates have the form `(<= lhs c)`"));
    }
    let c: i64 = items[2]
        .as_atom()
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| syntax(&items[2], "expected an integer constant"))?;
    let lhs = &items[1];
    match lhs {
        Sexp::Atom(..) => Ok(Predicate::threshold(attr(lhs)?, c)),
        Sexp::List(parts, _) if parts.len() == 3 => {
            let sign = match lhs.head() {
                Some("+") => Sign::Plus,
                Some("-") => Sign::Minus,
                _ => return Err(syntax(lhs, "octagonal form must be `(+ a b)` or `(- a b)`")),
            };
            let (i, j) = (attr(&parts[1])?, attr(&parts[2])?);
            if i >= j {
                return Err(syntax(lhs, "octagonal attributes must appear in variable order"));
            }
            Ok(Predicate::octagonal(i, j, sign, c))
        }
        _ => Err(syntax(lhs, "unsupported predicate shape")),
    }
}

/// `D(t)` is consistent with the game sample.
pub fn consistent_with_game(t: &DecisionTree, sg: &GameSample) -> bool {
    sg.is_consistent(|d| t.eval(d))
}

/// `D(t)` is consistent with the Horn sample.
pub fn consistent_with_horn(t: &DecisionTree, hs: &HornSample) -> bool {
    hs.is_satisfied_by(|d| t.eval(d))
}

/// Human-readable rendering for error messages.
pub fn describe(t: &DecisionTree, vars: &[String]) -> String {
    format!("{} ({} inner nodes)", t.to_sexp(vars), t.inner_nodes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Assignment;
    use crate::game::Vertex;
    use alloc::string::ToString;
    use alloc::vec;

    fn vars() -> Vec<String> {
        vec!["x".to_string(), "y".to_string()]
    }

    /// `x < 0 ? 0 : (x < 3 ? 1 : 0)` over the integers.
    fn box_tree() -> DecisionTree {
        DecisionTree::node(
            Predicate::threshold(0, -1),
            DecisionTree::Leaf(false),
            DecisionTree::node(
                Predicate::threshold(0, 2),
                DecisionTree::Leaf(true),
                DecisionTree::Leaf(false),
            ),
        )
    }

    #[test]
    fn valuation() {
        let t = box_tree();
        assert!(t.eval(&Vertex::new(vec![1, 0])));
        assert!(!t.eval(&Vertex::new(vec![-1, 1])));
        assert!(!t.eval(&Vertex::new(vec![5, 0])));
    }

    #[test]
    fn flip() {
        assert_eq!(DecisionTree::Leaf(true).flip_leaves(), DecisionTree::Leaf(false));
        let f = box_tree().flip_leaves();
        for x in -5..=8 {
            let d = Vertex::new(vec![x, 0]);
            assert_eq!(f.eval(&d), !(0..3).contains(&x));
        }
        assert_eq!(f.flip_leaves(), box_tree());
    }

    #[test]
    fn formula_conversion() {
        assert_eq!(DecisionTree::Leaf(false).to_formula(&vars()), Formula::Bool(false));
        let f = box_tree().to_formula(&vars());
        assert_eq!(f.to_string(), "(and (not (<= x -1)) (<= x 2))");
        for x in -5..=8 {
            let a = Assignment::new().with("x", x).with("y", 0);
            assert_eq!(f.eval(&a).unwrap(), (0..=2).contains(&x));
        }
        let both = DecisionTree::node(
            Predicate::threshold(0, 0),
            DecisionTree::Leaf(true),
            DecisionTree::Leaf(true),
        );
        let f = both.to_formula(&vars());
        for x in -3..=3 {
            assert!(f.eval(&Assignment::new().with("x", x)).unwrap());
        }
    }

    #[test]
    fn sexp_round_trip() {
        let t = DecisionTree::node(
            Predicate::octagonal(0, 1, Sign::Minus, -1),
            box_tree(),
            DecisionTree::Leaf(true),
        );
        let s = t.to_sexp(&vars());
        assert_eq!(
            s,
            "(node (<= (- x y) -1) (node (<= x -1) (leaf 0) (node (<= x 2) (leaf 1) (leaf 0))) (leaf 1))"
        );
        assert_eq!(parse_tree(&s, &vars()).unwrap(), t);
    }

    #[test]
    fn malformed_trees() {
        assert!(parse_tree("(leaf 2)", &vars()).is_err());
        assert!(parse_tree("(node (<= z 1) (leaf 0) (leaf 1))", &vars()).is_err());
        assert!(parse_tree("(node (<= (- y x) 1) (leaf 0) (leaf 1))", &vars()).is_err());
        assert!(parse_tree("(node (< x 1) (leaf 0) (leaf 1))", &vars()).is_err());
    }

    #[test]
    fn dot_export_mentions_every_node() {
        let dot = box_tree().to_dot(&vars());
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.contains("(<= x 2)"));
    }

    #[test]
    fn leaf_indexing() {
        let t = box_tree();
        assert_eq!(t.leaves(), 3);
        assert_eq!(t.leaf_index(&Vertex::new(vec![-4, 0])), 0);
        assert_eq!(t.leaf_index(&Vertex::new(vec![1, 0])), 1);
        assert_eq!(t.leaf_index(&Vertex::new(vec![9, 0])), 2);
        assert!(t.relabel(&[true, false, true]).eval(&Vertex::new(vec![9, 0])));
    }
}
