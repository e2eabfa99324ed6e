//! Safety games `(V0, V1, E, I, F)` over the vertex space Z^n.
//!
//! `V0` is given by the `player0` formula and `V1` is its complement, so the
//! two sets partition Z^n by construction.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::formula::{Assignment, EvalError, Formula, Var};

/// A vertex: integer coordinates ordered like the owning game's variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(pub Vec<i64>);

impl Vertex {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Vertex(coords.into())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for Vertex {
    fn from(v: Vec<i64>) -> Self {
        Vertex(v)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    P0,
    P1,
}

/// Syntactic observations about the edge formula recorded at parse time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameWarning {
    /// The edge formula mentions no primed variable at all.
    EdgesIgnoreSuccessor,
    /// The primed copy of this variable never occurs in the edge formula, so
    /// every vertex has infinitely many successors along it.
    UnboundedBranching(String),
}

impl fmt::Display for GameWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameWarning::EdgesIgnoreSuccessor => f.write_str("edge relation ignores successor"),
            GameWarning::UnboundedBranching(v) => write!(f, "unbounded branching on {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameDef {
    pub variables: Vec<String>,
    pub player0: Formula,
    pub init: Formula,
    pub safe: Formula,
    pub edges: Formula,
    pub warnings: Vec<GameWarning>,
}

impl GameDef {
    /// Builds a game and records the syntactic edge warnings.
    pub fn new(
        variables: Vec<String>,
        player0: Formula,
        init: Formula,
        safe: Formula,
        edges: Formula,
    ) -> Self {
        let warnings = scan_edge_warnings(&variables, &edges);
        GameDef {
            variables,
            player0,
            init,
            safe,
            edges,
            warnings,
        }
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn current_vars(&self) -> Vec<Var> {
        self.variables.iter().map(|v| Var::current(v.clone())).collect()
    }

    pub fn next_vars(&self) -> Vec<Var> {
        self.variables.iter().map(|v| Var::next(v.clone())).collect()
    }

    pub fn assignment(&self, v: &Vertex) -> Assignment {
        debug_assert_eq!(v.arity(), self.arity());
        let mut a = Assignment::new();
        for (name, c) in self.variables.iter().zip(v.coords()) {
            a.current.insert(name.clone(), *c);
        }
        a
    }

    /// Assignment binding `v` to the current copy and `w` to the primed copy.
    pub fn edge_assignment(&self, v: &Vertex, w: &Vertex) -> Assignment {
        let mut a = self.assignment(v);
        for (name, c) in self.variables.iter().zip(w.coords()) {
            a.next.insert(name.clone(), *c);
        }
        a
    }

    /// Reads a vertex back from the current (or, if `primed`, the successor) bindings.
    pub fn vertex_of(&self, a: &Assignment, primed: bool) -> Option<Vertex> {
        let map = if primed { &a.next } else { &a.current };
        self.variables
            .iter()
            .map(|n| map.get(n).copied())
            .collect::<Option<Vec<_>>>()
            .map(Vertex)
    }

    pub fn owner(&self, v: &Vertex) -> Result<Player, EvalError> {
        Ok(if self.player0.eval(&self.assignment(v))? {
            Player::P0
        } else {
            Player::P1
        })
    }

    pub fn is_init(&self, v: &Vertex) -> Result<bool, EvalError> {
        self.init.eval(&self.assignment(v))
    }

    pub fn is_safe(&self, v: &Vertex) -> Result<bool, EvalError> {
        self.safe.eval(&self.assignment(v))
    }

    pub fn is_edge(&self, v: &Vertex, w: &Vertex) -> Result<bool, EvalError> {
        self.edges.eval(&self.edge_assignment(v, w))
    }

    /// True when `validate` must reject the game outright.
    pub fn has_fatal_warning(&self) -> bool {
        self.warnings.contains(&GameWarning::EdgesIgnoreSuccessor)
    }
}

/// Scans the edge formula for successor variables it never constrains.
pub fn scan_edge_warnings(variables: &[String], edges: &Formula) -> Vec<GameWarning> {
    let primed: BTreeSet<String> = edges
        .free_vars()
        .into_iter()
        .filter(|v| v.primed)
        .map(|v| v.name)
        .collect();
    if primed.is_empty() {
        return alloc::vec![GameWarning::EdgesIgnoreSuccessor];
    }
    variables
        .iter()
        .filter(|v| !primed.contains(*v))
        .map(|v| GameWarning::UnboundedBranching(v.clone()))
        .collect()
}
