//! The teacher: checks a hypothesis against the winning-set conditions and
//! answers with a counterexample of the first violated kind.

use std::fmt;

use gamesynth_core::formula::{EvalError, Formula};
use gamesynth_core::learner::DecisionTree;
use gamesynth_core::{GameDef, Player, Vertex};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::successors;
use crate::solver::{Assertion, SatResult, Session};

/// Candidates examined by the enumerate-and-test fallback of the
/// existential check before giving up.
pub const FALLBACK_BOUND: usize = 256;

/// Each check first looks for a witness with every coordinate in
/// `[-k, k]`, for each `k` in turn, and only then without bounds.
pub const WITNESS_TIERS: &[i64] = &[4, 16];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub formula: Formula,
    pub tree: Option<DecisionTree>,
}

impl Hypothesis {
    pub fn from_tree(tree: DecisionTree, vars: &[String]) -> Self {
        Hypothesis {
            formula: tree.to_formula(vars),
            tree: Some(tree),
        }
    }

    pub fn from_formula(formula: Formula) -> Self {
        Hypothesis { formula, tree: None }
    }

    pub fn contains(&self, g: &GameDef, v: &Vertex) -> Result<bool, EvalError> {
        match &self.tree {
            Some(t) => Ok(t.eval(v)),
            None => self.formula.eval(&g.assignment(v)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CexKind {
    Positive,
    Negative,
    Existential,
    Universal,
}

impl CexKind {
    pub fn name(self) -> &'static str {
        match self {
            CexKind::Positive => "positive",
            CexKind::Negative => "negative",
            CexKind::Existential => "existential",
            CexKind::Universal => "universal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Counterexample {
    Positive(Vertex),
    Negative(Vertex),
    /// `v -> (s_1 | ... | s_n)` with `succs = E({v})`.
    Existential(Vertex, Vec<Vertex>),
    /// `v -> (s_1 & ... & s_n)` with `succs = E({v})`.
    Universal(Vertex, Vec<Vertex>),
}

impl Counterexample {
    pub fn kind(&self) -> CexKind {
        match self {
            Counterexample::Positive(_) => CexKind::Positive,
            Counterexample::Negative(_) => CexKind::Negative,
            Counterexample::Existential(..) => CexKind::Existential,
            Counterexample::Universal(..) => CexKind::Universal,
        }
    }

    pub fn vertex(&self) -> &Vertex {
        match self {
            Counterexample::Positive(v)
            | Counterexample::Negative(v)
            | Counterexample::Existential(v, _)
            | Counterexample::Universal(v, _) => v,
        }
    }

    pub fn successors(&self) -> &[Vertex] {
        match self {
            Counterexample::Existential(_, s) | Counterexample::Universal(_, s) => s,
            _ => &[],
        }
    }

    pub fn to_json(&self) -> Value {
        let v = &self.vertex().0;
        match self {
            Counterexample::Positive(_) | Counterexample::Negative(_) => json!({ "vertex": v }),
            _ => {
                let succs: Vec<&Vec<i64>> = self.successors().iter().map(|s| &s.0).collect();
                json!({ "vertex": v, "succs": succs })
            }
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |succs: &[Vertex], sep: &str| {
            succs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(sep)
        };
        match self {
            Counterexample::Positive(v) => write!(f, "positive {v}"),
            Counterexample::Negative(v) => write!(f, "negative {v}"),
            Counterexample::Existential(v, s) => write!(f, "existential {v} -> ({})", join(s, " | ")),
            Counterexample::Universal(v, s) => write!(f, "universal {v} -> ({})", join(s, " & ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(Counterexample),
}

fn witness(g: &GameDef, r: SatResult, check: &str) -> Result<Option<Vertex>> {
    match r {
        SatResult::Sat(a) => Ok(Some(g.vertex_of(&a, false).expect("model binds every variable"))),
        SatResult::Unsat => Ok(None),
        SatResult::Unknown(why) => Err(Error::TeacherInconclusive(format!("{check} check: {why}"))),
    }
}

fn boxed(g: &GameDef, k: i64) -> Assertion {
    use gamesynth_core::formula::{CmpOp, Term};
    let mut cs = Vec::new();
    for x in &g.variables {
        cs.push(Formula::cmp(CmpOp::Le, Term::Const(-k), Term::var(x)));
        cs.push(Formula::cmp(CmpOp::Le, Term::var(x), Term::Const(k)));
    }
    Formula::and(cs).into()
}

/// Runs `assertions` under each witness tier, then unbounded. A tier that
/// is not Sat falls through to the next one.
fn tiered(g: &GameDef, s: &mut Session, assertions: Vec<Assertion>) -> Result<SatResult> {
    let cur = g.current_vars();
    for &k in WITNESS_TIERS {
        let mut a = assertions.clone();
        a.push(boxed(g, k));
        if let r @ SatResult::Sat(_) = s.check(&a, &cur)? {
            return Ok(r);
        }
    }
    Ok(s.check(&assertions, &cur)?)
}

fn nonempty_successors(g: &GameDef, v: &Vertex, s: &mut Session, cap: usize) -> Result<Vec<Vertex>> {
    let succs = successors(g, v, s, cap)?;
    if succs.is_empty() {
        return Err(Error::DeadEnd(v.clone()));
    }
    Ok(succs)
}

/// Runs the positive, negative, existential and universal checks in that
/// order and returns the first counterexample found.
pub fn check_hypothesis(g: &GameDef, h: &Hypothesis, s: &mut Session, cap: usize) -> Result<Verdict> {
    let hf = h.formula.clone();
    let not_h = Formula::not(hf.clone());
    let not_h_next = Formula::not(hf.prime());

    let r = tiered(g, s, vec![g.init.clone().into(), not_h.into()])?;
    if let Some(v) = witness(g, r, "positive")? {
        return Ok(Verdict::No(Counterexample::Positive(v)));
    }

    let r = tiered(g, s, vec![hf.clone().into(), Formula::not(g.safe.clone()).into()])?;
    if let Some(v) = witness(g, r, "negative")? {
        return Ok(Verdict::No(Counterexample::Negative(v)));
    }

    let trapped = Assertion::ForallNext {
        vars: g.variables.clone(),
        body: Formula::implies(g.edges.clone(), not_h_next.clone()),
    };
    let r = tiered(g, s, vec![hf.clone().into(), g.player0.clone().into(), trapped])?;
    match r {
        SatResult::Sat(a) => {
            let v = g.vertex_of(&a, false).expect("model binds every variable");
            let succs = nonempty_successors(g, &v, s, cap)?;
            return Ok(Verdict::No(Counterexample::Existential(v, succs)));
        }
        SatResult::Unsat => {}
        SatResult::Unknown(why) => {
            if let Some(c) = existential_fallback(g, h, s, cap, &why)? {
                return Ok(Verdict::No(c));
            }
        }
    }

    let r = tiered(
        g,
        s,
        vec![
            hf.into(),
            Formula::not(g.player0.clone()).into(),
            g.edges.clone().into(),
            not_h_next.into(),
        ],
    )?;
    if let Some(v) = witness(g, r, "universal")? {
        let succs = nonempty_successors(g, &v, s, cap)?;
        return Ok(Verdict::No(Counterexample::Universal(v, succs)));
    }
    Ok(Verdict::Yes)
}

/// Enumerates Player-0 vertices of the hypothesis and tests their successor
/// sets directly.
fn existential_fallback(
    g: &GameDef,
    h: &Hypothesis,
    s: &mut Session,
    cap: usize,
    why: &str,
) -> Result<Option<Counterexample>> {
    let cur = g.current_vars();
    let mut assertions: Vec<Assertion> = vec![h.formula.clone().into(), g.player0.clone().into()];
    for _ in 0..FALLBACK_BOUND {
        let v = match s.check(&assertions, &cur)? {
            SatResult::Sat(a) => g.vertex_of(&a, false).expect("model binds every variable"),
            SatResult::Unsat => return Ok(None),
            SatResult::Unknown(r) => {
                return Err(Error::TeacherInconclusive(format!("existential check: {why}; fallback: {r}")))
            }
        };
        let succs = nonempty_successors(g, &v, s, cap)?;
        let mut inside = false;
        for w in &succs {
            inside |= h.contains(g, w)?;
        }
        if !inside {
            return Ok(Some(Counterexample::Existential(v, succs)));
        }
        assertions.push(Formula::not(vertex_formula(g, &v)).into());
    }
    Err(Error::TeacherInconclusive(format!(
        "existential check: {why}; fallback bound {FALLBACK_BOUND} reached"
    )))
}

fn vertex_formula(g: &GameDef, v: &Vertex) -> Formula {
    use gamesynth_core::formula::{CmpOp, Term};
    Formula::and(
        g.variables
            .iter()
            .zip(v.coords())
            .map(|(x, &c)| Formula::cmp(CmpOp::Eq, Term::var(x), Term::Const(c)))
            .collect(),
    )
}

/// Whether `c` is a genuine counterexample to `h`, judged by evaluation.
/// For the closedness kinds this checks that every listed successor is an
/// edge target; [`refutes_exact`] also checks that the list is all of `E({v})`.
pub fn refutes(g: &GameDef, h: &Hypothesis, c: &Counterexample) -> bool {
    let judge = || -> Result<bool, EvalError> {
        let v = c.vertex();
        Ok(match c {
            Counterexample::Positive(_) => g.is_init(v)? && !h.contains(g, v)?,
            Counterexample::Negative(_) => h.contains(g, v)? && !g.is_safe(v)?,
            Counterexample::Existential(_, succs) | Counterexample::Universal(_, succs) => {
                let owner = match c.kind() {
                    CexKind::Existential => Player::P0,
                    _ => Player::P1,
                };
                if !h.contains(g, v)? || g.owner(v)? != owner || succs.is_empty() {
                    return Ok(false);
                }
                let mut hits = 0;
                for w in succs {
                    if !g.is_edge(v, w)? {
                        return Ok(false);
                    }
                    hits += h.contains(g, w)? as usize;
                }
                if owner == Player::P0 {
                    hits == 0
                } else {
                    hits < succs.len()
                }
            }
        })
    };
    judge().unwrap_or(false)
}

pub fn refutes_exact(g: &GameDef, h: &Hypothesis, c: &Counterexample, s: &mut Session, cap: usize) -> Result<bool> {
    if !refutes(g, h, c) {
        return Ok(false);
    }
    match c {
        Counterexample::Existential(v, succs) | Counterexample::Universal(v, succs) => {
            Ok(successors(g, v, s, cap)? == *succs)
        }
        _ => Ok(true),
    }
}

/// The least successor of `v` inside the winning set `w`.
pub fn controller_step(g: &GameDef, w: &Hypothesis, v: &Vertex, s: &mut Session, cap: usize) -> Result<Vertex> {
    let succs = successors(g, v, s, cap)?;
    choose_successor(g, w, v, &succs)
}

pub(crate) fn choose_successor(g: &GameDef, w: &Hypothesis, v: &Vertex, succs: &[Vertex]) -> Result<Vertex> {
    for s in succs {
        if w.contains(g, s)? {
            return Ok(s.clone());
        }
    }
    Err(Error::NotExistentiallyClosed(v.clone()))
}
