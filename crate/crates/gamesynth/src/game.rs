//! Solver-backed operations on games: validation and successor sets.

use gamesynth_core::formula::{Formula, Which};
use gamesynth_core::game::GameWarning;
use gamesynth_core::{GameDef, Vertex};

use crate::error::{Error, Result};
use crate::solver::{Assertion, Enumeration, SatResult, Session};

/// Outcome of one symbolic well-formedness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Holds,
    /// Violated, with a witness vertex where one exists.
    Violated(Option<Vertex>),
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFormedness {
    pub init_nonempty: Check,
    /// Every vertex has at least one successor.
    pub totality: Check,
    pub warnings: Vec<GameWarning>,
}

impl WellFormedness {
    /// Violations that make the game unusable. Inconclusive checks only warn.
    pub fn errors(&self) -> Vec<String> {
        let mut out = Vec::new();
        if matches!(self.init_nonempty, Check::Violated(_)) {
            out.push("initial set is empty".to_string());
        }
        if let Check::Violated(w) = &self.totality {
            out.push(match w {
                Some(v) => format!("vertex {v} has no outgoing edge"),
                None => "some vertex has no outgoing edge".to_string(),
            });
        }
        if self.warnings.contains(&GameWarning::EdgesIgnoreSuccessor) {
            out.push(GameWarning::EdgesIgnoreSuccessor.to_string());
        }
        out
    }
}

pub fn validate(g: &GameDef, s: &mut Session) -> Result<WellFormedness> {
    let cur = g.current_vars();
    let init_nonempty = match s.check(&[g.init.clone().into()], &cur)? {
        SatResult::Sat(_) => Check::Holds,
        SatResult::Unsat => Check::Violated(None),
        SatResult::Unknown(r) => Check::Inconclusive(r),
    };
    let stuck = Assertion::ForallNext {
        vars: g.variables.clone(),
        body: Formula::not(g.edges.clone()),
    };
    let totality = match s.check(&[stuck], &cur)? {
        SatResult::Sat(a) => Check::Violated(g.vertex_of(&a, false)),
        SatResult::Unsat => Check::Holds,
        SatResult::Unknown(r) => Check::Inconclusive(r),
    };
    Ok(WellFormedness {
        init_nonempty,
        totality,
        warnings: g.warnings.clone(),
    })
}

/// `E({v})`, sorted.
pub fn successors(g: &GameDef, v: &Vertex, s: &mut Session, cap: usize) -> Result<Vec<Vertex>> {
    let edges = g.edges.instantiate(&g.assignment(v), Which::Unprimed)?;
    let next = g.next_vars();
    match s.enumerate_models(&[edges.into()], &next, cap)? {
        Enumeration::OverCap => Err(Error::BranchingExceeded { vertex: v.clone(), cap }),
        Enumeration::Models(ms) => {
            let mut out: Vec<Vertex> = ms
                .iter()
                .map(|m| g.vertex_of(m, true).expect("projected model binds successor"))
                .collect();
            out.sort();
            out.dedup();
            Ok(out)
        }
    }
}
