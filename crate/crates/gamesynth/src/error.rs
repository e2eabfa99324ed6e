use gamesynth_core::formula::EvalError;
use gamesynth_core::Vertex;

use crate::solver::SolverError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("branching bound exceeded at {vertex}: game violates finite-branching assumption or cap {cap} too low")]
    BranchingExceeded { vertex: Vertex, cap: usize },
    #[error("vertex {0} has no successors")]
    DeadEnd(Vertex),
    #[error("teacher inconclusive: {0}")]
    TeacherInconclusive(String),
    #[error("hypothesis not existentially closed at {0}")]
    NotExistentiallyClosed(Vertex),
    #[error("illegal move {from} -> {to}")]
    IllegalMove { from: Vertex, to: Vertex },
    #[error("adversary script exhausted after {0} moves")]
    ScriptExhausted(usize),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
