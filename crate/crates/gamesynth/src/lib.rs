//! Solver-backed safety-game synthesis: SMT sessions, the teacher, the
//! learning loop, explicit-game grounding and the command line.

pub mod cegis;
pub mod cli;
pub mod error;
pub mod game;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod teacher;

pub use cegis::{solve, CegisConfig, CegisResult};
pub use error::{Error, Result};
pub use solver::{SolverConfig, Session};
pub use teacher::{check_hypothesis, Counterexample, Hypothesis, Verdict};
