//! Symbolic safety games over the integers, decision-tree learning from
//! Horn samples, and an explicit finite-game oracle.

#![no_std]

extern crate alloc;

pub mod explicit;
pub mod formula;
pub mod game;
pub mod learner;
pub mod parse;
pub mod sexp;

pub use formula::{Assignment, CmpOp, Formula, Term, Var};
pub use game::{GameDef, Player, Vertex};
