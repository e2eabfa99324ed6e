//! Run reports: a JSON object and a table row per synthesis run.

use serde::Serialize;

use crate::cegis::{CegisResult, CexCounts};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_NO_RESULT: i32 = 1;
pub const EXIT_UNREALIZABLE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

pub fn exit_code(r: &CegisResult) -> i32 {
    match r {
        CegisResult::Solved { .. } => EXIT_SOLVED,
        CegisResult::NoTree { .. } | CegisResult::Exhausted { .. } => EXIT_NO_RESULT,
        CegisResult::Unrealizable { .. } => EXIT_UNREALIZABLE,
        CegisResult::TeacherError { .. } => EXIT_RESOURCE,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub game: String,
    pub outcome: String,
    pub iterations: usize,
    pub tree_size: usize,
    pub wall_ms: u64,
    pub counterexamples: CexCounts,
    pub solver_queries: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn new(game: &str, r: &CegisResult, artifacts: Vec<String>) -> Self {
        let s = r.stats();
        let detail = match r {
            CegisResult::TeacherError { detail, .. } => Some(detail.clone()),
            CegisResult::Exhausted { reason, .. } => Some(format!("{reason:?}").to_lowercase()),
            CegisResult::Unrealizable { witness, .. } => Some(format!("conflict over {} constraints", witness.len())),
            _ => None,
        };
        RunReport {
            game: game.to_string(),
            outcome: r.outcome().to_string(),
            iterations: s.iterations,
            tree_size: s.tree_size,
            wall_ms: s.total_ms,
            counterexamples: s.counterexamples.clone(),
            solver_queries: s.solver_queries,
            detail,
            artifacts,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn table_header() -> String {
        format!(
            "{:<20} {:<14} {:>6} {:>5} {:>10}  {:>4} {:>4} {:>4} {:>4}",
            "game", "outcome", "iter", "size", "time(s)", "pos", "neg", "ex", "un"
        )
    }

    pub fn table_row(&self) -> String {
        let c = &self.counterexamples;
        format!(
            "{:<20} {:<14} {:>6} {:>5} {:>10.2}  {:>4} {:>4} {:>4} {:>4}",
            self.game,
            self.outcome,
            self.iterations,
            self.tree_size,
            self.wall_ms as f64 / 1000.0,
            c.positive,
            c.negative,
            c.existential,
            c.universal
        )
    }
}
