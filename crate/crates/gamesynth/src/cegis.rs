//! The synthesis loop: learner proposes, teacher refutes, until a winning
//! set is found or the sample proves that none exists.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use gamesynth_core::formula::Formula;
use gamesynth_core::learner::horn::{horn_propagate, PartialLabeling};
use gamesynth_core::learner::sample::{
    horn_of_existential, horn_of_negative, horn_of_positive, horn_of_universal,
};
use gamesynth_core::learner::{
    consistent_with_game, generate_predicates, learn_horn_tree, DecisionTree, GameSample, HornConstraint,
    HornSample, Implication, LearnOutcome,
};
use gamesynth_core::GameDef;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::solver::{SolverConfig, Session};
use crate::teacher::{check_hypothesis, refutes, refutes_exact, CexKind, Counterexample, Hypothesis, Verdict};

#[derive(Clone, Debug)]
pub struct CegisConfig {
    pub max_iterations: usize,
    pub solver: SolverConfig,
    pub succ_cap: usize,
    pub octagonal: bool,
    pub trace: Option<PathBuf>,
    /// Wall-clock budget for the whole run.
    pub budget: Option<Duration>,
    /// Per-iteration consistency and honesty assertions.
    pub check_invariants: bool,
}

impl Default for CegisConfig {
    fn default() -> Self {
        CegisConfig {
            max_iterations: 10_000,
            solver: SolverConfig::from_env(),
            succ_cap: 64,
            octagonal: true,
            trace: None,
            budget: None,
            check_invariants: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CexCounts {
    pub positive: usize,
    pub negative: usize,
    pub existential: usize,
    pub universal: usize,
}

impl CexCounts {
    fn bump(&mut self, k: CexKind) {
        match k {
            CexKind::Positive => self.positive += 1,
            CexKind::Negative => self.negative += 1,
            CexKind::Existential => self.existential += 1,
            CexKind::Universal => self.universal += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.positive + self.negative + self.existential + self.universal
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Stats {
    /// Teacher rounds: one per counterexample, plus the final `Yes`.
    pub iterations: usize,
    pub counterexamples: CexCounts,
    /// Inner nodes of the last hypothesis tree.
    pub tree_size: usize,
    pub learn_ms: u64,
    pub teach_ms: u64,
    pub verify_ms: u64,
    pub total_ms: u64,
    pub solver_queries: u64,
}

/// One constraint of an unsatisfiable core, with the counterexample it came
/// from and the hypothesis that counterexample refuted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessStep {
    pub constraint: HornConstraint,
    pub iteration: usize,
    pub counterexample: Counterexample,
    pub hypothesis: Hypothesis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExhaustReason {
    Iterations,
    Budget,
}

#[derive(Clone, Debug)]
pub enum CegisResult {
    Solved {
        tree: DecisionTree,
        formula: Formula,
        stats: Stats,
    },
    Unrealizable {
        witness: Vec<WitnessStep>,
        stats: Stats,
    },
    /// The predicate pool cannot separate the sample.
    NoTree { stats: Stats },
    Exhausted { reason: ExhaustReason, stats: Stats },
    TeacherError { detail: String, stats: Stats },
}

impl CegisResult {
    pub fn stats(&self) -> &Stats {
        match self {
            CegisResult::Solved { stats, .. }
            | CegisResult::Unrealizable { stats, .. }
            | CegisResult::NoTree { stats }
            | CegisResult::Exhausted { stats, .. }
            | CegisResult::TeacherError { stats, .. } => stats,
        }
    }

    pub fn outcome(&self) -> &'static str {
        match self {
            CegisResult::Solved { .. } => "solved",
            CegisResult::Unrealizable { .. } => "unrealizable",
            CegisResult::NoTree { .. } => "no-tree",
            CegisResult::Exhausted { .. } => "exhausted",
            CegisResult::TeacherError { .. } => "teacher-error",
        }
    }
}

/// Horn constraints of a counterexample; a sound sample only ever grows.
pub fn horn_of(c: &Counterexample) -> Vec<HornConstraint> {
    match c {
        Counterexample::Positive(v) => horn_of_positive(v),
        Counterexample::Negative(v) => horn_of_negative(v),
        Counterexample::Existential(v, s) => horn_of_existential(&Implication::new(v.clone(), s.iter().cloned())),
        Counterexample::Universal(v, s) => horn_of_universal(&Implication::new(v.clone(), s.iter().cloned())),
    }
}

fn add_to_sample(sg: &mut GameSample, c: &Counterexample) {
    match c {
        Counterexample::Positive(v) => {
            sg.pos.insert(v.clone());
        }
        Counterexample::Negative(v) => {
            sg.neg.insert(v.clone());
        }
        Counterexample::Existential(v, s) => {
            sg.ex.insert(Implication::new(v.clone(), s.iter().cloned()));
        }
        Counterexample::Universal(v, s) => {
            sg.un.insert(Implication::new(v.clone(), s.iter().cloned()));
        }
    }
}

/// Replays an unrealizability witness: the constraints must be
/// unsatisfiable on their own and each originating counterexample must
/// refute the hypothesis it answered.
pub fn witness_replays(g: &GameDef, witness: &[WitnessStep]) -> bool {
    let hs = HornSample::new(witness.iter().map(|w| w.constraint.clone()).collect());
    horn_propagate(&hs, &PartialLabeling::new()).is_err()
        && witness
            .iter()
            .all(|w| horn_of(&w.counterexample).contains(&w.constraint) && refutes(g, &w.hypothesis, &w.counterexample))
}

struct Trace {
    out: Option<BufWriter<File>>,
}

impl Trace {
    fn record(&mut self, iter: usize, cex: Option<&Counterexample>, tree: &str, tree_size: usize, elapsed: Duration) {
        let Some(out) = self.out.as_mut() else { return };
        let line = json!({
            "iter": iter,
            "cex_kind": cex.map_or("none", |c| c.kind().name()),
            "cex": cex.map(Counterexample::to_json),
            "tree": tree,
            "tree_size": tree_size,
            "elapsed_ms": elapsed.as_millis() as u64,
        });
        let _ = writeln!(out, "{line}");
    }
}

fn ms(d: Duration) -> u64 {
    d.as_millis() as u64
}

pub fn solve(g: &GameDef, cfg: &CegisConfig) -> CegisResult {
    let start = Instant::now();
    let mut stats = Stats::default();
    let finish = |mut stats: Stats, s: Option<&Session>| {
        stats.total_ms = ms(start.elapsed());
        if let Some(s) = s {
            stats.solver_queries = s.queries();
        }
        stats
    };
    let mut trace = Trace {
        out: match &cfg.trace {
            Some(p) => match File::create(p) {
                Ok(f) => Some(BufWriter::new(f)),
                Err(e) => {
                    return CegisResult::TeacherError {
                        detail: format!("cannot create trace file {}: {e}", p.display()),
                        stats: finish(stats, None),
                    }
                }
            },
            None => None,
        },
    };
    let mut session = match Session::open(cfg.solver.clone()) {
        Ok(s) => s,
        Err(e) => {
            return CegisResult::TeacherError {
                detail: e.to_string(),
                stats: finish(stats, None),
            }
        }
    };

    let mut sample = GameSample::new();
    let mut seen: BTreeSet<Counterexample> = BTreeSet::new();
    // (constraint, index into `log`) in arrival order
    let mut horn: Vec<(HornConstraint, usize)> = Vec::new();
    let mut log: Vec<(Hypothesis, Counterexample)> = Vec::new();

    loop {
        let elapsed = start.elapsed();
        if let Some(b) = cfg.budget {
            if elapsed >= b {
                return CegisResult::Exhausted {
                    reason: ExhaustReason::Budget,
                    stats: finish(stats, Some(&session)),
                };
            }
            session.set_timeout(cfg.solver.timeout.min(b - elapsed));
        }
        if stats.iterations >= cfg.max_iterations {
            return CegisResult::Exhausted {
                reason: ExhaustReason::Iterations,
                stats: finish(stats, Some(&session)),
            };
        }

        let t = Instant::now();
        let hs = HornSample::new(horn.iter().map(|(c, _)| c.clone()).collect());
        let pool = generate_predicates(&sample.points(), cfg.octagonal);
        let outcome = learn_horn_tree(&hs, &pool);
        stats.learn_ms += ms(t.elapsed());
        let tree = match outcome {
            LearnOutcome::Tree(t_h) => t_h.flip_leaves(),
            LearnOutcome::NoTree => return CegisResult::NoTree { stats: finish(stats, Some(&session)) },
            LearnOutcome::Unsatisfiable(conflict) => {
                let witness = conflict
                    .clauses
                    .iter()
                    .map(|&ci| {
                        let (constraint, li) = &horn[ci];
                        WitnessStep {
                            constraint: constraint.clone(),
                            iteration: li + 1,
                            counterexample: log[*li].1.clone(),
                            hypothesis: log[*li].0.clone(),
                        }
                    })
                    .collect();
                return CegisResult::Unrealizable {
                    witness,
                    stats: finish(stats, Some(&session)),
                };
            }
        };
        if cfg.check_invariants && !consistent_with_game(&tree, &sample) {
            return internal_error("hypothesis inconsistent with the sample", finish(stats, Some(&session)));
        }
        stats.tree_size = tree.inner_nodes();
        let hyp = Hypothesis::from_tree(tree, &g.variables);

        let t = Instant::now();
        let verdict = check_hypothesis(g, &hyp, &mut session, cfg.succ_cap);
        stats.teach_ms += ms(t.elapsed());
        stats.iterations += 1;
        let verdict = match verdict {
            Ok(v) => v,
            Err(e) => return teacher_failure(e, cfg, start, finish(stats, Some(&session))),
        };
        let tree_text = hyp.tree.as_ref().unwrap().to_sexp(&g.variables);

        match verdict {
            Verdict::Yes => {
                trace.record(stats.iterations, None, &tree_text, stats.tree_size, start.elapsed());
                let t = Instant::now();
                let recheck = Session::open(cfg.solver.clone())
                    .map_err(Error::from)
                    .and_then(|mut fresh| check_hypothesis(g, &hyp, &mut fresh, cfg.succ_cap));
                stats.verify_ms += ms(t.elapsed());
                return match recheck {
                    Ok(Verdict::Yes) => CegisResult::Solved {
                        tree: hyp.tree.unwrap(),
                        formula: hyp.formula,
                        stats: finish(stats, Some(&session)),
                    },
                    Ok(Verdict::No(c)) => {
                        internal_error(&format!("re-verification found {c}"), finish(stats, Some(&session)))
                    }
                    Err(e) => teacher_failure(e, cfg, start, finish(stats, Some(&session))),
                };
            }
            Verdict::No(cex) => {
                trace.record(stats.iterations, Some(&cex), &tree_text, stats.tree_size, start.elapsed());
                if cfg.check_invariants {
                    match refutes_exact(g, &hyp, &cex, &mut session, cfg.succ_cap) {
                        Ok(true) => {}
                        Ok(false) => {
                            return internal_error(
                                &format!("teacher returned {cex}, which does not refute the hypothesis"),
                                finish(stats, Some(&session)),
                            )
                        }
                        Err(e) => return teacher_failure(e, cfg, start, finish(stats, Some(&session))),
                    }
                }
                if !seen.insert(cex.clone()) {
                    return internal_error(&format!("counterexample {cex} repeated"), finish(stats, Some(&session)));
                }
                stats.counterexamples.bump(cex.kind());
                add_to_sample(&mut sample, &cex);
                let li = log.len();
                horn.extend(horn_of(&cex).into_iter().map(|c| (c, li)));
                log.push((hyp, cex));
            }
        }
    }
}

fn internal_error(detail: &str, stats: Stats) -> CegisResult {
    CegisResult::TeacherError {
        detail: format!("internal error: {detail}"),
        stats,
    }
}

/// Solver timeouts caused by the overall budget count as exhaustion.
fn teacher_failure(e: Error, cfg: &CegisConfig, start: Instant, stats: Stats) -> CegisResult {
    if cfg.budget.is_some_and(|b| start.elapsed() >= b) {
        return CegisResult::Exhausted {
            reason: ExhaustReason::Budget,
            stats,
        };
    }
    CegisResult::TeacherError {
        detail: e.to_string(),
        stats,
    }
}
