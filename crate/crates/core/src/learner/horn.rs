//! Unit propagation for Horn samples.
//!
//! Labels read "`true` = member of the set being learned". Propagation is
//! the least fixpoint of three rules: a fact forces its point true, a clause
//! whose antecedents are all true forces its consequent true, and a clause
//! whose consequent is false (or `false`) with all antecedents but one true
//! forces the remaining antecedent false. A closed, conflict-free partial
//! labeling always extends to a full one by labeling every unknown point
//! false, so propagation decides Horn satisfiability.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::sample::{Consequent, DataPoint, HornSample};

/// Clause over dense point ids; `cons == None` is `false`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub ante: Vec<usize>,
    pub cons: Option<usize>,
}

impl Clause {
    fn is_tautology(&self) -> bool {
        matches!(self.cons, Some(c) if self.ante.contains(&c))
    }
}

/// Horn clauses over ids `0..n` with per-point watch lists.
#[derive(Clone, Debug)]
pub struct HornCore {
    pub n: usize,
    pub clauses: Vec<Clause>,
    watch: Vec<Vec<usize>>,
}

impl HornCore {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Self {
        let mut watch = vec![Vec::new(); n];
        for (ci, c) in clauses.iter().enumerate() {
            for &p in c.ante.iter().chain(c.cons.iter()) {
                if watch[p].last() != Some(&ci) {
                    watch[p].push(ci);
                }
            }
        }
        HornCore { n, clauses, watch }
    }

    pub fn watching(&self, p: usize) -> &[usize] {
        &self.watch[p]
    }
}

/// A Horn sample with its points numbered in sorted order.
#[derive(Clone, Debug)]
pub struct IndexedHorn {
    pub points: Vec<DataPoint>,
    pub index: BTreeMap<DataPoint, usize>,
    pub core: HornCore,
}

impl IndexedHorn {
    pub fn new(hs: &HornSample) -> Self {
        Self::with_extra_points(hs, core::iter::empty())
    }

    pub fn with_extra_points<'a>(
        hs: &HornSample,
        extra: impl IntoIterator<Item = &'a DataPoint>,
    ) -> Self {
        let mut set = hs.points();
        set.extend(extra.into_iter().cloned());
        let points: Vec<DataPoint> = set.into_iter().collect();
        let index: BTreeMap<DataPoint, usize> =
            points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let clauses = hs
            .constraints
            .iter()
            .map(|c| {
                let ante: BTreeSet<usize> = c.antecedents.iter().map(|d| index[d]).collect();
                Clause {
                    ante: ante.into_iter().collect(),
                    cons: match &c.consequent {
                        Consequent::Point(d) => Some(index[d]),
                        Consequent::False => None,
                    },
                }
            })
            .collect();
        let core = HornCore::new(points.len(), clauses);
        IndexedHorn {
            points,
            index,
            core,
        }
    }
}

/// Labeling of data points; absent points are unknown.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialLabeling(pub BTreeMap<DataPoint, bool>);

impl PartialLabeling {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, d: &DataPoint) -> Option<bool> {
        self.0.get(d).copied()
    }

    pub fn set(&mut self, d: DataPoint, value: bool) {
        self.0.insert(d, value);
    }
}

/// Unsatisfiability certificate: indices of the clauses involved in the
/// derivation of the conflict. The listed clauses are unsatisfiable on their own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub clauses: Vec<usize>,
}

enum Step {
    Nothing,
    ForceTrue(usize),
    ForceFalse(usize),
    Conflict,
}

/// Incremental propagation state with an undo trail.
#[derive(Clone, Debug)]
pub struct Propagator<'a> {
    core: &'a HornCore,
    labels: Vec<Option<bool>>,
    reason: Vec<Option<usize>>,
    trail: Vec<usize>,
}

impl<'a> Propagator<'a> {
    pub fn new(core: &'a HornCore) -> Self {
        Propagator {
            core,
            labels: vec![None; core.n],
            reason: vec![None; core.n],
            trail: Vec::new(),
        }
    }

    pub fn label(&self, p: usize) -> Option<bool> {
        self.labels[p]
    }

    pub fn labels(&self) -> &[Option<bool>] {
        &self.labels
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let p = self.trail.pop().unwrap();
            self.labels[p] = None;
            self.reason[p] = None;
        }
    }

    /// Runs every clause once; call before any decision.
    pub fn propagate_all(&mut self) -> Result<(), Conflict> {
        let mut queue = Vec::new();
        for ci in 0..self.core.clauses.len() {
            self.apply(ci, &mut queue)?;
        }
        self.drain(queue)
    }

    /// Assigns `p := value` as a decision and propagates. On conflict the
    /// state is left as it was before the call.
    pub fn decide(&mut self, p: usize, value: bool) -> Result<(), Conflict> {
        let mark = self.mark();
        let r = match self.labels[p] {
            Some(v) if v == value => return Ok(()),
            Some(_) => Err(Conflict {
                clauses: self.explain_point(p),
            }),
            None => {
                self.set(p, value, None);
                self.drain(vec![p])
            }
        };
        if r.is_err() {
            self.undo_to(mark);
        }
        r
    }

    /// Tries a batch of decisions atomically.
    pub fn decide_all(&mut self, ps: &[usize], value: bool) -> Result<(), Conflict> {
        let mark = self.mark();
        for &p in ps {
            if let Err(c) = self.decide(p, value) {
                self.undo_to(mark);
                return Err(c);
            }
        }
        Ok(())
    }

    fn set(&mut self, p: usize, value: bool, reason: Option<usize>) {
        self.labels[p] = Some(value);
        self.reason[p] = reason;
        self.trail.push(p);
    }

    fn drain(&mut self, mut queue: Vec<usize>) -> Result<(), Conflict> {
        while let Some(p) = queue.pop() {
            for &ci in self.core.watching(p) {
                self.apply(ci, &mut queue)?;
            }
        }
        Ok(())
    }

    fn apply(&mut self, ci: usize, queue: &mut Vec<usize>) -> Result<(), Conflict> {
        match self.examine(ci) {
            Step::Nothing => Ok(()),
            Step::ForceTrue(p) => {
                self.set(p, true, Some(ci));
                queue.push(p);
                Ok(())
            }
            Step::ForceFalse(p) => {
                self.set(p, false, Some(ci));
                queue.push(p);
                Ok(())
            }
            Step::Conflict => Err(Conflict {
                clauses: self.explain_clause(ci),
            }),
        }
    }

    fn examine(&self, ci: usize) -> Step {
        let c = &self.core.clauses[ci];
        if c.is_tautology() {
            return Step::Nothing;
        }
        let mut unknown = None;
        let mut n_unknown = 0;
        for &a in &c.ante {
            match self.labels[a] {
                Some(false) => return Step::Nothing,
                Some(true) => {}
                None => {
                    n_unknown += 1;
                    unknown = Some(a);
                }
            }
        }
        let cons = match c.cons {
            None => Some(false),
            Some(q) => self.labels[q],
        };
        match (n_unknown, cons) {
            (0, Some(true)) => Step::Nothing,
            (0, Some(false)) => Step::Conflict,
            (0, None) => Step::ForceTrue(c.cons.unwrap()),
            (1, Some(false)) => Step::ForceFalse(unknown.unwrap()),
            _ => Step::Nothing,
        }
    }

    fn explain_clause(&self, ci: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![ci];
        while let Some(k) = stack.pop() {
            if !seen.insert(k) {
                continue;
            }
            let c = &self.core.clauses[k];
            for &p in c.ante.iter().chain(c.cons.iter()) {
                if let Some(r) = self.reason[p] {
                    if self.labels[p].is_some() && !seen.contains(&r) {
                        stack.push(r);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    fn explain_point(&self, p: usize) -> Vec<usize> {
        match self.reason[p] {
            Some(r) => self.explain_clause(r),
            None => Vec::new(),
        }
    }
}

/// Propagates `hs` from `seed`. Returns the closed labeling, or a conflict
/// when no labeling consistent with `hs` extends `seed`.
pub fn horn_propagate(hs: &HornSample, seed: &PartialLabeling) -> Result<PartialLabeling, Conflict> {
    let ih = IndexedHorn::with_extra_points(hs, seed.0.keys());
    let mut prop = Propagator::new(&ih.core);
    for (d, v) in &seed.0 {
        prop.decide(ih.index[d], *v)?;
    }
    prop.propagate_all()?;
    let mut out = PartialLabeling::new();
    for (i, l) in prop.labels().iter().enumerate() {
        if let Some(v) = l {
            out.set(ih.points[i].clone(), *v);
        }
    }
    Ok(out)
}

/// Projects a conflict certificate back onto the constraints of `hs`.
pub fn conflict_sample(hs: &HornSample, conflict: &Conflict) -> HornSample {
    HornSample::new(
        conflict
            .clauses
            .iter()
            .map(|&i| hs.constraints[i].clone())
            .collect(),
    )
}
