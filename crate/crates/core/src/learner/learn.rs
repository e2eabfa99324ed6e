//! Learning decision trees consistent with Horn samples.
//!
//! The tree is grown top-down while a Horn propagator keeps a closed,
//! conflict-free partial labeling of the sample points. A node becomes a
//! leaf as soon as its points can all take one label without conflict;
//! otherwise it is split on the pool predicate with the highest information
//! gain. Labeling unknown points `false` can never cause a conflict (see
//! [`super::horn`]), and a node holding a single point always becomes a
//! leaf, so construction only fails when the pool cannot separate two
//! distinct points.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::horn::{Clause, Conflict, HornCore, IndexedHorn, Propagator};
use super::predicate::{Axis, Predicate};
use super::sample::HornSample;
use super::tree::{consistent_with_horn, DecisionTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LearnOutcome {
    Tree(DecisionTree),
    /// The pool cannot express a consistent tree.
    NoTree,
    /// The Horn sample itself is unsatisfiable.
    Unsatisfiable(Conflict),
}

const GAIN_EPS: f64 = 1e-9;

pub fn learn_horn_tree(hs: &HornSample, pool: &[Predicate]) -> LearnOutcome {
    let ih = IndexedHorn::new(hs);
    let mut prop = Propagator::new(&ih.core);
    if let Err(c) = prop.propagate_all() {
        return LearnOutcome::Unsatisfiable(c);
    }
    let arity = ih.points.first().map_or(0, |p| p.arity());
    let mut axes: BTreeMap<Axis, Vec<i64>> = BTreeMap::new();
    for p in pool {
        if p.max_index() < arity {
            axes.entry(p.axis()).or_default().push(p.constant());
        }
    }
    for cs in axes.values_mut() {
        cs.sort_unstable();
        cs.dedup();
    }
    let mut b = Builder {
        ih: &ih,
        prop,
        axes,
        in_node: vec![false; ih.points.len()],
    };
    let all: Vec<usize> = (0..ih.points.len()).collect();
    match b.build(all) {
        Some(t) if consistent_with_horn(&t, hs) => LearnOutcome::Tree(t),
        _ => LearnOutcome::NoTree,
    }
}

struct Builder<'a> {
    ih: &'a IndexedHorn,
    prop: Propagator<'a>,
    axes: BTreeMap<Axis, Vec<i64>>,
    in_node: Vec<bool>,
}

struct Candidate {
    pred: Predicate,
    gain: f64,
}

fn entropy(t: usize, f: usize) -> f64 {
    if t == 0 || f == 0 {
        return 0.0;
    }
    let n = (t + f) as f64;
    let (pt, pf) = (t as f64 / n, f as f64 / n);
    -(pt * libm::log2(pt) + pf * libm::log2(pf))
}

fn gain(parent: (usize, usize), left: (usize, usize)) -> f64 {
    let right = (parent.0 - left.0, parent.1 - left.1);
    let n = (parent.0 + parent.1) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let nl = (left.0 + left.1) as f64;
    let nr = (right.0 + right.1) as f64;
    entropy(parent.0, parent.1) - (nl / n) * entropy(left.0, left.1) - (nr / n) * entropy(right.0, right.1)
}

impl Builder<'_> {
    fn build(&mut self, pts: Vec<usize>) -> Option<DecisionTree> {
        let mut has_true = false;
        let mut has_false = false;
        let mut unknown = Vec::new();
        for &p in &pts {
            match self.prop.label(p) {
                Some(true) => has_true = true,
                Some(false) => has_false = true,
                None => unknown.push(p),
            }
        }
        // `true` first: unconstrained regions stay outside the complement's set
        let attempts: &[bool] = match (has_true, has_false) {
            (false, false) => &[true, false],
            (true, false) => &[true],
            (false, true) => &[false],
            (true, true) => &[],
        };
        for &label in attempts {
            if self.prop.decide_all(&unknown, label).is_ok() {
                return Some(DecisionTree::Leaf(label));
            }
        }

        let scoring = if has_true && has_false {
            pts.iter().map(|&p| self.prop.label(p)).collect()
        } else {
            self.tentative_labels(&pts, &unknown)
        };
        let pred = self.choose_split(&pts, &scoring)?;
        let (left, right): (Vec<usize>, Vec<usize>) = pts
            .iter()
            .partition(|&&p| pred.holds(&self.ih.points[p]));
        let l = self.build(left)?;
        let r = self.build(right)?;
        Some(DecisionTree::node(pred, l, r))
    }

    /// Greedy consistent completion over the node's unknown points, preferring
    /// `true`; used to score splits when the known labels are all alike.
    fn tentative_labels(&mut self, pts: &[usize], unknown: &[usize]) -> Vec<Option<bool>> {
        let mark = self.prop.mark();
        for &u in unknown {
            if self.prop.label(u).is_none() && self.prop.decide(u, true).is_err() {
                let _ = self.prop.decide(u, false);
            }
        }
        let out = pts.iter().map(|&p| self.prop.label(p)).collect();
        self.prop.undo_to(mark);
        out
    }

    fn choose_split(&mut self, pts: &[usize], labels: &[Option<bool>]) -> Option<Predicate> {
        let parent = labels.iter().fold((0, 0), |(t, f), l| match l {
            Some(true) => (t + 1, f),
            Some(false) => (t, f + 1),
            None => (t, f),
        });
        let mut best: Vec<Candidate> = Vec::new();
        let mut best_gain = f64::NEG_INFINITY;

        for (&axis, constants) in &self.axes {
            let mut vals: Vec<(i64, Option<bool>)> = pts
                .iter()
                .zip(labels)
                .map(|(&p, &l)| (axis.value(&self.ih.points[p]), l))
                .collect();
            vals.sort_unstable_by_key(|v| v.0);
            let mut left = (0usize, 0usize);
            for k in 1..vals.len() {
                match vals[k - 1].1 {
                    Some(true) => left.0 += 1,
                    Some(false) => left.1 += 1,
                    None => {}
                }
                let (a, b) = (vals[k - 1].0, vals[k].0);
                if a == b {
                    continue;
                }
                // pool constants that induce this partition
                let lo = constants.partition_point(|&c| c < a);
                let hi = constants.partition_point(|&c| c < b);
                if lo == hi {
                    continue;
                }
                // tightest threshold on the left side
                let c = constants[lo];
                let g = gain(parent, left);
                let pred = match axis {
                    Axis::Attr(attr) => Predicate::threshold(attr, c),
                    Axis::Oct(i, j, sign) => Predicate::octagonal(i, j, sign, c),
                };
                if g > best_gain + GAIN_EPS {
                    best_gain = g;
                    best.clear();
                    best.push(Candidate { pred, gain: g });
                } else if g > best_gain - GAIN_EPS {
                    best.push(Candidate { pred, gain: g });
                }
            }
        }
        if best.len() <= 1 {
            return best.pop().map(|c| c.pred);
        }
        debug_assert!(best.iter().all(|c| (c.gain - best_gain).abs() < 2.0 * GAIN_EPS));

        for &p in pts {
            self.in_node[p] = true;
        }
        let clauses = self.touching_clauses(pts);
        let choice = best
            .iter()
            .map(|c| (self.horn_cuts(&c.pred, &clauses), c.pred))
            .min()
            .map(|(_, p)| p);
        for &p in pts {
            self.in_node[p] = false;
        }
        choice
    }

    fn touching_clauses(&self, pts: &[usize]) -> Vec<usize> {
        let mut cs: Vec<usize> = pts
            .iter()
            .flat_map(|&p| self.ih.core.watching(p).iter().copied())
            .collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }

    /// Clauses with node points on both sides of the split.
    fn horn_cuts(&self, pred: &Predicate, clauses: &[usize]) -> usize {
        clauses
            .iter()
            .filter(|&&ci| {
                let c = &self.ih.core.clauses[ci];
                let mut sides = c
                    .ante
                    .iter()
                    .chain(c.cons.iter())
                    .filter(|&&p| self.in_node[p])
                    .map(|&p| pred.holds(&self.ih.points[p]));
                match sides.next() {
                    Some(first) => sides.any(|s| s != first),
                    None => false,
                }
            })
            .count()
    }
}

/// Finds leaf labels for a fixed tree structure so that the tree is consistent
/// with `hs`, or `None` if no labeling of its leaves is. Leaves default to
/// `true` where the constraints allow it.
pub fn label_leaves(structure: &DecisionTree, hs: &HornSample) -> Option<DecisionTree> {
    let ih = IndexedHorn::new(hs);
    let n_leaves = structure.leaves();
    let leaf_of: Vec<usize> = ih.points.iter().map(|d| structure.leaf_index(d)).collect();
    let clauses = ih
        .core
        .clauses
        .iter()
        .map(|c| {
            let mut ante: Vec<usize> = c.ante.iter().map(|&p| leaf_of[p]).collect();
            ante.sort_unstable();
            ante.dedup();
            Clause {
                ante,
                cons: c.cons.map(|p| leaf_of[p]),
            }
        })
        .collect();
    let core = HornCore::new(n_leaves, clauses);
    let mut prop = Propagator::new(&core);
    prop.propagate_all().ok()?;
    for leaf in 0..n_leaves {
        if prop.label(leaf).is_none() && prop.decide(leaf, true).is_err() {
            prop.decide(leaf, false).ok()?;
        }
    }
    let labels: Vec<bool> = prop.labels().iter().map(|l| l.unwrap_or(true)).collect();
    Some(structure.relabel(&labels))
}
