#![allow(dead_code)]

use std::collections::BTreeSet;

use gamesynth_core::explicit::ExplicitGame;
use gamesynth_core::formula::{CmpOp, Formula, Term, Var};
use gamesynth_core::learner::{
    DecisionTree, GameSample, HornConstraint, HornSample, Implication, Predicate, Sign,
};
use gamesynth_core::{Player, Vertex};
use proptest::prelude::*;

pub const VARS: [&str; 2] = ["x", "y"];

pub fn vars() -> Vec<String> {
    VARS.iter().map(|s| s.to_string()).collect()
}

pub fn point(range: i64) -> impl Strategy<Value = Vertex> {
    (-range..=range, -range..=range).prop_map(|(a, b)| Vertex::new(vec![a, b]))
}

fn implication(range: i64) -> impl Strategy<Value = Implication> {
    (point(range), prop::collection::vec(point(range), 1..4))
        .prop_map(|(l, r)| Implication::new(l, r))
}

pub fn game_sample(range: i64) -> impl Strategy<Value = GameSample> {
    (
        prop::collection::btree_set(point(range), 0..4),
        prop::collection::btree_set(point(range), 0..4),
        prop::collection::btree_set(implication(range), 0..4),
        prop::collection::btree_set(implication(range), 0..4),
    )
        .prop_map(|(pos, neg, ex, un)| GameSample { pos, neg, ex, un })
}

pub fn predicate(range: i64) -> impl Strategy<Value = Predicate> {
    prop_oneof![
        (0usize..2, -range..=range).prop_map(|(a, c)| Predicate::threshold(a, c)),
        (any::<bool>(), -2 * range..=2 * range).prop_map(|(plus, c)| {
            Predicate::octagonal(0, 1, if plus { Sign::Plus } else { Sign::Minus }, c)
        }),
    ]
}

pub fn tree(range: i64) -> impl Strategy<Value = DecisionTree> {
    any::<bool>()
        .prop_map(DecisionTree::Leaf)
        .prop_recursive(4, 16, 2, move |inner| {
            (predicate(range), inner.clone(), inner)
                .prop_map(|(p, l, r)| DecisionTree::node(p, l, r))
        })
}

/// Horn samples over 1-D points `0..n`.
pub fn horn_sample(n: i64, max_constraints: usize) -> impl Strategy<Value = HornSample> {
    let p = move || (0..n).prop_map(|x| Vertex::new(vec![x]));
    let constraint = (prop::collection::vec(p(), 0..3), prop::option::of(p())).prop_map(
        |(ante, cons)| match cons {
            Some(d) => HornConstraint::rule(ante, d),
            None if ante.is_empty() => HornConstraint::fact(Vertex::new(vec![0])),
            None => HornConstraint {
                antecedents: ante,
                consequent: gamesynth_core::learner::Consequent::False,
            },
        },
    );
    prop::collection::vec(constraint, 1..max_constraints).prop_map(HornSample::new)
}

/// Exhaustive search for a labeling of the sample's points satisfying it.
pub fn brute_force_sat(hs: &HornSample) -> bool {
    let pts: Vec<Vertex> = hs.points().into_iter().collect();
    assert!(pts.len() <= 16);
    (0u32..1 << pts.len()).any(|mask| {
        hs.is_satisfied_by(|d| {
            let i = pts.iter().position(|p| p == d).unwrap();
            mask & (1 << i) != 0
        })
    })
}

fn term(depth: u32) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        (-20i64..20).prop_map(Term::Const),
        (0usize..2, any::<bool>()).prop_map(|(i, primed)| {
            Term::Var(if primed { Var::next(VARS[i]) } else { Var::current(VARS[i]) })
        }),
    ];
    if depth == 0 {
        return leaf.boxed();
    }
    let sub = term(depth - 1);
    prop_oneof![
        2 => leaf,
        1 => prop::collection::vec(sub.clone(), 2..4).prop_map(Term::Add),
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Term::Sub(Box::new(a), Box::new(b))),
        1 => sub.clone().prop_map(|a| Term::Neg(Box::new(a))),
        1 => (-5i64..6, sub.clone()).prop_map(|(k, a)| Term::MulConst(k, Box::new(a))),
        1 => (sub.clone(), 1i64..7).prop_map(|(a, k)| Term::Mod(Box::new(a), k)),
        1 => (sub, 1i64..7).prop_map(|(a, k)| Term::Div(Box::new(a), k)),
    ]
    .boxed()
}

pub fn formula() -> impl Strategy<Value = Formula> {
    let cmp = prop_oneof![
        Just(CmpOp::Eq),
        Just(CmpOp::Le),
        Just(CmpOp::Lt),
        Just(CmpOp::Ge),
        Just(CmpOp::Gt)
    ];
    let atom = prop_oneof![
        1 => any::<bool>().prop_map(Formula::Bool),
        4 => (cmp, term(2), term(2)).prop_map(|(op, l, r)| Formula::Cmp(op, l, r)),
    ];
    atom.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
        ]
    })
}

/// Random games on an `m x m` grid of 2-D vertices, out-degree 1..=3,
/// ownership by coordinate parity.
pub fn explicit_game(max_side: i64) -> impl Strategy<Value = ExplicitGame> {
    (1..=max_side)
        .prop_flat_map(|m| {
            let n = (m * m) as usize;
            (
                Just(m),
                prop::collection::vec(prop::collection::vec(0..n, 1..=3), n),
                prop::collection::vec(prop::bool::weighted(0.8), n),
                prop::collection::vec(prop::bool::weighted(0.2), n),
            )
        })
        .prop_map(|(m, succ, safe, init)| {
            let at = |i: usize| Vertex::new(vec![i as i64 / m, i as i64 % m]);
            let mut eg = ExplicitGame::default();
            for (i, ss) in succ.iter().enumerate() {
                let v = at(i);
                let owner = if (v.0[0] + v.0[1]) % 2 == 0 { Player::P0 } else { Player::P1 };
                eg.vertices.insert(v.clone());
                eg.owner.insert(v.clone(), owner);
                eg.edges.insert(v.clone(), ss.iter().map(|&j| at(j)).collect());
                if safe[i] {
                    eg.safe.insert(v.clone());
                }
                if init[i] {
                    eg.init.insert(v);
                }
            }
            eg
        })
}

/// Closedness conditions of a winning set, ignoring the initial vertices.
pub fn closed(eg: &ExplicitGame, w: &BTreeSet<Vertex>) -> bool {
    w.is_subset(&eg.safe)
        && w.iter().all(|v| {
            let mut s = eg.edges[v].iter();
            match eg.owner[v] {
                Player::P0 => s.any(|x| w.contains(x)),
                Player::P1 => s.all(|x| w.contains(x)),
            }
        })
}
