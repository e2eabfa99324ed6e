//! Grounding symbolic games to finite boxes, and play simulation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use gamesynth_core::explicit::ExplicitGame;
use gamesynth_core::{GameDef, Player, Vertex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::successors;
use crate::solver::Session;
use crate::teacher::{choose_successor, Hypothesis};

/// Per-variable inclusive integer intervals, in the game's variable order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds(pub Vec<(i64, i64)>);

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("malformed bound `{0}` (expected name=lo..hi)")]
    Malformed(String),
    #[error("empty interval for `{0}`")]
    Inverted(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no bound given for `{0}`")]
    Missing(String),
    #[error("box has too many vertices")]
    TooLarge,
}

/// Upper limit on the number of lattice points of a box.
pub const MAX_BOX_VERTICES: u64 = 1_000_000;

impl Bounds {
    /// Parses `x=-5..8,y=0..1` against the game's variables.
    pub fn parse(text: &str, vars: &[String]) -> Result<Bounds, BoundsError> {
        let mut found: Vec<Option<(i64, i64)>> = vec![None; vars.len()];
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || BoundsError::Malformed(part.to_string());
            let (name, range) = part.split_once('=').ok_or_else(bad)?;
            let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
            let lo = i64::from_str(lo.trim()).map_err(|_| bad())?;
            let hi = i64::from_str(hi.trim()).map_err(|_| bad())?;
            let name = name.trim();
            let idx = vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| BoundsError::UnknownVariable(name.to_string()))?;
            if lo > hi {
                return Err(BoundsError::Inverted(name.to_string()));
            }
            found[idx] = Some((lo, hi));
        }
        let b = found
            .into_iter()
            .zip(vars)
            .map(|(f, v)| f.ok_or_else(|| BoundsError::Missing(v.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let size = b
            .iter()
            .try_fold(1u64, |acc, (lo, hi)| acc.checked_mul(hi.abs_diff(*lo) + 1));
        match size {
            Some(n) if n <= MAX_BOX_VERTICES => Ok(Bounds(b)),
            _ => Err(BoundsError::TooLarge),
        }
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        v.coords().iter().zip(&self.0).all(|(c, (lo, hi))| lo <= c && c <= hi)
    }

    /// All lattice points, lexicographically.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = vec![Vec::new()];
        for &(lo, hi) in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (lo..=hi).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(Vertex).collect()
    }
}

/// Restricts `g` to the box: successors are intersected with it, and a
/// vertex left without successors is dropped from the safe set.
pub fn truncate(g: &GameDef, bounds: &Bounds, s: &mut Session, cap: usize) -> Result<ExplicitGame> {
    let mut eg = ExplicitGame::default();
    for v in bounds.vertices() {
        let succ: std::collections::BTreeSet<Vertex> = successors(g, &v, s, cap)?
            .into_iter()
            .filter(|w| bounds.contains(w))
            .collect();
        eg.owner.insert(v.clone(), g.owner(&v)?);
        if g.is_init(&v)? {
            eg.init.insert(v.clone());
        }
        if g.is_safe(&v)? && !succ.is_empty() {
            eg.safe.insert(v.clone());
        }
        eg.edges.insert(v.clone(), succ);
        eg.vertices.insert(v);
    }
    Ok(eg)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayTrace {
    pub vertices: Vec<Vertex>,
    pub safe_throughout: bool,
}

impl fmt::Display for PlayTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub enum Adversary {
    Random(Box<ChaCha8Rng>),
    /// Player-1 moves in order.
    Scripted(Vec<Vertex>),
}

impl Adversary {
    pub fn random(seed: u64) -> Self {
        Adversary::Random(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }
}

/// Plays the controller derived from a winning set against an adversary,
/// caching successor sets across plays.
pub struct Simulator<'g> {
    game: &'g GameDef,
    w: &'g Hypothesis,
    cap: usize,
    cache: HashMap<Vertex, Vec<Vertex>>,
}

impl<'g> Simulator<'g> {
    pub fn new(game: &'g GameDef, w: &'g Hypothesis, cap: usize) -> Self {
        Simulator {
            game,
            w,
            cap,
            cache: HashMap::new(),
        }
    }

    fn succ(&mut self, v: &Vertex, s: &mut Session) -> Result<Vec<Vertex>> {
        if let Some(ss) = self.cache.get(v) {
            return Ok(ss.clone());
        }
        let ss = successors(self.game, v, s, self.cap)?;
        self.cache.insert(v.clone(), ss.clone());
        Ok(ss)
    }

    pub fn run(&mut self, v0: &Vertex, steps: usize, adversary: &mut Adversary, s: &mut Session) -> Result<PlayTrace> {
        let g = self.game;
        let mut safe = g.is_safe(v0)?;
        let mut trace = vec![v0.clone()];
        let mut scripted = 0;
        let mut v = v0.clone();
        for _ in 0..steps {
            let succs = self.succ(&v, s)?;
            if succs.is_empty() {
                return Err(Error::DeadEnd(v));
            }
            let next = match g.owner(&v)? {
                Player::P0 => choose_successor(g, self.w, &v, &succs)?,
                Player::P1 => match adversary {
                    Adversary::Random(rng) => succs.choose(&mut **rng).unwrap().clone(),
                    Adversary::Scripted(moves) => {
                        let m = moves.get(scripted).ok_or(Error::ScriptExhausted(scripted))?.clone();
                        scripted += 1;
                        if !succs.contains(&m) {
                            return Err(Error::IllegalMove { from: v, to: m });
                        }
                        m
                    }
                },
            };
            safe &= g.is_safe(&next)?;
            trace.push(next.clone());
            v = next;
        }
        Ok(PlayTrace {
            vertices: trace,
            safe_throughout: safe,
        })
    }
}

pub fn simulate(
    g: &GameDef,
    w: &Hypothesis,
    v0: &Vertex,
    steps: usize,
    adversary: &mut Adversary,
    s: &mut Session,
    cap: usize,
) -> Result<PlayTrace> {
    Simulator::new(g, w, cap).run(v0, steps, adversary, s)
}
