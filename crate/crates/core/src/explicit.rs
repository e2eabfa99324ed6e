//! Finite safety games given by explicit adjacency, solved by fixed point.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::formula::{CmpOp, Formula, Term};
use crate::game::{GameDef, Player, Vertex};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplicitGame {
    pub vertices: BTreeSet<Vertex>,
    pub owner: BTreeMap<Vertex, Player>,
    pub edges: BTreeMap<Vertex, BTreeSet<Vertex>>,
    pub init: BTreeSet<Vertex>,
    pub safe: BTreeSet<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExplicitError {
    MissingOwner(Vertex),
    DanglingEdge(Vertex, Vertex),
    NotAVertex(Vertex),
}

impl fmt::Display for ExplicitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExplicitError::MissingOwner(v) => write!(f, "vertex {v} has no owner"),
            ExplicitError::DanglingEdge(v, w) => write!(f, "edge {v} -> {w} leaves the vertex set"),
            ExplicitError::NotAVertex(v) => write!(f, "{v} is not a vertex"),
        }
    }
}

impl core::error::Error for ExplicitError {}

impl ExplicitGame {
    pub fn successors(&self, v: &Vertex) -> impl Iterator<Item = &Vertex> {
        self.edges.get(v).into_iter().flatten()
    }

    pub fn owner_of(&self, v: &Vertex) -> Player {
        self.owner.get(v).copied().unwrap_or(Player::P1)
    }

    pub fn validate(&self) -> Result<(), ExplicitError> {
        for v in &self.vertices {
            if !self.owner.contains_key(v) {
                return Err(ExplicitError::MissingOwner(v.clone()));
            }
        }
        for (v, ws) in &self.edges {
            if !self.vertices.contains(v) {
                return Err(ExplicitError::NotAVertex(v.clone()));
            }
            if let Some(w) = ws.iter().find(|w| !self.vertices.contains(*w)) {
                return Err(ExplicitError::DanglingEdge(v.clone(), w.clone()));
            }
        }
        if let Some(v) = self
            .init
            .iter()
            .chain(&self.safe)
            .find(|v| !self.vertices.contains(*v))
        {
            return Err(ExplicitError::NotAVertex(v.clone()));
        }
        Ok(())
    }

    fn keeps(&self, v: &Vertex, w: &BTreeSet<Vertex>) -> bool {
        let mut succ = self.successors(v);
        match self.owner_of(v) {
            Player::P0 => succ.any(|s| w.contains(s)),
            Player::P1 => succ.all(|s| w.contains(s)),
        }
    }

    /// Encodes the game over integer variables `vars` (one per coordinate) as
    /// table-style disjunctions. Points outside the vertex set get a
    /// self-loop and are unsafe, so the symbolic game has the same winning
    /// region.
    pub fn to_game_def(&self, vars: &[String]) -> GameDef {
        let is = |v: &Vertex, primed: bool| {
            Formula::and(
                vars.iter()
                    .zip(v.coords())
                    .map(|(x, &c)| {
                        let t = if primed { Term::next(x) } else { Term::var(x) };
                        Formula::cmp(CmpOp::Eq, t, Term::Const(c))
                    })
                    .collect(),
            )
        };
        let table = |set: &mut dyn Iterator<Item = &Vertex>| Formula::or(set.map(|v| is(v, false)).collect());
        let in_game = table(&mut self.vertices.iter());
        let player0 = table(&mut self.vertices.iter().filter(|v| self.owner_of(v) == Player::P0));
        let mut moves: Vec<Formula> = self
            .edges
            .iter()
            .flat_map(|(v, ws)| ws.iter().map(move |w| (v, w)))
            .map(|(v, w)| Formula::and(alloc::vec![is(v, false), is(w, true)]))
            .collect();
        let stay = vars
            .iter()
            .map(|x| Formula::cmp(CmpOp::Eq, Term::next(x), Term::var(x)))
            .collect();
        moves.push(Formula::and(alloc::vec![Formula::not(in_game), Formula::and(stay)]));
        GameDef::new(
            vars.to_vec(),
            player0,
            table(&mut self.init.iter()),
            table(&mut self.safe.iter()),
            Formula::or(moves),
        )
    }

    /// Serializes in the adjacency text format read by [`parse_explicit`].
    pub fn to_text(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        for v in &self.vertices {
            let o = if self.owner_of(v) == Player::P0 { "P0" } else { "P1" };
            let _ = write!(out, "{o} {v} ->");
            for (i, w) in self.successors(v).enumerate() {
                let _ = write!(out, "{}{w}", if i == 0 { " " } else { "," });
            }
            out.push('\n');
        }
        for (name, set) in [("#init", &self.init), ("#safe", &self.safe)] {
            out.push_str(name);
            out.push('\n');
            for v in set {
                let _ = writeln!(out, "{v}");
            }
        }
        out
    }
}

/// Greatest subset of `safe` that is existentially closed on P0 vertices and
/// universally closed on P1 vertices. Worklist formulation, linear in the
/// number of edges.
pub fn fixpoint_solve(eg: &ExplicitGame) -> BTreeSet<Vertex> {
    let mut preds: BTreeMap<&Vertex, Vec<&Vertex>> = BTreeMap::new();
    for (v, ws) in &eg.edges {
        for w in ws {
            preds.entry(w).or_default().push(v);
        }
    }
    let mut alive: BTreeSet<&Vertex> = eg.safe.iter().collect();
    // P0 vertices: number of successors still alive
    let mut live_succ: BTreeMap<&Vertex, usize> = BTreeMap::new();
    let mut queue: Vec<&Vertex> = Vec::new();
    for v in &eg.safe {
        match eg.owner_of(v) {
            Player::P0 => {
                let n = eg.successors(v).filter(|s| alive.contains(s)).count();
                live_succ.insert(v, n);
                if n == 0 {
                    queue.push(v);
                }
            }
            Player::P1 => {
                if eg.successors(v).any(|s| !alive.contains(s)) {
                    queue.push(v);
                }
            }
        }
    }
    for v in &queue {
        alive.remove(v);
    }
    while let Some(w) = queue.pop() {
        for &v in preds.get(w).map(Vec::as_slice).unwrap_or(&[]) {
            if !alive.contains(v) {
                continue;
            }
            let dead = match eg.owner_of(v) {
                Player::P1 => true,
                Player::P0 => {
                    let n = live_succ.get_mut(v).unwrap();
                    *n -= 1;
                    *n == 0
                }
            };
            if dead {
                alive.remove(v);
                queue.push(v);
            }
        }
    }
    alive.into_iter().cloned().collect()
}

/// The round-by-round removal sequence `safe = W_0 ⊇ W_1 ⊇ ... ⊇ W_k`,
/// where each round drops every vertex violating its closedness condition
/// with respect to the previous set. The last entry is the fixed point.
pub fn fixpoint_rounds(eg: &ExplicitGame) -> Vec<BTreeSet<Vertex>> {
    let mut rounds = alloc::vec![eg.safe.clone()];
    loop {
        let w = rounds.last().unwrap();
        let next: BTreeSet<Vertex> = w.iter().filter(|v| eg.keeps(v, w)).cloned().collect();
        if next.len() == w.len() {
            return rounds;
        }
        rounds.push(next);
    }
}

/// Extensional winning-set check.
pub fn check_winning_set_explicit(eg: &ExplicitGame, w: &BTreeSet<Vertex>) -> bool {
    eg.init.is_subset(w) && w.is_subset(&eg.safe) && w.iter().all(|v| eg.keeps(v, w))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ExplicitParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for ExplicitParseError {}

fn perr(line: usize, message: impl Into<String>) -> ExplicitParseError {
    ExplicitParseError {
        line,
        message: message.into(),
    }
}

/// Parses `(a,b,...)` tuples separated by commas and/or whitespace.
fn parse_vertices(s: &str) -> Result<Vec<Vertex>, &'static str> {
    let mut out = Vec::new();
    let mut rest = s.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or("expected '('")?;
        let close = body.find(')').ok_or("unclosed '('")?;
        let coords = body[..close]
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|_| "bad coordinate"))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(Vertex::new(coords));
        rest = body[close + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    Ok(out)
}

/// Reads the adjacency format: `P0 (0,0) -> (1,0),(0,1)` lines, optionally
/// under an `#edges` header, then `#init` and `#safe` sections listing
/// vertices. `;` starts a comment. Every edge target must itself have a line.
pub fn parse_explicit(text: &str) -> Result<ExplicitGame, ExplicitParseError> {
    #[derive(PartialEq)]
    enum Section {
        Edges,
        Init,
        Safe,
    }
    let mut eg = ExplicitGame::default();
    let mut section = Section::Edges;
    let mut arity = None;
    let mut targets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split(';').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "#edges" => {
                section = Section::Edges;
                continue;
            }
            "#init" => {
                section = Section::Init;
                continue;
            }
            "#safe" => {
                section = Section::Safe;
                continue;
            }
            _ if line.starts_with('#') => return Err(perr(ln, "unknown section")),
            _ => {}
        }
        let mut check_arity = |vs: &[Vertex]| {
            for v in vs {
                match arity {
                    None => arity = Some(v.arity()),
                    Some(n) if n != v.arity() => return Err(perr(ln, "vertex arity mismatch")),
                    _ => {}
                }
            }
            Ok(())
        };
        match section {
            Section::Edges => {
                let (owner, rest) = line.split_once(char::is_whitespace).ok_or_else(|| perr(ln, "expected owner"))?;
                let owner = match owner {
                    "P0" => Player::P0,
                    "P1" => Player::P1,
                    _ => return Err(perr(ln, "owner must be P0 or P1")),
                };
                let (src, dst) = rest.split_once("->").ok_or_else(|| perr(ln, "expected '->'"))?;
                let src = parse_vertices(src).map_err(|m| perr(ln, m))?;
                let [v] = <[Vertex; 1]>::try_from(src).map_err(|_| perr(ln, "expected one source vertex"))?;
                let succ = parse_vertices(dst).map_err(|m| perr(ln, m))?;
                check_arity(core::slice::from_ref(&v))?;
                check_arity(&succ)?;
                if !eg.vertices.insert(v.clone()) {
                    return Err(perr(ln, "duplicate vertex line"));
                }
                eg.owner.insert(v.clone(), owner);
                targets.extend(succ.iter().map(|w| (ln, w.clone())));
                eg.edges.insert(v, succ.into_iter().collect());
            }
            Section::Init | Section::Safe => {
                let vs = parse_vertices(line).map_err(|m| perr(ln, m))?;
                check_arity(&vs)?;
                let set = if section == Section::Init { &mut eg.init } else { &mut eg.safe };
                set.extend(vs);
            }
        }
    }
    for (ln, w) in targets {
        if !eg.vertices.contains(&w) {
            return Err(perr(ln, alloc::format!("edge target {w} is not declared")));
        }
    }
    eg.validate().map_err(|e| perr(0, alloc::format!("{e}")))?;
    Ok(eg)
}
