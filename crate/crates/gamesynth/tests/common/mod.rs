#![allow(dead_code)]

use std::path::PathBuf;

use gamesynth::{Hypothesis, Session, SolverConfig};
use gamesynth_core::parse::{parse_formula, parse_game, Scope};
use gamesynth_core::GameDef;

pub fn session() -> Session {
    Session::open(SolverConfig::from_env()).expect("solver available")
}

pub fn benchmark_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../benchmarks")
        .join(format!("{name}.game"))
}

pub fn benchmark(name: &str) -> GameDef {
    let text = std::fs::read_to_string(benchmark_path(name)).unwrap();
    parse_game(&text).unwrap()
}

pub fn game(text: &str) -> GameDef {
    parse_game(text).unwrap()
}

pub fn hyp(g: &GameDef, text: &str) -> Hypothesis {
    Hypothesis::from_formula(parse_formula(text, &Scope::state(&g.variables)).unwrap())
}

use gamesynth_core::explicit::ExplicitGame;
use gamesynth_core::{Player, Vertex};
use rand::Rng;

/// An `m`x`m` grid game with out-degree 1 to 3, parity ownership, mostly
/// safe vertices and a few initial ones.
pub fn random_explicit(rng: &mut impl Rng, m: i64) -> ExplicitGame {
    let mut eg = ExplicitGame::default();
    let cells: Vec<Vertex> = (0..m).flat_map(|x| (0..m).map(move |y| Vertex::new([x, y]))).collect();
    for v in &cells {
        let owner = if (v.0[0] + v.0[1]) % 2 == 0 { Player::P0 } else { Player::P1 };
        let deg = rng.gen_range(1..=3);
        let succ = (0..deg).map(|_| cells[rng.gen_range(0..cells.len())].clone()).collect();
        eg.vertices.insert(v.clone());
        eg.owner.insert(v.clone(), owner);
        eg.edges.insert(v.clone(), succ);
        if rng.gen_bool(0.8) {
            eg.safe.insert(v.clone());
        }
        if rng.gen_bool(0.2) {
            eg.init.insert(v.clone());
        }
    }
    if eg.init.is_empty() {
        eg.init.insert(cells[0].clone());
    }
    eg
}

pub fn xy_names() -> Vec<String> {
    vec!["x".to_string(), "y".to_string()]
}
