mod common;

use gamesynth::game::{successors, validate, Check};
use gamesynth::Error;
use gamesynth_core::game::GameWarning;
use gamesynth_core::Vertex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn v(c: &[i64]) -> Vertex {
    Vertex::new(c.to_vec())
}

#[test]
fn box1d_successors() {
    let g = common::benchmark("box1d");
    let mut s = common::session();
    assert_eq!(successors(&g, &v(&[0, 0]), &mut s, 64).unwrap(), vec![v(&[-1, 1]), v(&[1, 1])]);
    assert_eq!(successors(&g, &v(&[5, 1]), &mut s, 64).unwrap(), vec![v(&[4, 0]), v(&[6, 0])]);
}

#[test]
fn king_moves_give_nine_successors() {
    let g = common::benchmark("solitary_box");
    let mut s = common::session();
    let succ = successors(&g, &v(&[0, 1]), &mut s, 64).unwrap();
    assert_eq!(succ.len(), 9);
    assert!(succ.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn branching_cap_is_reported() {
    let g = common::game(
        "(game (vars (x Int)) (player0 true) (init (= x 0)) (safe true) (edges (and (>= x' x) (<= x' (+ x 10)))))",
    );
    let mut s = common::session();
    assert_eq!(successors(&g, &v(&[0]), &mut s, 11).unwrap().len(), 11);
    assert!(matches!(
        successors(&g, &v(&[0]), &mut s, 10),
        Err(Error::BranchingExceeded { cap: 10, .. })
    ));
}

#[test]
fn benchmarks_are_well_formed() {
    let mut s = common::session();
    for name in [
        "box1d", "drift", "box", "box_limited", "diagonal", "evasion", "follow", "solitary_box", "square",
        "cinderella_c2", "cinderella_c3",
    ] {
        let g = common::benchmark(name);
        let wf = validate(&g, &mut s).unwrap();
        assert!(wf.errors().is_empty(), "{name}: {:?}", wf.errors());
        assert_eq!(wf.init_nonempty, Check::Holds, "{name}");
        // the stepmother's split is quantified over five buckets; z3 gives up on it
        if name.starts_with("cinderella") {
            assert!(!matches!(wf.totality, Check::Violated(_)), "{name}");
        } else {
            assert_eq!(wf.totality, Check::Holds, "{name}");
        }
    }
}

#[test]
fn ill_formed_games_are_rejected() {
    let mut s = common::session();
    let empty_init = common::game(
        "(game (vars (x Int)) (player0 true) (init (and (= x 0) (= x 1))) (safe true) (edges (= x' x)))",
    );
    let wf = validate(&empty_init, &mut s).unwrap();
    assert_eq!(wf.init_nonempty, Check::Violated(None));
    assert_eq!(wf.errors(), vec!["initial set is empty".to_string()]);

    let stuck = common::game(
        "(game (vars (x Int)) (player0 true) (init (= x 0)) (safe true) (edges (and (< x 5) (= x' (+ x 1)))))",
    );
    let wf = validate(&stuck, &mut s).unwrap();
    let Check::Violated(Some(w)) = &wf.totality else { panic!("{:?}", wf.totality) };
    assert!(w.0[0] >= 5);

    let blind = common::game("(game (vars (x Int)) (player0 true) (init (= x 0)) (safe true) (edges (>= x 0)))");
    let wf = validate(&blind, &mut s).unwrap();
    assert!(wf.warnings.contains(&GameWarning::EdgesIgnoreSuccessor));
    assert!(!wf.errors().is_empty());
}

#[test]
fn successors_match_explicit_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut s = common::session();
    for _ in 0..20 {
        let m = 4;
        let eg = common::random_explicit(&mut rng, m);
        let g = eg.to_game_def(&common::xy_names());
        for v in &eg.vertices {
            let want: Vec<Vertex> = eg.successors(v).cloned().collect();
            assert_eq!(successors(&g, v, &mut s, 64).unwrap(), want, "{v}");
        }
        // outside the grid: a self-loop
        assert_eq!(successors(&g, &Vertex::new([m, 0]), &mut s, 64).unwrap(), vec![Vertex::new([m, 0])]);
    }
}
