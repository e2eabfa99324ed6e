//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use gamesynth::cegis::witness_replays;
use gamesynth::oracle::{Adversary, Simulator};
use gamesynth::{check_hypothesis, solve, CegisConfig, CegisResult, Hypothesis, Verdict};
use gamesynth_core::explicit::{check_winning_set_explicit, fixpoint_solve};
use gamesynth_core::learner::{
    consistent_with_game, consistent_with_horn, game_to_horn, generate_predicates, horn_propagate,
    learn_horn_tree, Consequent, DecisionTree, GameSample, HornConstraint, HornSample, Implication,
    LearnOutcome, PartialLabeling, Predicate, Sign,
};
use gamesynth_core::{GameDef, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Motion-planning games with their reference iteration counts and tree sizes.
const SUITE: &[(&str, usize, usize)] = &[
    ("box", 9, 5),
    ("box_limited", 4, 2),
    ("diagonal", 23, 5),
    ("evasion", 6, 3),
    ("follow", 11, 5),
    ("solitary_box", 4, 2),
    ("square", 61, 12),
];

const BENCH_TIMEOUT: Duration = Duration::from_secs(900);
const CINDERELLA_BUDGET: Duration = Duration::from_secs(30);

fn reverify(g: &GameDef, tree: &DecisionTree) -> Result<(), String> {
    let h = Hypothesis::from_tree(tree.clone(), &g.variables);
    match check_hypothesis(g, &h, &mut common::session(), 64) {
        Ok(Verdict::Yes) => Ok(()),
        Ok(Verdict::No(c)) => Err(format!("re-check found {c}")),
        Err(e) => Err(format!("re-check failed: {e}")),
    }
}

fn robot_example(solved: &mut Vec<(GameDef, DecisionTree)>) -> Outcome {
    let g = common::benchmark("box1d");
    let start = Instant::now();
    let r = solve(&g, &CegisConfig::default());
    let took = start.elapsed();
    let CegisResult::Solved { tree, stats, .. } = &r else {
        return Err(format!("outcome {}", r.outcome()));
    };
    if stats.iterations > 50 || took >= Duration::from_secs(10) {
        return Err(format!("{} iterations in {took:?}", stats.iterations));
    }
    reverify(&g, tree)?;
    if !tree.eval(&Vertex::new([0, 0])) {
        return Err("(0,0) not in the winning set".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let v = Vertex::new([rng.gen_range(-1_000_000..0), rng.gen_range(0..=1)]);
        if tree.eval(&v) {
            return Err(format!("{v} is in the winning set"));
        }
    }
    let detail = format!("{} iterations, {:.2?}, tree size {}", stats.iterations, took, stats.tree_size);
    solved.push((g.clone(), tree.clone()));
    Ok(detail)
}

fn benchmark_suite(solved: &mut Vec<(GameDef, DecisionTree)>) -> Outcome {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for &(name, ref_iters, ref_size) in SUITE {
        let g = common::benchmark(name);
        let cfg = CegisConfig {
            budget: Some(BENCH_TIMEOUT),
            ..CegisConfig::default()
        };
        let start = Instant::now();
        let r = solve(&g, &cfg);
        let took = start.elapsed();
        let st = r.stats();
        let size_note = if st.tree_size <= 4 * ref_size { "" } else { " (size above 4x)" };
        lines.push(format!(
            "{name}: {} {} it (limit {}), size {} (ref {ref_size}){size_note}, {:.2?}",
            r.outcome(),
            st.iterations,
            10 * ref_iters,
            st.tree_size,
            took
        ));
        match &r {
            CegisResult::Solved { tree, .. } if st.iterations <= 10 * ref_iters && took <= BENCH_TIMEOUT => {
                match reverify(&g, tree) {
                    Ok(()) => solved.push((g.clone(), tree.clone())),
                    Err(e) => failures.push(format!("{name}: {e}")),
                }
            }
            _ => failures.push(name.to_string()),
        }
    }
    for name in ["cinderella_c2", "cinderella_c3"] {
        let g = common::benchmark(name);
        let cfg = CegisConfig {
            budget: Some(CINDERELLA_BUDGET),
            succ_cap: 2048,
            ..CegisConfig::default()
        };
        let r = solve(&g, &cfg);
        lines.push(format!("{name}: {} after {} it", r.outcome(), r.stats().iterations));
        match &r {
            CegisResult::Exhausted { .. } => {}
            CegisResult::Solved { tree, .. } => {
                if let Err(e) = reverify(&g, tree) {
                    failures.push(format!("{name}: {e}"));
                }
            }
            _ => failures.push(name.to_string()),
        }
    }
    let detail = lines.join("\n       ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("failing: {}\n       {detail}", failures.join(", ")))
    }
}

fn random_point(rng: &mut impl Rng, range: i64) -> Vertex {
    Vertex::new([rng.gen_range(-range..=range), rng.gen_range(-range..=range)])
}

fn random_sample(rng: &mut impl Rng, range: i64) -> GameSample {
    let mut sg = GameSample::new();
    for _ in 0..rng.gen_range(0..4) {
        sg.pos.insert(random_point(rng, range));
    }
    for _ in 0..rng.gen_range(0..4) {
        sg.neg.insert(random_point(rng, range));
    }
    for _ in 0..rng.gen_range(0..4) {
        let rhs: Vec<Vertex> = (0..rng.gen_range(1..4)).map(|_| random_point(rng, range)).collect();
        sg.ex.insert(Implication::new(random_point(rng, range), rhs));
    }
    for _ in 0..rng.gen_range(0..4) {
        let rhs: Vec<Vertex> = (0..rng.gen_range(1..4)).map(|_| random_point(rng, range)).collect();
        sg.un.insert(Implication::new(random_point(rng, range), rhs));
    }
    sg
}

fn random_tree(rng: &mut impl Rng, range: i64, depth: usize) -> DecisionTree {
    if depth == 0 || rng.gen_bool(0.3) {
        return DecisionTree::Leaf(rng.gen_bool(0.5));
    }
    let c = rng.gen_range(-range..=range);
    let p = match rng.gen_range(0..3) {
        0 => Predicate::threshold(0, c),
        1 => Predicate::threshold(1, c),
        _ => Predicate::octagonal(0, 1, if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus }, 2 * c),
    };
    DecisionTree::node(p, random_tree(rng, range, depth - 1), random_tree(rng, range, depth - 1))
}

fn flip_duality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut agree_true = 0;
    for i in 0..1000 {
        let sg = random_sample(&mut rng, 3);
        let t = random_tree(&mut rng, 3, 4);
        let lhs = consistent_with_horn(&t, &game_to_horn(&sg));
        let rhs = consistent_with_game(&t.flip_leaves(), &sg);
        if lhs != rhs {
            return Err(format!("pair {i} disagrees"));
        }
        agree_true += lhs as usize;
    }
    let took = start.elapsed();
    if took >= Duration::from_secs(30) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("1000 pairs agree ({agree_true} consistent), {took:.2?}"))
}

fn random_horn(rng: &mut impl Rng, points: &[Vertex]) -> HornSample {
    let pick = |rng: &mut dyn rand::RngCore| points[rng.gen_range(0..points.len())].clone();
    let n = rng.gen_range(1..12);
    let cs = (0..n)
        .map(|_| {
            let ante: Vec<Vertex> = (0..rng.gen_range(0..3)).map(|_| pick(rng)).collect();
            if rng.gen_bool(0.25) && !ante.is_empty() {
                HornConstraint {
                    antecedents: ante,
                    consequent: Consequent::False,
                }
            } else {
                HornConstraint::rule(ante, pick(rng))
            }
        })
        .collect();
    HornSample::new(cs)
}

fn brute_force_sat(hs: &HornSample) -> bool {
    let pts: Vec<Vertex> = hs.points().into_iter().collect();
    (0u32..1 << pts.len()).any(|mask| {
        hs.is_satisfied_by(|d| mask & (1 << pts.iter().position(|p| p == d).unwrap()) != 0)
    })
}

fn point_pool(rng: &mut impl Rng, n: usize) -> Vec<Vertex> {
    let mut set = BTreeSet::new();
    while set.len() < n {
        set.insert(random_point(rng, 4));
    }
    set.into_iter().collect()
}

fn horn_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut unsat = 0;
    for i in 0..500 {
        let n = rng.gen_range(1..=10);
        let pts = point_pool(&mut rng, n);
        let hs = random_horn(&mut rng, &pts);
        let conflict = horn_propagate(&hs, &PartialLabeling::new()).is_err();
        if conflict == brute_force_sat(&hs) {
            return Err(format!("sample {i}: propagation conflict = {conflict}"));
        }
        unsat += conflict as usize;
    }
    Ok(format!("500 samples agree ({unsat} unsatisfiable)"))
}

fn learner_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    let mut sizes = 0;
    while done < 500 {
        let n = rng.gen_range(1..=10);
        let pts = point_pool(&mut rng, n);
        let hs = random_horn(&mut rng, &pts);
        if !brute_force_sat(&hs) {
            continue;
        }
        let pool = generate_predicates(&hs.points(), true);
        match learn_horn_tree(&hs, &pool) {
            LearnOutcome::Tree(t) if consistent_with_horn(&t, &hs) => sizes += t.leaves(),
            LearnOutcome::Tree(_) => return Err(format!("inconsistent tree on sample {done}")),
            LearnOutcome::Unsatisfiable(_) => return Err(format!("unsatisfiable on sample {done}")),
            LearnOutcome::NoTree => return Err(format!("no tree on sample {done}")),
        }
        done += 1;
    }
    Ok(format!("500 satisfiable samples, mean tree size {:.2}", sizes as f64 / 500.0))
}

fn finite_games() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut won, mut lost) = (0, 0);
    let start = Instant::now();
    for i in 0..100 {
        let m = rng.gen_range(2..=14);
        let mut eg = common::random_explicit(&mut rng, m);
        let region: Vec<Vertex> = fixpoint_solve(&eg).into_iter().collect();
        // most random games are lost; start every other one inside the region
        if i % 2 == 0 && !region.is_empty() {
            eg.init = BTreeSet::from([region[rng.gen_range(0..region.len())].clone()]);
        }
        let g = eg.to_game_def(&common::xy_names());
        let wins = eg.init.iter().all(|v| region.contains(v));
        let cfg = CegisConfig {
            max_iterations: 20_000,
            ..CegisConfig::default()
        };
        let r = solve(&g, &cfg);
        match (&r, wins) {
            (CegisResult::Solved { tree, .. }, true) => {
                let w: BTreeSet<Vertex> = eg.vertices.iter().filter(|v| tree.eval(v)).cloned().collect();
                if !check_winning_set_explicit(&eg, &w) {
                    return Err(format!("game {i}: learned set is not winning\n{}", eg.to_text()));
                }
                won += 1;
            }
            (CegisResult::Solved { .. }, false) => {
                return Err(format!("game {i}: solved a lost game\n{}", eg.to_text()));
            }
            (CegisResult::Unrealizable { .. } | CegisResult::Exhausted { .. }, false) => lost += 1,
            (other, _) => return Err(format!("game {i} ({m}x{m}, wins={wins}): {}", other.outcome())),
        }
    }
    Ok(format!("{won} won and {lost} lost games classified, {:.2?}", start.elapsed()))
}

fn drift() -> Outcome {
    let g = common::benchmark("drift");
    let start = Instant::now();
    let r = solve(&g, &CegisConfig::default());
    let took = start.elapsed();
    let CegisResult::Unrealizable { witness, stats } = &r else {
        return Err(format!("outcome {}", r.outcome()));
    };
    if stats.iterations > 10 || took >= Duration::from_secs(5) {
        return Err(format!("{} iterations in {took:?}", stats.iterations));
    }
    if !witness_replays(&g, witness) {
        return Err("witness does not replay".into());
    }
    Ok(format!("{} iterations, {took:.2?}, witness of {} constraints", stats.iterations, witness.len()))
}

fn closed_loop(solved: &[(GameDef, DecisionTree)]) -> Outcome {
    if solved.is_empty() {
        return Err("no solved benchmark to simulate".into());
    }
    let mut s = common::session();
    let mut plays = 0;
    for (g, tree) in solved {
        let w = Hypothesis::from_tree(tree.clone(), &g.variables);
        let v0 = match s.check(&[g.init.clone().into()], &g.current_vars()) {
            Ok(gamesynth::solver::SatResult::Sat(a)) => g.vertex_of(&a, false).unwrap(),
            other => return Err(format!("no initial vertex: {other:?}")),
        };
        let mut sim = Simulator::new(g, &w, 64);
        for seed in 0..100 {
            let t = sim.run(&v0, 200, &mut Adversary::random(seed), &mut s).map_err(|e| e.to_string())?;
            if !t.safe_throughout {
                return Err(format!("unsafe play from {v0} with seed {seed}"));
            }
            plays += 1;
        }
    }
    Ok(format!("{plays} plays of 200 steps over {} games, all safe", solved.len()))
}

fn main() {
    let mut solved = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 robot example", robot_example(&mut solved)),
        ("2 benchmark suite", benchmark_suite(&mut solved)),
        ("3 flip duality", flip_duality()),
        ("4 horn oracle", horn_oracle()),
        ("5 learner consistency", learner_consistency()),
        ("6 finite games", finite_games()),
        ("7 unrealizability", drift()),
        ("8 closed-loop safety", closed_loop(&solved)),
    ];

    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
