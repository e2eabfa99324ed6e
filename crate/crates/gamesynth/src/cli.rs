//! The `gamesynth` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use gamesynth_core::explicit::fixpoint_solve;
use gamesynth_core::learner::parse_tree;
use gamesynth_core::parse::{parse_formula, parse_game, Scope};
use gamesynth_core::{GameDef, Vertex};

use crate::cegis::{solve, witness_replays, CegisConfig, CegisResult};
use crate::game::validate;
use crate::oracle::{truncate, Adversary, Bounds, Simulator};
use crate::report::{exit_code, RunReport, EXIT_NO_RESULT, EXIT_RESOURCE, EXIT_SOLVED, EXIT_USAGE};
use crate::solver::{SatResult, Session, SolverConfig};
use crate::teacher::{check_hypothesis, Hypothesis, Verdict};

#[derive(Parser, Debug)]
#[command(name = "gamesynth", version, about = "Learn winning sets of infinite safety games")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(clap::Args, Debug, Clone)]
struct SolverArgs {
    /// Solver command line (default: $GAMESYNTH_SOLVER or `z3 -in`)
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Per-query timeout
    #[arg(long, default_value_t = 30_000)]
    query_timeout_ms: u64,
    /// Maximum number of successors of a single vertex
    #[arg(long, default_value_t = 64)]
    succ_cap: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, String> {
        let base = match &self.solver_cmd {
            Some(c) => SolverConfig::from_command_line(c).ok_or("empty --solver-cmd")?,
            None => SolverConfig::from_env(),
        };
        if self.query_timeout_ms == 0 || self.succ_cap == 0 {
            return Err("--query-timeout-ms and --succ-cap must be positive".into());
        }
        Ok(base.with_timeout(Duration::from_millis(self.query_timeout_ms)))
    }
}

#[derive(clap::Args, Debug, Clone)]
struct SolveArgs {
    #[arg(long, default_value_t = 10_000)]
    max_iterations: usize,
    /// Wall-clock budget for the whole run
    #[arg(long)]
    timeout_secs: Option<u64>,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    octagonal: Switch,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Synthesize a winning set
    Solve {
        game: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
        /// Write the tree as an s-expression here, and as DOT next to it
        #[arg(long)]
        emit_tree: Option<PathBuf>,
        /// Write the winning set as an SMT-LIB formula
        #[arg(long)]
        emit_formula: Option<PathBuf>,
        /// Write one JSON line per iteration
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Default location for all artifacts and report.json
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Print the report as JSON instead of a table
        #[arg(long)]
        json: bool,
        /// Accepted for symmetry with `simulate`; synthesis is deterministic
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a hypothesis (tree s-expression or formula) against the game
    Check {
        game: PathBuf,
        hypothesis: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve the game restricted to a box by fixed point
    Oracle {
        game: PathBuf,
        /// e.g. `x=-5..8,y=0..1`
        #[arg(long = "box")]
        bounds: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Play the controller of a winning set against an adversary
    Simulate {
        game: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// `random`, `random:SEED` or `script:PATH`
        #[arg(long, default_value = "random")]
        adversary: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start vertex such as `(0,0)`; default: a solver-chosen initial vertex
        #[arg(long)]
        start: Option<String>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve several games and print one table row each
    Bench {
        games: Vec<PathBuf>,
        #[command(flatten)]
        opts: SolveArgs,
        #[arg(long)]
        json: bool,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

macro_rules! fail {
    ($io:expr, $code:expr, $($fmt:tt)*) => {{
        let _ = writeln!($io.err, "error: {}", format!($($fmt)*));
        return $code;
    }};
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_SOLVED };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Cmd::Solve {
            game,
            opts,
            emit_tree,
            emit_formula,
            trace,
            out_dir,
            json,
            seed: _,
        } => cmd_solve(&mut io, &game, &opts, emit_tree, emit_formula, trace, out_dir, json),
        Cmd::Check {
            game,
            hypothesis,
            solver,
        } => cmd_check(&mut io, &game, &hypothesis, &solver),
        Cmd::Oracle { game, bounds, solver } => cmd_oracle(&mut io, &game, &bounds, &solver),
        Cmd::Simulate {
            game,
            tree,
            steps,
            adversary,
            seed,
            start,
            solver,
        } => cmd_simulate(&mut io, &game, &tree, steps, &adversary, seed, start.as_deref(), &solver),
        Cmd::Bench { games, opts, json } => cmd_bench(&mut io, &games, &opts, json),
    }
}

fn load_game(path: &Path) -> Result<GameDef, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_game(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn game_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "game".into(), |s| s.to_string_lossy().into_owned())
}

/// Loads and validates a game. Errors carry their exit code.
fn prepare(io: &mut Io<'_>, path: &Path, cfg: &SolverConfig) -> Result<(GameDef, Session), i32> {
    let g = load_game(path).map_err(|e| {
        let _ = writeln!(io.err, "error: {e}");
        EXIT_USAGE
    })?;
    let mut s = Session::open(cfg.clone()).map_err(|e| {
        let _ = writeln!(io.err, "error: {e}");
        EXIT_RESOURCE
    })?;
    let wf = validate(&g, &mut s).map_err(|e| {
        let _ = writeln!(io.err, "error: {e}");
        EXIT_RESOURCE
    })?;
    for w in &wf.warnings {
        let _ = writeln!(io.err, "warning: {w}");
    }
    let errors = wf.errors();
    if !errors.is_empty() {
        for e in errors {
            let _ = writeln!(io.err, "error: {}: {e}", path.display());
        }
        return Err(EXIT_USAGE);
    }
    Ok((g, s))
}

fn cegis_config(opts: &SolveArgs, trace: Option<PathBuf>) -> Result<CegisConfig, String> {
    if opts.max_iterations == 0 {
        return Err("--max-iterations must be positive".into());
    }
    Ok(CegisConfig {
        max_iterations: opts.max_iterations,
        solver: opts.solver.config()?,
        succ_cap: opts.solver.succ_cap,
        octagonal: opts.octagonal == Switch::On,
        trace,
        budget: opts.timeout_secs.map(Duration::from_secs),
        check_invariants: true,
    })
}

fn write_artifact(io: &mut Io<'_>, path: &Path, text: &str, written: &mut Vec<String>) -> bool {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        let _ = fs::create_dir_all(dir);
    }
    match fs::write(path, text) {
        Ok(()) => {
            written.push(path.display().to_string());
            true
        }
        Err(e) => {
            let _ = writeln!(io.err, "error: cannot write {}: {e}", path.display());
            false
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    io: &mut Io<'_>,
    path: &Path,
    opts: &SolveArgs,
    emit_tree: Option<PathBuf>,
    emit_formula: Option<PathBuf>,
    trace: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    json: bool,
) -> i32 {
    let name = game_name(path);
    let in_dir = |ext: &str| out_dir.as_ref().map(|d| d.join(format!("{name}.{ext}")));
    let emit_tree = emit_tree.or_else(|| in_dir("tree"));
    let emit_formula = emit_formula.or_else(|| in_dir("smt2"));
    let trace = trace.or_else(|| in_dir("trace.jsonl"));
    if let Some(d) = &out_dir {
        if let Err(e) = fs::create_dir_all(d) {
            fail!(io, EXIT_USAGE, "cannot create {}: {e}", d.display());
        }
    }
    let cfg = match cegis_config(opts, trace.clone()) {
        Ok(c) => c,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    let g = match prepare(io, path, &cfg.solver) {
        Ok((g, _)) => g,
        Err(code) => return code,
    };
    let result = solve(&g, &cfg);
    let mut artifacts = Vec::new();
    if let Some(t) = &trace {
        if t.exists() {
            artifacts.push(t.display().to_string());
        }
    }
    match &result {
        CegisResult::Solved { tree, formula, .. } => {
            if let Some(p) = &emit_tree {
                write_artifact(io, p, &format!("{}\n", tree.to_sexp(&g.variables)), &mut artifacts);
                write_artifact(io, &p.with_extension("dot"), &tree.to_dot(&g.variables), &mut artifacts);
            }
            if let Some(p) = &emit_formula {
                write_artifact(io, p, &format!("{}\n", formula.render()), &mut artifacts);
            }
            let _ = writeln!(io.err, "winning set: {formula}");
        }
        CegisResult::Unrealizable { witness, .. } => {
            let _ = writeln!(io.err, "no winning set exists; conflicting constraints:");
            for w in witness {
                let _ = writeln!(io.err, "  {}   (iteration {}: {})", w.constraint, w.iteration, w.counterexample);
            }
            if !witness_replays(&g, witness) {
                let _ = writeln!(io.err, "warning: witness failed to replay");
            }
        }
        CegisResult::TeacherError { detail, .. } => {
            let _ = writeln!(io.err, "error: {detail}");
        }
        _ => {}
    }
    let report = RunReport::new(&name, &result, artifacts);
    if let Some(d) = &out_dir {
        let mut extra = Vec::new();
        write_artifact(io, &d.join("report.json"), &report.to_json(), &mut extra);
    }
    if json {
        let _ = writeln!(io.out, "{}", report.to_json());
    } else {
        let _ = writeln!(io.out, "{}\n{}", RunReport::table_header(), report.table_row());
    }
    exit_code(&result)
}

fn load_hypothesis(path: &Path, g: &GameDef) -> Result<Hypothesis, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Ok(t) = parse_tree(&text, &g.variables) {
        return Ok(Hypothesis::from_tree(t, &g.variables));
    }
    parse_formula(&text, &Scope::state(&g.variables))
        .map(Hypothesis::from_formula)
        .map_err(|e| format!("{}: not a tree or formula: {e}", path.display()))
}

fn cmd_check(io: &mut Io<'_>, path: &Path, hyp: &Path, solver: &SolverArgs) -> i32 {
    let cfg = match solver.config() {
        Ok(c) => c,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    let (g, mut s) = match prepare(io, path, &cfg) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let h = match load_hypothesis(hyp, &g) {
        Ok(h) => h,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    match check_hypothesis(&g, &h, &mut s, solver.succ_cap) {
        Ok(Verdict::Yes) => {
            let _ = writeln!(io.out, "Yes");
            EXIT_SOLVED
        }
        Ok(Verdict::No(c)) => {
            let _ = writeln!(io.out, "{c}");
            EXIT_NO_RESULT
        }
        Err(e) => fail!(io, EXIT_RESOURCE, "{e}"),
    }
}

fn cmd_oracle(io: &mut Io<'_>, path: &Path, bounds: &str, solver: &SolverArgs) -> i32 {
    let cfg = match solver.config() {
        Ok(c) => c,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    let g = match load_game(path) {
        Ok(g) => g,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    let b = match Bounds::parse(bounds, &g.variables) {
        Ok(b) => b,
        Err(e) => fail!(io, EXIT_USAGE, "--box: {e}"),
    };
    let mut s = match Session::open(cfg) {
        Ok(s) => s,
        Err(e) => fail!(io, EXIT_RESOURCE, "{e}"),
    };
    let eg = match truncate(&g, &b, &mut s, solver.succ_cap) {
        Ok(eg) => eg,
        Err(e) => fail!(io, EXIT_RESOURCE, "{e}"),
    };
    let w = fixpoint_solve(&eg);
    let init_wins = !eg.init.is_empty() && eg.init.is_subset(&w);
    let _ = writeln!(io.out, "vertices: {}", eg.vertices.len());
    let _ = writeln!(io.out, "winning region: {}", w.len());
    if eg.init.is_empty() {
        let _ = writeln!(io.out, "init-winning: no (no initial vertex inside the box)");
    } else {
        let _ = writeln!(io.out, "init-winning: {}", if init_wins { "yes" } else { "no" });
    }
    if init_wins {
        EXIT_SOLVED
    } else {
        EXIT_NO_RESULT
    }
}

fn parse_vertex(text: &str, arity: usize) -> Result<Vertex, String> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| format!("malformed vertex `{text}`"))?;
    let coords = inner
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| format!("malformed vertex `{text}`")))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != arity {
        return Err(format!("vertex `{text}` has {} coordinates, expected {arity}", coords.len()));
    }
    Ok(Vertex::new(coords))
}

fn parse_adversary(spec: &str, seed: u64, arity: usize) -> Result<Adversary, String> {
    if spec == "random" {
        return Ok(Adversary::random(seed));
    }
    if let Some(s) = spec.strip_prefix("random:") {
        return s
            .parse()
            .map(Adversary::random)
            .map_err(|_| format!("bad seed in `{spec}`"));
    }
    if let Some(p) = spec.strip_prefix("script:") {
        let text = fs::read_to_string(p).map_err(|e| format!("{p}: {e}"))?;
        let moves = text
            .lines()
            .map(|l| l.split(';').next().unwrap().trim())
            .filter(|l| !l.is_empty())
            .map(|l| parse_vertex(l, arity))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Adversary::Scripted(moves));
    }
    Err(format!("unknown adversary `{spec}`"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    io: &mut Io<'_>,
    path: &Path,
    tree: &Path,
    steps: usize,
    adversary: &str,
    seed: u64,
    start: Option<&str>,
    solver: &SolverArgs,
) -> i32 {
    let cfg = match solver.config() {
        Ok(c) => c,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    let (g, mut s) = match prepare(io, path, &cfg) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let w = match load_hypothesis(tree, &g) {
        Ok(h) => h,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    let mut adv = match parse_adversary(adversary, seed, g.arity()) {
        Ok(a) => a,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    let v0 = match start {
        Some(t) => match parse_vertex(t, g.arity()) {
            Ok(v) => v,
            Err(e) => fail!(io, EXIT_USAGE, "{e}"),
        },
        None => match s.check(&[g.init.clone().into()], &g.current_vars()) {
            Ok(SatResult::Sat(a)) => g.vertex_of(&a, false).unwrap(),
            Ok(other) => fail!(io, EXIT_RESOURCE, "no initial vertex found: {other:?}"),
            Err(e) => fail!(io, EXIT_RESOURCE, "{e}"),
        },
    };
    match Simulator::new(&g, &w, solver.succ_cap).run(&v0, steps, &mut adv, &mut s) {
        Ok(trace) => {
            let _ = writeln!(io.out, "{trace}");
            let verdict = if trace.safe_throughout { "SAFE" } else { "UNSAFE" };
            let _ = writeln!(io.out, "{verdict}");
            if trace.safe_throughout {
                EXIT_SOLVED
            } else {
                EXIT_NO_RESULT
            }
        }
        Err(e) => fail!(io, EXIT_RESOURCE, "{e}"),
    }
}

fn cmd_bench(io: &mut Io<'_>, games: &[PathBuf], opts: &SolveArgs, json: bool) -> i32 {
    let cfg = match cegis_config(opts, None) {
        Ok(c) => c,
        Err(e) => fail!(io, EXIT_USAGE, "{e}"),
    };
    if !json {
        let _ = writeln!(io.out, "{}", RunReport::table_header());
    }
    let mut worst = EXIT_SOLVED;
    for path in games {
        let g = match prepare(io, path, &cfg.solver) {
            Ok((g, _)) => g,
            Err(code) => {
                worst = worst.max(code);
                continue;
            }
        };
        let r = solve(&g, &cfg);
        let report = RunReport::new(&game_name(path), &r, Vec::new());
        if json {
            let _ = writeln!(io.out, "{}", report.to_json());
        } else {
            let _ = writeln!(io.out, "{}", report.table_row());
        }
        worst = worst.max(exit_code(&r));
    }
    worst
}
