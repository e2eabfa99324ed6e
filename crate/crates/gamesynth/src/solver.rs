//! SMT-LIB 2 sessions with an external solver process.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use gamesynth_core::formula::{Assignment, CmpOp, Formula, Term, Var};
use gamesynth_core::sexp::{self, Sexp};

pub const SOLVER_ENV: &str = "GAMESYNTH_SOLVER";
pub const DEFAULT_QUERY_TIMEOUT: Duration = Duration::from_millis(30_000);

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("cannot start solver `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("solver handshake failed: {0}")]
    Handshake(String),
    #[error("solver exited unexpectedly")]
    Exited,
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver protocol error: {0}")]
    Protocol(String),
    #[error("enumeration inconclusive: {0}")]
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub command: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            command: "z3".into(),
            args: vec!["-in".into()],
            timeout: DEFAULT_QUERY_TIMEOUT,
        }
    }
}

impl SolverConfig {
    /// Parses a whitespace-separated command line such as `z3 -in`.
    pub fn from_command_line(line: &str) -> Option<Self> {
        let mut words = line.split_whitespace().map(String::from);
        let command = words.next()?;
        Some(SolverConfig {
            command,
            args: words.collect(),
            ..SolverConfig::default()
        })
    }

    /// The default configuration unless `GAMESYNTH_SOLVER` names another command.
    pub fn from_env() -> Self {
        std::env::var(SOLVER_ENV)
            .ok()
            .and_then(|s| Self::from_command_line(&s))
            .unwrap_or_default()
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// Model restricted to the projected variables.
    Sat(Assignment),
    Unsat,
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Models(Vec<Assignment>),
    OverCap,
}

/// An assertion; the quantified form binds the primed copies of `vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assertion {
    Plain(Formula),
    ForallNext { vars: Vec<String>, body: Formula },
}

impl From<Formula> for Assertion {
    fn from(f: Formula) -> Self {
        Assertion::Plain(f)
    }
}

impl Assertion {
    fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            Assertion::Plain(f) => f.free_vars(),
            Assertion::ForallNext { vars, body } => {
                let bound: BTreeSet<Var> = vars.iter().map(|v| Var::next(v.clone())).collect();
                body.free_vars().difference(&bound).cloned().collect()
            }
        }
    }

    fn render(&self) -> String {
        match self {
            Assertion::Plain(f) => f.render(),
            Assertion::ForallNext { vars, body } => {
                let mut s = String::from("(forall (");
                for v in vars {
                    let _ = write!(s, "({} Int)", Var::next(v.clone()).wire_name());
                }
                let _ = write!(s, ") {})", body.render());
                s
            }
        }
    }
}

enum ReadError {
    Timeout,
    Exited,
}

/// A live solver process. Variables are declared on first use at the base
/// scope; every query runs inside its own push/pop frame.
pub struct Session {
    config: SolverConfig,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    declared: BTreeSet<String>,
    depth: usize,
    queries: u64,
    restarts: u64,
}

impl Session {
    pub fn open(config: SolverConfig) -> Result<Session, SolverError> {
        let (child, stdin, lines) = spawn(&config)?;
        let mut s = Session {
            config,
            child,
            stdin,
            lines,
            declared: BTreeSet::new(),
            depth: 0,
            queries: 0,
            restarts: 0,
        };
        s.handshake()?;
        Ok(s)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn set_timeout(&mut self, timeout: Duration) {
        self.config.timeout = timeout;
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of `check-sat` commands issued so far.
    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Number of times the process was replaced after a timeout.
    pub fn restarts(&self) -> u64 {
        self.restarts
    }

    fn handshake(&mut self) -> Result<(), SolverError> {
        self.send("(set-option :print-success false)\n(set-logic LIA)\n(get-info :name)")
            .map_err(|e| SolverError::Handshake(e.to_string()))?;
        let deadline = Instant::now() + self.config.timeout.max(Duration::from_secs(5));
        match self.read_response(deadline) {
            Ok(r) if r.trim_start().starts_with("(:name") => Ok(()),
            Ok(r) => Err(SolverError::Handshake(r.trim().to_string())),
            Err(_) => Err(SolverError::Handshake("no response".into())),
        }
    }

    fn send(&mut self, text: &str) -> Result<(), SolverError> {
        self.stdin.write_all(text.as_bytes())?;
        self.stdin.write_all(b"\n")?;
        self.stdin.flush()?;
        Ok(())
    }

    /// Reads one complete s-expression or atom response.
    fn read_response(&mut self, deadline: Instant) -> Result<String, ReadError> {
        let mut buf = String::new();
        let mut depth = 0i64;
        let mut in_string = false;
        loop {
            let wait = deadline.saturating_duration_since(Instant::now());
            let line = match self.lines.recv_timeout(wait) {
                Ok(l) => l,
                Err(RecvTimeoutError::Timeout) => return Err(ReadError::Timeout),
                Err(RecvTimeoutError::Disconnected) => return Err(ReadError::Exited),
            };
            if buf.is_empty() && line.trim().is_empty() {
                continue;
            }
            for ch in line.chars() {
                match ch {
                    '"' => in_string = !in_string,
                    '(' if !in_string => depth += 1,
                    ')' if !in_string => depth -= 1,
                    _ => {}
                }
            }
            buf.push_str(&line);
            buf.push('\n');
            if depth <= 0 && !in_string {
                return Ok(buf);
            }
        }
    }

    fn restart(&mut self) -> Result<(), SolverError> {
        let _ = self.child.kill();
        let _ = self.child.wait();
        let (child, stdin, lines) = spawn(&self.config)?;
        self.child = child;
        self.stdin = stdin;
        self.lines = lines;
        self.depth = 0;
        self.restarts += 1;
        self.handshake()?;
        let names: Vec<String> = self.declared.iter().cloned().collect();
        for n in names {
            self.send(&format!("(declare-const {n} Int)"))?;
        }
        Ok(())
    }

    fn declare(&mut self, vars: impl IntoIterator<Item = Var>) -> Result<(), SolverError> {
        debug_assert_eq!(self.depth, 0);
        for v in vars {
            let name = v.wire_name();
            if !self.declared.contains(&name) {
                self.send(&format!("(declare-const {name} Int)"))?;
                self.declared.insert(name);
            }
        }
        Ok(())
    }

    fn push(&mut self) -> Result<(), SolverError> {
        self.send("(push 1)")?;
        self.depth += 1;
        Ok(())
    }

    fn pop(&mut self) -> Result<(), SolverError> {
        self.send("(pop 1)")?;
        self.depth -= 1;
        Ok(())
    }

    fn assert(&mut self, a: &Assertion) -> Result<(), SolverError> {
        let text = format!("(assert {})", a.render());
        self.send(&text)
    }

    /// `Ok(None)` on timeout, after the process has been replaced.
    fn check_sat(&mut self, deadline: Instant) -> Result<Option<String>, SolverError> {
        self.queries += 1;
        self.send("(check-sat)")?;
        match self.read_response(deadline) {
            Ok(r) => {
                let r = r.trim().to_string();
                if r.starts_with("(error") {
                    return Err(SolverError::Protocol(r));
                }
                Ok(Some(r))
            }
            Err(ReadError::Timeout) => {
                self.restart()?;
                Ok(None)
            }
            Err(ReadError::Exited) => Err(SolverError::Exited),
        }
    }

    fn get_values(&mut self, project: &[Var], deadline: Instant) -> Result<Option<Assignment>, SolverError> {
        let mut a = Assignment::new();
        if project.is_empty() {
            return Ok(Some(a));
        }
        let names: Vec<String> = project.iter().map(Var::wire_name).collect();
        self.send(&format!("(get-value ({}))", names.join(" ")))?;
        let resp = match self.read_response(deadline) {
            Ok(r) => r,
            Err(ReadError::Timeout) => {
                self.restart()?;
                return Ok(None);
            }
            Err(ReadError::Exited) => return Err(SolverError::Exited),
        };
        let bad = || SolverError::Protocol(format!("unexpected get-value response: {}", resp.trim()));
        let parsed = sexp::parse_one(&resp).map_err(|_| bad())?;
        let pairs = parsed.as_list().ok_or_else(bad)?;
        for pair in pairs {
            let [name, value] = pair.as_list().ok_or_else(bad)? else {
                return Err(bad());
            };
            let idx = names
                .iter()
                .position(|n| Some(n.as_str()) == name.as_atom())
                .ok_or_else(bad)?;
            a.set(&project[idx], int_value(value).ok_or_else(bad)?);
        }
        if project.iter().any(|v| a.get(v).is_none()) {
            return Err(bad());
        }
        Ok(Some(a))
    }

    /// Satisfiability of the conjunction of `assertions`; a model is
    /// restricted to `project`. The session scope is restored afterwards.
    pub fn check(&mut self, assertions: &[Assertion], project: &[Var]) -> Result<SatResult, SolverError> {
        let deadline = Instant::now() + self.config.timeout;
        self.declare(assertions.iter().flat_map(Assertion::free_vars).chain(project.iter().cloned()))?;
        self.push()?;
        for a in assertions {
            self.assert(a)?;
        }
        let result = match self.check_sat(deadline)? {
            None => return Ok(SatResult::Unknown("timeout".into())),
            Some(r) => r,
        };
        let out = match result.as_str() {
            "sat" => match self.get_values(project, deadline)? {
                Some(a) => SatResult::Sat(a),
                None => return Ok(SatResult::Unknown("timeout".into())),
            },
            "unsat" => SatResult::Unsat,
            "unknown" => SatResult::Unknown("unknown".into()),
            other => return Err(SolverError::Protocol(format!("unexpected check-sat response: {other}"))),
        };
        self.pop()?;
        Ok(out)
    }

    /// All models of `assertions` that are distinct on `project`, or
    /// `OverCap` once more than `cap` exist.
    pub fn enumerate_models(
        &mut self,
        assertions: &[Assertion],
        project: &[Var],
        cap: usize,
    ) -> Result<Enumeration, SolverError> {
        assert!(cap >= 1);
        let deadline = Instant::now() + self.config.timeout;
        self.declare(assertions.iter().flat_map(Assertion::free_vars).chain(project.iter().cloned()))?;
        self.push()?;
        for a in assertions {
            self.assert(a)?;
        }
        let mut models = Vec::new();
        loop {
            let r = match self.check_sat(deadline)? {
                None => return Err(SolverError::Inconclusive("timeout".into())),
                Some(r) => r,
            };
            match r.as_str() {
                "unsat" => break,
                "sat" => {}
                "unknown" => {
                    self.pop()?;
                    return Err(SolverError::Inconclusive("solver returned unknown".into()));
                }
                other => return Err(SolverError::Protocol(format!("unexpected check-sat response: {other}"))),
            }
            if models.len() == cap {
                self.pop()?;
                return Ok(Enumeration::OverCap);
            }
            let m = self
                .get_values(project, deadline)?
                .ok_or_else(|| SolverError::Inconclusive("timeout".into()))?;
            if project.is_empty() {
                models.push(m);
                break;
            }
            let block = Formula::or(
                project
                    .iter()
                    .map(|v| {
                        let c = m.get(v).unwrap();
                        Formula::not(Formula::cmp(CmpOp::Eq, Term::Var(v.clone()), Term::Const(c)))
                    })
                    .collect(),
            );
            self.assert(&Assertion::Plain(block))?;
            models.push(m);
        }
        self.pop()?;
        Ok(Enumeration::Models(models))
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = self.send("(exit)");
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn int_value(s: &Sexp) -> Option<i64> {
    match s {
        Sexp::Atom(a, _) => a.parse().ok(),
        Sexp::List(items, _) => match items.as_slice() {
            [Sexp::Atom(minus, _), inner] if minus == "-" => int_value(inner)?.checked_neg(),
            _ => None,
        },
    }
}

type Spawned = (Child, ChildStdin, Receiver<String>);

fn spawn(config: &SolverConfig) -> Result<Spawned, SolverError> {
    let mut child = Command::new(&config.command)
        .args(&config.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|source| SolverError::Spawn {
            command: config.command.clone(),
            source,
        })?;
    let stdin = child.stdin.take().expect("piped stdin");
    let stdout = child.stdout.take().expect("piped stdout");
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut reader = BufReader::new(stdout);
        loop {
            let mut line = String::new();
            match reader.read_line(&mut line) {
                Ok(0) | Err(_) => break,
                Ok(_) => {
                    let trimmed = line.trim_end_matches(['\n', '\r']).to_string();
                    if tx.send(trimmed).is_err() {
                        break;
                    }
                }
            }
        }
    });
    Ok((child, stdin, rx))
}
