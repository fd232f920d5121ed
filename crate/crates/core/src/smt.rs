//! Session with an external SMT-LIB2 solver process.
//!
//! Every query runs inside `(push 1)`/`(pop 1)` with `:print-success`
//! enabled so that each command is acknowledged. Replies are framed by
//! parenthesis balance. A query that outlives its budget kills the process;
//! the next query starts a new one.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use num_bigint::BigInt;
use thiserror::Error;

use crate::frontend::int_literal;
use crate::sexp::{paren_balance, parse_one};
use crate::term::{Formula, Ident, Model};

pub const SOLVER_ENV: &str = "IHC_SOLVER";
pub const DEFAULT_TIMEOUT_MS: u64 = 2000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmtConfig {
    pub command: Vec<String>,
    pub timeout_ms: u64,
    pub logic: String,
}

impl Default for SmtConfig {
    fn default() -> Self {
        let command = match std::env::var(SOLVER_ENV) {
            Ok(s) if !s.trim().is_empty() => s.split_whitespace().map(String::from).collect(),
            _ => vec!["z3".into(), "-in".into(), "-smt2".into()],
        };
        SmtConfig { command, timeout_ms: DEFAULT_TIMEOUT_MS, logic: "ALL".into() }
    }
}

impl SmtConfig {
    pub fn with_command(mut self, cmd: &str) -> Self {
        self.command = cmd.split_whitespace().map(String::from).collect();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmtVerdict {
    Valid,
    Invalid(Model),
    Unknown(String),
}

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("cannot start solver `{cmd}`: {source}")]
    Spawn { cmd: String, source: std::io::Error },
    #[error("solver I/O failure: {0}")]
    Io(String),
    #[error("unexpected solver response to `{command}`: {response}")]
    Protocol { command: String, response: String },
    #[error("solver model does not satisfy the query: {0}")]
    ModelMismatch(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SmtStats {
    pub queries: u64,
    pub cache_hits: u64,
    pub solver_calls: u64,
    pub restarts: u64,
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Drop for Process {
    fn drop(&mut self) {
        let _ = self.stdin.write_all(b"(exit)\n");
        let _ = self.stdin.flush();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub struct SmtSession {
    config: SmtConfig,
    proc: Option<Process>,
    cache: HashMap<String, SatResult>,
    stats: SmtStats,
}

enum Reply {
    Text(String),
    Timeout,
}

impl SmtSession {
    pub fn new(config: SmtConfig) -> Self {
        SmtSession { config, proc: None, cache: HashMap::new(), stats: SmtStats::default() }
    }

    pub fn config(&self) -> &SmtConfig {
        &self.config
    }

    pub fn stats(&self) -> SmtStats {
        self.stats
    }

    fn spawn(&mut self) -> Result<(), SmtError> {
        let cmd = self.config.command.join(" ");
        let (prog, args) = self
            .config
            .command
            .split_first()
            .ok_or_else(|| SmtError::Io("empty solver command".into()))?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SmtError::Spawn { cmd: cmd.clone(), source })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                match line {
                    Ok(l) => {
                        if tx.send(l).is_err() {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
        });
        self.proc = Some(Process { child, stdin, lines: rx });
        self.command("(set-option :print-success true)")?;
        self.command("(set-option :produce-models true)")?;
        self.command(&format!("(set-option :timeout {})", self.config.timeout_ms))?;
        self.command(&format!("(set-logic {})", self.config.logic))?;
        log::debug!("started solver `{cmd}`");
        Ok(())
    }

    fn send(&mut self, text: &str) -> Result<(), SmtError> {
        let p = self.proc.as_mut().ok_or_else(|| SmtError::Io("solver not running".into()))?;
        log::trace!("smt> {text}");
        p.stdin
            .write_all(text.as_bytes())
            .and_then(|_| p.stdin.write_all(b"\n"))
            .and_then(|_| p.stdin.flush())
            .map_err(|e| SmtError::Io(e.to_string()))
    }

    fn reply(&mut self) -> Result<Reply, SmtError> {
        let budget = Duration::from_millis(self.config.timeout_ms + 1500);
        let p = self.proc.as_mut().ok_or_else(|| SmtError::Io("solver not running".into()))?;
        let mut text = String::new();
        loop {
            match p.lines.recv_timeout(budget) {
                Ok(line) => {
                    if !text.is_empty() {
                        text.push('\n');
                    }
                    text.push_str(&line);
                    if !text.trim().is_empty() && paren_balance(&text) <= 0 {
                        log::trace!("smt< {text}");
                        return Ok(Reply::Text(text.trim().to_string()));
                    }
                }
                Err(RecvTimeoutError::Timeout) => return Ok(Reply::Timeout),
                Err(RecvTimeoutError::Disconnected) => {
                    self.proc = None;
                    return Err(SmtError::Io("solver exited unexpectedly".into()));
                }
            }
        }
    }

    fn command(&mut self, text: &str) -> Result<(), SmtError> {
        self.send(text)?;
        match self.reply()? {
            Reply::Text(r) if r == "success" => Ok(()),
            Reply::Text(r) => {
                self.proc = None;
                Err(SmtError::Protocol { command: text.into(), response: r })
            }
            Reply::Timeout => {
                self.kill();
                Err(SmtError::Io(format!("no response to `{text}`")))
            }
        }
    }

    fn kill(&mut self) {
        if self.proc.take().is_some() {
            self.stats.restarts += 1;
        }
    }

    /// Satisfiability of `f`; a `Sat` model assigns every free variable.
    pub fn check_sat(&mut self, f: &Formula) -> Result<SatResult, SmtError> {
        self.stats.queries += 1;
        let fvs = f.fvs();
        match f {
            Formula::True if fvs.is_empty() => return Ok(SatResult::Sat(Model::new())),
            Formula::False => return Ok(SatResult::Unsat),
            _ => {}
        }
        if fvs.is_empty() {
            if let Some(b) = f.eval(&Model::new()) {
                return Ok(if b { SatResult::Sat(Model::new()) } else { SatResult::Unsat });
            }
        }
        let mut decls = String::new();
        for v in &fvs {
            decls.push_str(&format!("(declare-const {v} Int)\n"));
        }
        let assertion = format!("(assert {f})");
        let key = format!("{decls}{assertion}");
        if let Some(hit) = self.cache.get(&key) {
            self.stats.cache_hits += 1;
            return Ok(hit.clone());
        }
        let result = self.run_query(&fvs, &assertion)?;
        if let SatResult::Sat(m) = &result {
            if f.eval(m) == Some(false) {
                return Err(SmtError::ModelMismatch(format!("{f} under {m:?}")));
            }
        }
        if !matches!(result, SatResult::Unknown(_)) {
            self.cache.insert(key, result.clone());
        }
        Ok(result)
    }

    fn run_query(&mut self, fvs: &BTreeSet<Ident>, assertion: &str) -> Result<SatResult, SmtError> {
        if self.proc.is_none() {
            self.spawn()?;
        }
        self.stats.solver_calls += 1;
        self.command("(push 1)")?;
        for v in fvs {
            self.command(&format!("(declare-const {v} Int)"))?;
        }
        self.command(assertion)?;
        self.send("(check-sat)")?;
        let verdict = match self.reply()? {
            Reply::Timeout => {
                self.kill();
                return Ok(SatResult::Unknown("timeout".into()));
            }
            Reply::Text(t) => t,
        };
        let result = match verdict.as_str() {
            "unsat" => SatResult::Unsat,
            "unknown" => SatResult::Unknown("solver returned unknown".into()),
            "sat" => {
                self.send("(get-model)")?;
                match self.reply()? {
                    Reply::Timeout => {
                        self.kill();
                        return Ok(SatResult::Unknown("timeout while reading model".into()));
                    }
                    Reply::Text(t) => SatResult::Sat(parse_model(&t, fvs)?),
                }
            }
            other => {
                self.proc = None;
                return Err(SmtError::Protocol { command: "(check-sat)".into(), response: other.into() });
            }
        };
        self.command("(pop 1)")?;
        Ok(result)
    }

    /// Validity of `hypothesis ⇒ conclusion`, as unsatisfiability of
    /// `hypothesis ∧ ¬conclusion`.
    pub fn check_valid(&mut self, hypothesis: &Formula, conclusion: &Formula) -> Result<SmtVerdict, SmtError> {
        if *conclusion == Formula::True || *hypothesis == Formula::False || hypothesis == conclusion {
            self.stats.queries += 1;
            return Ok(SmtVerdict::Valid);
        }
        let mut parts = hypothesis.conjuncts();
        parts.push(conclusion.negate());
        Ok(match self.check_sat(&Formula::and(parts))? {
            SatResult::Unsat => SmtVerdict::Valid,
            SatResult::Sat(m) => SmtVerdict::Invalid(m),
            SatResult::Unknown(r) => SmtVerdict::Unknown(r),
        })
    }

    pub fn is_valid(&mut self, hypothesis: &Formula, conclusion: &Formula) -> Result<bool, SmtError> {
        Ok(matches!(self.check_valid(hypothesis, conclusion)?, SmtVerdict::Valid))
    }
}

/// Reads a `(get-model)` reply. Variables the solver leaves out are
/// unconstrained and get 0.
pub fn parse_model(text: &str, fvs: &BTreeSet<Ident>) -> Result<Model, SmtError> {
    let bad = |why: &str| SmtError::Protocol { command: "(get-model)".into(), response: format!("{why}: {text}") };
    let e = parse_one(text).map_err(|_| bad("unreadable model"))?;
    let items = e.as_list().ok_or_else(|| bad("model is not a list"))?;
    let defs = match items.first().and_then(|i| i.as_sym()) {
        Some("model") => &items[1..],
        Some("error") => return Err(bad("solver error")),
        _ => items,
    };
    let mut model = Model::new();
    for d in defs {
        let parts = d.as_list().ok_or_else(|| bad("malformed definition"))?;
        if parts.len() != 5 || parts[0].as_sym() != Some("define-fun") {
            continue;
        }
        if parts[2].as_list().is_none_or(|a| !a.is_empty()) {
            continue;
        }
        let Some(name) = parts[1].as_sym() else { continue };
        let id = Ident::new(name);
        if !fvs.contains(&id) {
            continue;
        }
        let value = int_literal(&parts[4]).ok_or_else(|| bad("non-integer model value"))?;
        model.insert(id, value);
    }
    for v in fvs {
        model.entry(v.clone()).or_insert_with(|| BigInt::from(0));
    }
    Ok(model)
}
