//! Command-line front end.
//!
//! Exit codes: 0 solvable / verified, 1 unsolvable, 2 unknown or rejected,
//! 3 lemma rejected, 4 usage error, 5 input error, 6 solver failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::certificate::{self, Certificate, CertificateError, ReplayResult};
use crate::engine::solve::{check_lemmas, solve_hccs, GoalResult, LemmaResult, SolveConfig, SolveReport, Verdict};
use crate::frontend::{parse_problem, ProblemFile};
use crate::oracle::{bounded_least_model, goal_violations};
use crate::smt::{SmtConfig, SmtError, SOLVER_ENV};

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_LEMMA: i32 = 3;
pub const EXIT_USAGE: i32 = 4;
pub const EXIT_INPUT: i32 = 5;
pub const EXIT_SOLVER: i32 = 6;

#[derive(Parser, Debug)]
#[command(name = "ihc", version, about = "Horn clause constraint solver based on induction over derivations")]
pub struct Cli {
    /// SMT solver command line (must speak SMT-LIB 2 on stdin).
    #[arg(long, global = true, env = SOLVER_ENV)]
    pub solver: Option<String>,
    /// Per-query solver timeout in milliseconds.
    #[arg(long, global = true, value_name = "MS")]
    pub smt_timeout: Option<u64>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Whole-run timeout in seconds.
    #[arg(long, default_value_t = 60.0, value_name = "S")]
    pub timeout: f64,
    #[arg(long, value_name = "N")]
    pub max_inductions: Option<u32>,
    #[arg(long, value_name = "N")]
    pub max_unfolds: Option<u32>,
    /// Let lemma applications replace the atom they rewrite.
    #[arg(long)]
    pub apply_p_replace: bool,
    /// Allow unfolding atoms that were never inducted on.
    #[arg(long)]
    pub unfold_without_induct: bool,
    /// Number of goals solved in parallel.
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide solvability of a problem file.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Write a proof certificate when the problem is solvable.
        #[arg(long, value_name = "PATH")]
        certificate: Option<PathBuf>,
        /// Write the counterexample when the problem is unsolvable.
        #[arg(long, value_name = "PATH")]
        cex: Option<PathBuf>,
    },
    /// Check the lemmas of a problem file.
    CheckLemmas {
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Re-verify a proof certificate against a problem file.
    Replay {
        certificate: PathBuf,
        #[arg(long, value_name = "PATH")]
        problem: PathBuf,
    },
    /// Print the bounded least model of the definite clauses.
    Oracle {
        input: PathBuf,
        /// Arguments range over [-B, B].
        #[arg(long, default_value_t = 4, value_name = "B")]
        bound: u64,
        #[arg(long, default_value_t = 6, value_name = "K")]
        iterations: usize,
    },
    /// Solve every `.ihcs` file of a directory and print a table.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
}

struct Failure {
    code: i32,
    msg: String,
}

fn input_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INPUT, msg: format!("{}: {e}", path.display()) }
}

fn solver_error(e: SmtError) -> Failure {
    Failure { code: EXIT_SOLVER, msg: e.to_string() }
}

fn load(path: &Path) -> Result<ProblemFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(path, e))?;
    parse_problem(&text).map_err(|e| input_error(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input_error(path, e))
}

fn smt_config(cli: &Cli) -> SmtConfig {
    let mut cfg = SmtConfig::default();
    if let Some(cmd) = &cli.solver {
        cfg = cfg.with_command(cmd);
    }
    if let Some(ms) = cli.smt_timeout {
        cfg.timeout_ms = ms;
    }
    cfg
}

fn option_flag(problem: &ProblemFile, key: &str) -> bool {
    problem.options.get(key).is_some_and(|v| v == "true")
}

/// Solver configuration from flags and the file's own options.
pub fn solve_config(smt: SmtConfig, args: &SearchArgs, problem: &ProblemFile) -> SolveConfig {
    let mut cfg = SolveConfig { smt, jobs: args.jobs.max(1), ..SolveConfig::default() };
    cfg.timeout = (args.timeout > 0.0).then(|| Duration::from_secs_f64(args.timeout));
    if let Some(n) = args.max_inductions {
        cfg.limits.max_inductions = n;
    }
    if let Some(n) = args.max_unfolds {
        cfg.limits.max_unfolds_per_branch = n;
    }
    cfg.strategy.apply_p_replace = args.apply_p_replace || option_flag(problem, "apply-p-replace");
    cfg.strategy.unfold_without_induct = args.unfold_without_induct || option_flag(problem, "unfold-without-induct");
    cfg
}

fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Solvable => EXIT_SAT,
        Verdict::Unsolvable { .. } => EXIT_UNSAT,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
        Verdict::LemmaRejected { .. } => EXIT_LEMMA,
    }
}

fn print_report(out: &mut dyn Write, r: &SolveReport) -> std::io::Result<()> {
    for l in &r.lemmas {
        match &l.result {
            LemmaResult::Proved(p) => writeln!(out, "lemma {}: proved ({} nodes)", l.lemma, p.size())?,
            LemmaResult::Refuted(_) => writeln!(out, "lemma {}: refuted", l.lemma)?,
            LemmaResult::Unknown(why) => writeln!(out, "lemma {}: unknown ({why})", l.lemma)?,
        }
    }
    for g in &r.goals {
        let ms = g.elapsed.as_millis();
        match &g.result {
            GoalResult::Proved(p) => writeln!(out, "goal {}: proved ({} nodes, {ms} ms)", g.goal, p.size())?,
            GoalResult::Refuted(_) => writeln!(out, "goal {}: refuted ({ms} ms)", g.goal)?,
            GoalResult::Unknown(why) => writeln!(out, "goal {}: unknown ({why}, {ms} ms)", g.goal)?,
        }
    }
    match &r.verdict {
        Verdict::Solvable => writeln!(out, "verdict: SOLVABLE")?,
        Verdict::Unsolvable { goal, cex } => {
            writeln!(out, "verdict: UNSOLVABLE (goal {goal})")?;
            write!(out, "{cex}")?;
        }
        Verdict::Unknown(why) => writeln!(out, "verdict: UNKNOWN ({why})")?,
        Verdict::LemmaRejected { lemma, reason } => writeln!(out, "verdict: LEMMA REJECTED (lemma {lemma}: {reason})")?,
    }
    writeln!(
        out,
        "smt: {} queries, {} cache hits, {} solver calls",
        r.smt.queries, r.smt.cache_hits, r.smt.solver_calls
    )
}

fn solve(
    cli: &Cli,
    out: &mut dyn Write,
    input: &Path,
    search: &SearchArgs,
    cert_path: Option<&Path>,
    cex_path: Option<&Path>,
) -> Result<i32, Failure> {
    let problem = load(input)?;
    let cfg = solve_config(smt_config(cli), search, &problem);
    let report = solve_hccs(&problem, &cfg).map_err(solver_error)?;
    let _ = print_report(out, &report);
    if let (Some(path), Some((lemmas, goals))) = (cert_path, report.proofs()) {
        write_file(path, &certificate::serialize(&Certificate { lemmas, goals }))?;
        let _ = writeln!(out, "certificate: {}", path.display());
    }
    if let (Some(path), Verdict::Unsolvable { cex, .. }) = (cex_path, &report.verdict) {
        write_file(path, &cex.to_string())?;
        let _ = writeln!(out, "counterexample: {}", path.display());
    }
    let _ = writeln!(out, "result: {}", report.verdict.result_word());
    Ok(verdict_code(&report.verdict))
}

fn lemmas(cli: &Cli, out: &mut dyn Write, input: &Path, search: &SearchArgs) -> Result<i32, Failure> {
    let problem = load(input)?;
    let cfg = solve_config(smt_config(cli), search, &problem);
    let (reports, _) = check_lemmas(&problem, &cfg).map_err(solver_error)?;
    let mut ok = true;
    for l in &reports {
        let word = match &l.result {
            LemmaResult::Proved(_) => "proved".to_string(),
            LemmaResult::Refuted(m) => {
                let vals: Vec<String> = m.iter().map(|(v, n)| format!("{v}={n}")).collect();
                format!("refuted {{{}}}", vals.join(", "))
            }
            LemmaResult::Unknown(why) => format!("unknown ({why})"),
        };
        ok &= matches!(l.result, LemmaResult::Proved(_));
        let _ = writeln!(out, "lemma {}: {word}", l.lemma);
    }
    let _ = writeln!(out, "lemmas: {} of {} checked", reports.iter().filter(|l| matches!(l.result, LemmaResult::Proved(_))).count(), problem.lemmas.len());
    Ok(if ok { EXIT_SAT } else { EXIT_LEMMA })
}

fn replay(cli: &Cli, out: &mut dyn Write, cert: &Path, problem: &Path) -> Result<i32, Failure> {
    let problem = load(problem)?;
    let text = std::fs::read_to_string(cert).map_err(|e| input_error(cert, e))?;
    match certificate::replay_text(&text, &problem, &smt_config(cli)) {
        Ok(ReplayResult::Verified) => {
            let _ = writeln!(out, "replay: verified");
            let _ = writeln!(out, "result: sat");
            Ok(EXIT_SAT)
        }
        Ok(ReplayResult::Rejected { reason, path }) => {
            let _ = writeln!(out, "replay: rejected at {path}: {reason}");
            let _ = writeln!(out, "result: unknown");
            Ok(EXIT_UNKNOWN)
        }
        Err(CertificateError::Smt(e)) => Err(solver_error(e)),
        Err(e) => Err(input_error(cert, e)),
    }
}

fn oracle(out: &mut dyn Write, input: &Path, bound: u64, iterations: usize) -> Result<i32, Failure> {
    let problem = load(input)?;
    let model = bounded_least_model(&problem.hccs, bound, iterations);
    let _ = write!(out, "{}", model.dump());
    let violations = goal_violations(&problem.hccs, &model, bound);
    let _ = writeln!(out, "; {} ground atoms, {} goal violation(s) in the box", model.len(), violations.len());
    if let Some(v) = violations.first() {
        let _ = write!(out, "{v}");
    }
    Ok(EXIT_SAT)
}

fn bench(cli: &Cli, out: &mut dyn Write, dir: &Path, search: &SearchArgs) -> Result<i32, Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| input_error(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ihcs"))
        .collect();
    files.sort();
    let _ = writeln!(out, "{:<4} {:<28} {:<8} {:<8} {:>9}  ok", "id", "problem", "expect", "result", "time(s)");
    let mut all_ok = true;
    for path in files {
        let problem = load(&path)?;
        let cfg = solve_config(smt_config(cli), search, &problem);
        let start = Instant::now();
        let report = solve_hccs(&problem, &cfg).map_err(solver_error)?;
        let secs = start.elapsed().as_secs_f64();
        let word = report.verdict.result_word();
        let expect = problem.options.get("expect").map(String::as_str).unwrap_or("-");
        let ok = expect == "-" || expect == word;
        all_ok &= ok;
        let id = problem.options.get("id").map(String::as_str).unwrap_or("-");
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let mark = if ok { "yes" } else { "NO" };
        let _ = writeln!(out, "{id:<4} {name:<28} {expect:<8} {word:<8} {secs:>9.3}  {mark}");
    }
    Ok(if all_ok { EXIT_SAT } else { EXIT_UNKNOWN })
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let env = env_logger::Env::default().filter_or("RUST_LOG", format!("ihc={level}"));
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Runs the command line `args` (program name first), writing the report to
/// `out` and diagnostics to `err`; returns the exit code.
pub fn run(args: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    init_logging(cli.verbose);
    let result = match &cli.command {
        Command::Solve { input, search, certificate, cex } => {
            solve(&cli, out, input, search, certificate.as_deref(), cex.as_deref())
        }
        Command::CheckLemmas { input, search } => lemmas(&cli, out, input, search),
        Command::Replay { certificate, problem } => replay(&cli, out, certificate, problem),
        Command::Oracle { input, bound, iterations } => oracle(out, input, *bound, *iterations),
        Command::Bench { dir, search } => bench(&cli, out, dir, search),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}
