//! Whole-problem driver: lemmas first, then every goal clause.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::clause::{GammaEntry, Hccs};
use crate::engine::judgment::Defs;
use crate::engine::strategy::{check_lemma, solve_goal, GoalOutcome, ProofNode, SearchLimits, StrategyOptions};
use crate::frontend::ProblemFile;
use crate::oracle::{validate_counterexample, Counterexample, DEFAULT_VALIDATION_DEPTH};
use crate::smt::{SmtConfig, SmtError, SmtSession, SmtStats};
use crate::term::Model;

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub smt: SmtConfig,
    pub limits: SearchLimits,
    pub strategy: StrategyOptions,
    /// Whole-run budget.
    pub timeout: Option<Duration>,
    pub jobs: usize,
    pub validation_depth: u32,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            smt: SmtConfig::default(),
            limits: SearchLimits::default(),
            strategy: StrategyOptions::default(),
            timeout: Some(Duration::from_secs(60)),
            jobs: 1,
            validation_depth: DEFAULT_VALIDATION_DEPTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoalResult {
    Proved(ProofNode),
    Refuted(Counterexample),
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct GoalReport {
    pub goal: usize,
    pub result: GoalResult,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub enum LemmaResult {
    Proved(ProofNode),
    Refuted(Model),
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub lemma: usize,
    pub result: LemmaResult,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Solvable,
    Unsolvable { goal: usize, cex: Counterexample },
    Unknown(String),
    LemmaRejected { lemma: usize, reason: String },
}

impl Verdict {
    /// `sat` means the HCCS has a solution.
    pub fn result_word(&self) -> &'static str {
        match self {
            Verdict::Solvable => "sat",
            Verdict::Unsolvable { .. } => "unsat",
            Verdict::Unknown(_) | Verdict::LemmaRejected { .. } => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub verdict: Verdict,
    pub lemmas: Vec<LemmaReport>,
    pub goals: Vec<GoalReport>,
    pub smt: SmtStats,
}

impl SolveReport {
    /// Proof trees of the lemmas and goals, in order, when all were proved.
    pub fn proofs(&self) -> Option<(Vec<ProofNode>, Vec<ProofNode>)> {
        let lemmas = self
            .lemmas
            .iter()
            .map(|l| match &l.result {
                LemmaResult::Proved(p) => Some(p.clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        let goals = self
            .goals
            .iter()
            .map(|g| match &g.result {
                GoalResult::Proved(p) => Some(p.clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some((lemmas, goals))
    }
}

fn add_stats(total: &mut SmtStats, s: SmtStats) {
    total.queries += s.queries;
    total.cache_hits += s.cache_hits;
    total.solver_calls += s.solver_calls;
    total.restarts += s.restarts;
}

/// Checks each lemma with the earlier ones available.
pub fn check_lemmas(problem: &ProblemFile, cfg: &SolveConfig) -> Result<(Vec<LemmaReport>, SmtStats), SmtError> {
    let defs = Defs::new(&problem.hccs);
    let mut stats = SmtStats::default();
    let mut out = Vec::new();
    let opts = StrategyOptions { deadline: cfg.timeout.map(|t| Instant::now() + t), ..cfg.strategy.clone() };
    for (i, lemma) in problem.lemmas.iter().enumerate() {
        let mut smt = SmtSession::new(cfg.smt.clone());
        let outcome = check_lemma(&mut smt, defs.clone(), lemma, &problem.lemmas[..i], cfg.limits, opts.clone())?;
        add_stats(&mut stats, smt.stats());
        let result = match outcome {
            GoalOutcome::Proved(p) => LemmaResult::Proved(p),
            GoalOutcome::Refuted(m) => LemmaResult::Refuted(m),
            GoalOutcome::Unknown(r) => LemmaResult::Unknown(r),
        };
        let stop = !matches!(result, LemmaResult::Proved(_));
        out.push(LemmaReport { lemma: i, result });
        if stop {
            break;
        }
    }
    Ok((out, stats))
}

fn solve_one(
    hccs: &Hccs,
    defs: &std::sync::Arc<Defs>,
    lemmas: &[GammaEntry],
    goal: usize,
    cfg: &SolveConfig,
    opts: &StrategyOptions,
) -> Result<(GoalReport, SmtStats), SmtError> {
    let start = Instant::now();
    let clause = &hccs.goals[goal];
    let mut smt = SmtSession::new(cfg.smt.clone());
    let outcome = solve_goal(
        &mut smt,
        defs.clone(),
        lemmas,
        &clause.body_atoms,
        &clause.body_formula,
        clause.head.clone(),
        cfg.limits,
        opts.clone(),
    )?;
    let result = match outcome {
        GoalOutcome::Proved(p) => GoalResult::Proved(p),
        GoalOutcome::Unknown(r) => GoalResult::Unknown(r),
        GoalOutcome::Refuted(mut model) => {
            for v in &clause.vars {
                model.entry(v.clone()).or_default();
            }
            let cex = Counterexample { goal, model };
            if validate_counterexample(hccs, &cex, cfg.validation_depth, Some(&mut smt)) {
                GoalResult::Refuted(cex)
            } else {
                log::warn!("goal {goal}: candidate counterexample failed validation");
                GoalResult::Unknown("counterexample not validated".into())
            }
        }
    };
    Ok((GoalReport { goal, result, elapsed: start.elapsed() }, smt.stats()))
}

/// Decides the problem: lemmas are checked in order and the problem is
/// rejected if one fails; goals are then solved with the lemmas as the
/// initial hypotheses.
pub fn solve_hccs(problem: &ProblemFile, cfg: &SolveConfig) -> Result<SolveReport, SmtError> {
    let start = Instant::now();
    let (lemmas, mut stats) = check_lemmas(problem, cfg)?;
    if let Some(bad) = lemmas.iter().find(|l| !matches!(l.result, LemmaResult::Proved(_))) {
        let reason = match &bad.result {
            LemmaResult::Refuted(m) => {
                let vals: Vec<String> = m.iter().map(|(v, n)| format!("{v}={n}")).collect();
                format!("refuted by {{{}}}", vals.join(", "))
            }
            LemmaResult::Unknown(r) => r.clone(),
            LemmaResult::Proved(_) => unreachable!(),
        };
        let verdict = Verdict::LemmaRejected { lemma: bad.lemma, reason };
        return Ok(SolveReport { verdict, lemmas, goals: Vec::new(), smt: stats });
    }
    let hccs = &problem.hccs;
    let defs = Defs::new(hccs);
    let opts = StrategyOptions { deadline: cfg.timeout.map(|t| start + t), ..cfg.strategy.clone() };
    let n = hccs.goals.len();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Result<(GoalReport, SmtStats), SmtError>>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..cfg.jobs.clamp(1, n.max(1)) {
            scope.spawn(|| loop {
                let goal = next.fetch_add(1, Ordering::SeqCst);
                if goal >= n {
                    break;
                }
                let r = solve_one(hccs, &defs, &problem.lemmas, goal, cfg, &opts);
                results.lock().unwrap().push(r);
            });
        }
    });
    let mut goals = Vec::with_capacity(n);
    for r in results.into_inner().unwrap() {
        let (report, s) = r?;
        add_stats(&mut stats, s);
        goals.push(report);
    }
    goals.sort_by_key(|g| g.goal);
    let verdict = if let Some((goal, cex)) = goals.iter().find_map(|g| match &g.result {
        GoalResult::Refuted(c) => Some((g.goal, c.clone())),
        _ => None,
    }) {
        Verdict::Unsolvable { goal, cex }
    } else if let Some(r) = goals.iter().find_map(|g| match &g.result {
        GoalResult::Unknown(r) => Some(r.clone()),
        _ => None,
    }) {
        Verdict::Unknown(r)
    } else {
        Verdict::Solvable
    };
    Ok(SolveReport { verdict, lemmas, goals, smt: stats })
}
