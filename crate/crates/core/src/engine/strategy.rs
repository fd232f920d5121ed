//! Proof search.
//!
//! At every judgment: close it with Valid⊥/ValidP if possible, otherwise
//! saturate with Apply⊥/ApplyP/Fold until no new knowledge appears, then
//! report a refutation if every atom is unfolded and the knowledge is
//! satisfiable, and otherwise induct on the oldest atom that has been
//! neither inducted on nor unfolded and unfold it right away.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::Instant;

use crate::clause::{Atom, FreshNames, GammaEntry, Head, InductionId};
use crate::engine::instantiate::candidates;
use crate::engine::judgment::{Defs, EntryKey, Judgment, OccId, Snapshot, Source};
use crate::engine::rules::{
    apply_bot, apply_fold, apply_induct, apply_p, apply_unfold, check_valid_bot, check_valid_p, execute_step,
    instantiate_branch, Checker, RuleError, Step,
};
use crate::smt::{SatResult, SmtError, SmtSession};
use crate::term::{Formula, Ident, Model};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_inductions: u32,
    pub max_unfolds_per_branch: u32,
    pub max_rule_applications: u64,
    /// ApplyP only consumes atoms derived through fewer ApplyP/Fold steps.
    pub max_derived_depth: u32,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_inductions: 4, max_unfolds_per_branch: 8, max_rule_applications: 10_000, max_derived_depth: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct StrategyOptions {
    pub apply_p_replace: bool,
    pub unfold_without_induct: bool,
    pub deadline: Option<Instant>,
    /// Drop inductions whose hypothesis is never used from finished proofs.
    pub prune: bool,
    pub candidate_cap: usize,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions {
            apply_p_replace: false,
            unfold_without_induct: false,
            deadline: None,
            prune: true,
            candidate_cap: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub snapshot: Snapshot,
    pub step: Step,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a ProofNode)) {
        f(self);
        self.children.iter().for_each(|c| c.walk(f));
    }

    /// Number of nodes per rule name.
    pub fn rule_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        self.walk(&mut |n| *out.entry(n.step.name()).or_default() += 1);
        out
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoalOutcome {
    Proved(ProofNode),
    Refuted(Model),
    Unknown(String),
}

pub struct Prover<'a> {
    smt: &'a mut SmtSession,
    limits: SearchLimits,
    opts: StrategyOptions,
    fresh: FreshNames,
    next_alpha: u32,
    applications: u64,
    root_vars: BTreeSet<Ident>,
    /// Applications that failed or added nothing, with the judgment
    /// revision they were tried at.
    failed: BTreeMap<(Source, crate::term::Substitution), u64>,
    next_revision: u64,
}

enum Node {
    Proved(ProofNode),
    Refuted(Model),
    Unknown(String),
}

fn limit(msg: impl Into<String>) -> Node {
    Node::Unknown(format!("limit: {}", msg.into()))
}

impl<'a> Prover<'a> {
    pub fn new(smt: &'a mut SmtSession, limits: SearchLimits, opts: StrategyOptions, root: &Judgment) -> Self {
        let fresh = FreshNames::above(root.used_names().iter());
        Prover {
            smt,
            limits,
            opts,
            fresh,
            next_alpha: 0,
            applications: 0,
            root_vars: root.fvs(),
            failed: BTreeMap::new(),
            next_revision: 1,
        }
    }

    fn stamp(&mut self, j: &mut Judgment) {
        j.revision = self.next_revision;
        self.next_revision += 1;
    }

    fn checker(&mut self) -> Checker<'_> {
        Checker { smt: self.smt, strict: false }
    }

    fn budget_left(&self) -> Option<Node> {
        if self.applications >= self.limits.max_rule_applications {
            return Some(limit("rule applications exhausted"));
        }
        if self.opts.deadline.is_some_and(|d| Instant::now() >= d) {
            return Some(limit("timeout"));
        }
        None
    }

    pub fn prove(mut self, root: Judgment) -> Result<GoalOutcome, SmtError> {
        let outcome = match self.node(root.clone()) {
            Ok(n) => n,
            Err(RuleError::Smt(e)) => return Err(e),
            Err(RuleError::NotApplicable(m)) => Node::Unknown(format!("internal: {m}")),
        };
        Ok(match outcome {
            Node::Proved(tree) => {
                let tree = if self.opts.prune { self.prune(&root, tree)? } else { tree };
                GoalOutcome::Proved(tree)
            }
            Node::Refuted(m) => GoalOutcome::Refuted(m),
            Node::Unknown(r) => GoalOutcome::Unknown(r),
        })
    }

    fn closes(&mut self, j: &Judgment) -> Result<Option<Step>, RuleError> {
        let mut chk = self.checker();
        Ok(match j.target {
            Head::Bottom if check_valid_bot(&mut chk, j)? => Some(Step::ValidBot),
            Head::Atom(_) if check_valid_p(&mut chk, j)? => Some(Step::ValidP),
            _ => None,
        })
    }

    fn node(&mut self, mut j: Judgment) -> Result<Node, RuleError> {
        let mut chain: Vec<(Snapshot, Step)> = Vec::new();
        let finish = |chain: Vec<(Snapshot, Step)>, last: ProofNode| {
            chain.into_iter().rev().fold(last, |child, (snapshot, step)| ProofNode {
                snapshot,
                step,
                children: vec![child],
            })
        };
        loop {
            if let Some(stop) = self.budget_left() {
                return Ok(stop);
            }
            if let Some(step) = self.closes(&j)? {
                self.applications += 1;
                log::trace!("{} at {j}", step.name());
                let leaf = ProofNode { snapshot: j.snapshot(), step, children: vec![] };
                return Ok(Node::Proved(finish(chain, leaf)));
            }
            if let Some((step, next)) = self.saturate_once(&j)? {
                self.applications += 1;
                log::trace!("{} at {}", step.name(), j);
                chain.push((j.snapshot(), step));
                j = next;
                self.stamp(&mut j);
                continue;
            }
            if j.target == Head::Bottom && j.atoms.iter().all(|o| o.atom.unfolded) {
                match self.smt.check_sat(&j.phi())? {
                    SatResult::Sat(m) => {
                        let model = self
                            .root_vars
                            .iter()
                            .map(|v| (v.clone(), m.get(v).cloned().unwrap_or_default()))
                            .collect();
                        return Ok(Node::Refuted(model));
                    }
                    SatResult::Unsat => {}
                    SatResult::Unknown(r) => return Ok(Node::Unknown(format!("smt-unknown: {r}"))),
                }
            }
            if j.unfolds >= self.limits.max_unfolds_per_branch {
                return Ok(limit("unfolds per branch exhausted"));
            }
            let pick = j.atoms.iter().find(|o| o.atom.inducted.is_none() && !o.atom.unfolded).map(|o| o.id);
            let occ = if j.inductions < self.limits.max_inductions {
                match pick {
                    Some(occ) => {
                        let (step, next) = self.induct(&j, occ)?;
                        self.applications += 1;
                        log::trace!("Induct {occ:?} at {j}");
                        chain.push((j.snapshot(), step));
                        j = next;
                        self.stamp(&mut j);
                        occ
                    }
                    None => return Ok(Node::Unknown("no applicable rule".into())),
                }
            } else if self.opts.unfold_without_induct {
                match j.atoms.iter().find(|o| !o.atom.unfolded) {
                    Some(o) => o.id,
                    None => return Ok(Node::Unknown("no applicable rule".into())),
                }
            } else {
                return Ok(limit("inductions per branch exhausted"));
            };
            if let Some(stop) = self.budget_left() {
                return Ok(stop);
            }
            let (step, children) = self.unfold(&j, occ)?;
            self.applications += 1;
            log::trace!("Unfold {occ:?} into {} premises", children.len());
            let snapshot = j.snapshot();
            let mut proofs = Vec::with_capacity(children.len());
            let mut unknown = None;
            for mut child in children {
                self.stamp(&mut child);
                match self.node(child)? {
                    Node::Proved(p) => proofs.push(p),
                    Node::Refuted(m) => return Ok(Node::Refuted(m)),
                    Node::Unknown(r) => {
                        log::trace!("branch unknown: {r}");
                        if unknown.is_none() {
                            unknown = Some(r);
                        }
                    }
                }
            }
            if let Some(r) = unknown {
                return Ok(Node::Unknown(r));
            }
            let last = ProofNode { snapshot, step, children: proofs };
            return Ok(Node::Proved(finish(chain, last)));
        }
    }

    fn induct(&mut self, j: &Judgment, occ: OccId) -> Result<(Step, Judgment), RuleError> {
        let alpha = InductionId(self.next_alpha);
        self.next_alpha += 1;
        let renaming = self.fresh.freshen(j.fvs().iter());
        let next = apply_induct(j, occ, alpha, &renaming)?;
        Ok((Step::Induct { occ, alpha, renaming }, next))
    }

    fn unfold(&mut self, j: &Judgment, occ: OccId) -> Result<(Step, Vec<Judgment>), RuleError> {
        let atom = j.occurrence(occ).expect("picked occurrence").atom.atom.clone();
        let n = j.defs.definitions.get(&atom.pred).map_or(0, |d| d.branches.len());
        let mut renamings = Vec::with_capacity(n);
        for i in 0..n {
            let (_, _, survivors) = instantiate_branch(j, &atom.pred, i, &atom.args, None)?;
            renamings.push(self.fresh.freshen(survivors.iter()));
        }
        let children = apply_unfold(j, occ, &renamings)?;
        Ok((Step::Unfold { occ, renamings }, children))
    }

    fn sources(&self, j: &Judgment) -> Vec<Source> {
        let mut out: Vec<Source> = j.gamma.iter().map(|(k, _)| Source::Entry(*k)).collect();
        if let Head::Atom(t) = &j.target {
            out.extend(j.defs.hccs.clauses_of(&t.pred).map(|(i, _)| Source::Clause(i)));
        }
        out
    }

    /// One Apply⊥/ApplyP/Fold application that yields new knowledge.
    fn saturate_once(&mut self, j: &Judgment) -> Result<Option<(Step, Judgment)>, RuleError> {
        for source in self.sources(j) {
            let is_p = match source {
                Source::Entry(k) => matches!(j.entry(k).map(|e| &e.conclusion), Some(Head::Atom(_))),
                Source::Clause(_) => false,
            };
            let max_depth = self.limits.max_derived_depth;
            // replacing lemma applications rewrite the conjecture only
            let rewrite = self.opts.apply_p_replace && is_p && matches!(source, Source::Entry(EntryKey::Lemma(_)));
            let allow = move |o: &crate::engine::judgment::Occurrence| {
                (!is_p || o.depth < max_depth) && (!rewrite || (o.atom.marks.is_empty() && o.atom.inducted.is_none()))
            };
            for cand in candidates(j, source, &allow, self.opts.candidate_cap) {
                if self.opts.deadline.is_some_and(|d| Instant::now() >= d) {
                    return Ok(None);
                }
                let memo_key = (source, cand.sigma.clone());
                if self.failed.get(&memo_key) == Some(&j.revision) {
                    continue;
                }
                let mut chk = self.checker();
                let result = match source {
                    Source::Entry(key) if !is_p => apply_bot(&mut chk, j, key, &cand.sigma)
                        .map(|(n, c)| (Step::ApplyBot { entry: key, sigma: cand.sigma.clone() }, n, c)),
                    Source::Entry(key) => {
                        let replace = if rewrite { cand.matched.first().copied() } else { None };
                        apply_p(&mut chk, j, key, &cand.sigma, replace)
                            .map(|(n, c)| (Step::ApplyP { entry: key, sigma: cand.sigma.clone(), replace }, n, c))
                    }
                    Source::Clause(i) => apply_fold(&mut chk, j, i, &cand.sigma)
                        .map(|(n, c)| (Step::Fold { clause: i, sigma: cand.sigma.clone() }, n, c)),
                };
                match result {
                    Ok((step, next, true)) => return Ok(Some((step, next))),
                    Ok((_, _, false)) | Err(RuleError::NotApplicable(_)) => {
                        self.failed.insert(memo_key, j.revision);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(None)
    }

    /// Removes inductions whose hypotheses are never applied and replays
    /// the remaining steps to refresh the recorded judgments.
    fn prune(&mut self, root: &Judgment, tree: ProofNode) -> Result<ProofNode, SmtError> {
        let mut used = BTreeSet::new();
        tree.walk(&mut |n| {
            if let Step::ApplyBot { entry: EntryKey::Hyp(a), .. } | Step::ApplyP { entry: EntryKey::Hyp(a), .. } = &n.step {
                used.insert(*a);
            }
        });
        let pruned = strip_inductions(tree.clone(), &used);
        if pruned.size() == tree.size() {
            return Ok(tree);
        }
        let mut chk = Checker { smt: self.smt, strict: false };
        match rebuild(&mut chk, root, &pruned) {
            Ok(t) => Ok(t),
            Err(RuleError::Smt(e)) => Err(e),
            Err(RuleError::NotApplicable(m)) => {
                log::debug!("keeping unpruned proof: {m}");
                Ok(tree)
            }
        }
    }
}

fn strip_inductions(node: ProofNode, used: &BTreeSet<InductionId>) -> ProofNode {
    match &node.step {
        Step::Induct { alpha, .. } if !used.contains(alpha) => {
            let child = node.children.into_iter().next().expect("induct has one premise");
            strip_inductions(child, used)
        }
        _ => ProofNode {
            snapshot: node.snapshot,
            step: node.step,
            children: node.children.into_iter().map(|c| strip_inductions(c, used)).collect(),
        },
    }
}

/// Re-executes the steps of `node` from `j`, recording fresh snapshots.
pub fn rebuild(chk: &mut Checker<'_>, j: &Judgment, node: &ProofNode) -> Result<ProofNode, RuleError> {
    let premises = execute_step(chk, j, &node.step)?;
    if premises.len() != node.children.len() {
        return Err(RuleError::NotApplicable(format!(
            "{} yields {} premises, tree has {}",
            node.step.name(),
            premises.len(),
            node.children.len()
        )));
    }
    let children = premises
        .iter()
        .zip(&node.children)
        .map(|(p, c)| rebuild(chk, p, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProofNode { snapshot: j.snapshot(), step: node.step.clone(), children })
}

/// Proves `D; Γ0; atoms^{∅,◦}; formula ⊢ target`.
pub fn solve_goal(
    smt: &mut SmtSession,
    defs: Arc<Defs>,
    gamma0: &[GammaEntry],
    atoms: &[Atom],
    formula: &Formula,
    target: Head,
    limits: SearchLimits,
    opts: StrategyOptions,
) -> Result<GoalOutcome, SmtError> {
    let root = Judgment::root(defs, gamma0, atoms, formula, target);
    Prover::new(smt, limits, opts, &root).prove(root)
}

/// Checks a user lemma with the earlier lemmas available.
pub fn check_lemma(
    smt: &mut SmtSession,
    defs: Arc<Defs>,
    lemma: &GammaEntry,
    prior: &[GammaEntry],
    limits: SearchLimits,
    opts: StrategyOptions,
) -> Result<GoalOutcome, SmtError> {
    solve_goal(
        smt,
        defs,
        prior,
        &lemma.premise_atoms,
        &lemma.premise_formula,
        lemma.conclusion.clone(),
        limits,
        opts,
    )
}
