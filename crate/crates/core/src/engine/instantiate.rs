//! Search for substitutions instantiating a Γ entry or definite clause in a
//! judgment.
//!
//! Premise atoms are matched against atoms of the judgment. A pattern
//! argument that is a variable binds it; a compound argument with a single
//! unbound variable of unit coefficient is solved for it. Anything else is
//! left to the side conditions, which are checked by the rule itself.

use std::collections::BTreeSet;

use crate::clause::{Atom, Guard, Head};
use crate::engine::judgment::{Judgment, OccId, Occurrence, Source};
use crate::engine::rules::{apply_bot, apply_fold, apply_p, Checker, RuleError};
use crate::smt::SmtError;
use crate::term::{Ident, Poly, Substitution, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub sigma: Substitution,
    /// Occurrence matched by each pattern atom, pivot first.
    pub matched: Vec<OccId>,
}

/// Applies bindings and solves what can be solved. `None` on a definite
/// clash; otherwise the equations still mentioning unbound variables.
fn solve(vars: &BTreeSet<Ident>, sigma: &mut Substitution, mut eqs: Vec<(Term, Term)>) -> Option<Vec<(Term, Term)>> {
    loop {
        let mut progress = false;
        let mut rest = Vec::with_capacity(eqs.len());
        for (p, t) in eqs {
            let p1 = sigma.apply_term(&p);
            let unbound: Vec<Ident> = p1.fvs().into_iter().filter(|v| vars.contains(v)).collect();
            if unbound.is_empty() {
                let diff = Poly::from_term(&p1).minus(&Poly::from_term(&t));
                if let Some(c) = diff.as_constant() {
                    if c != 0.into() {
                        return None;
                    }
                }
                continue;
            }
            if let Term::Var(v) = &p1 {
                sigma.insert(v.clone(), t);
                progress = true;
                continue;
            }
            if unbound.len() == 1 {
                let v = &unbound[0];
                let diff = Poly::from_term(&p1).minus(&Poly::from_term(&t));
                if let Some((pos, others)) = diff.isolate(v) {
                    let value = if pos { others.scale(&num_bigint::BigInt::from(-1)) } else { others };
                    sigma.insert(v.clone(), value.to_term());
                    progress = true;
                    continue;
                }
            }
            rest.push((p, t));
        }
        eqs = rest;
        if !progress {
            return Some(eqs);
        }
    }
}

const SEARCH_NODES_PER_CANDIDATE: usize = 64;

struct Pattern {
    atom: Atom,
    alpha: Option<crate::clause::InductionId>,
}

struct Search<'a> {
    j: &'a Judgment,
    vars: BTreeSet<Ident>,
    patterns: Vec<Pattern>,
    allow: &'a dyn Fn(&Occurrence) -> bool,
    cap: usize,
    /// Remaining search nodes; the product of matches can be huge.
    budget: usize,
    out: Vec<Candidate>,
    seen: BTreeSet<Substitution>,
}

impl Search<'_> {
    fn go(&mut self, idx: usize, sigma: Substitution, pending: Vec<(Term, Term)>, matched: Vec<OccId>) {
        if self.out.len() >= self.cap || self.budget == 0 {
            return;
        }
        self.budget -= 1;
        if idx == self.patterns.len() {
            if !pending.is_empty() || self.vars.iter().any(|v| !sigma.contains(v)) {
                return;
            }
            if self.seen.insert(sigma.clone()) {
                self.out.push(Candidate { sigma, matched });
            }
            return;
        }
        let (pat_atom, pat_alpha) = (self.patterns[idx].atom.clone(), self.patterns[idx].alpha);
        let j = self.j;
        for o in &j.atoms {
            if o.atom.atom.pred != pat_atom.pred || o.atom.atom.args.len() != pat_atom.args.len() {
                continue;
            }
            if pat_alpha.is_some_and(|a| !o.atom.marks.contains(&a)) || !(self.allow)(o) {
                continue;
            }
            let mut eqs = pending.clone();
            eqs.extend(pat_atom.args.iter().cloned().zip(o.atom.atom.args.iter().cloned()));
            let mut s = sigma.clone();
            if let Some(rest) = solve(&self.vars, &mut s, eqs) {
                let mut m = matched.clone();
                m.push(o.id);
                self.go(idx + 1, s, rest, m);
            }
        }
    }
}

/// Syntactic candidates for `source`, excluding already applied ones.
/// `allow` filters the atoms premise atoms may match.
pub fn candidates(j: &Judgment, source: Source, allow: &dyn Fn(&Occurrence) -> bool, cap: usize) -> Vec<Candidate> {
    let mut patterns = Vec::new();
    let mut vars = BTreeSet::new();
    let mut sigma = Substitution::new();
    let mut pending = Vec::new();
    match source {
        Source::Entry(key) => {
            let Some(entry) = j.entry(key) else { return vec![] };
            entry.premise_atoms.iter().for_each(|a| a.collect_vars(&mut vars));
            let mut rest = entry.premise_atoms.clone();
            if let Guard::Hyp { alpha, pivot } = &entry.guard {
                if let Some(i) = rest.iter().position(|a| a == pivot) {
                    rest.remove(i);
                }
                patterns.push(Pattern { atom: pivot.clone(), alpha: Some(*alpha) });
            }
            patterns.extend(rest.into_iter().map(|atom| Pattern { atom, alpha: None }));
            if let Head::Atom(c) = &entry.conclusion {
                c.collect_vars(&mut vars);
            }
        }
        Source::Clause(i) => {
            let Some(clause) = j.defs.hccs.definite.get(i) else { return vec![] };
            let head = clause.head.as_atom().expect("definite clause");
            let Head::Atom(target) = &j.target else { return vec![] };
            if target.pred != head.pred {
                return vec![];
            }
            clause.body_atoms.iter().for_each(|a| a.collect_vars(&mut vars));
            head.collect_vars(&mut vars);
            let eqs = head.args.iter().cloned().zip(target.args.iter().cloned()).collect();
            match solve(&vars, &mut sigma, eqs) {
                Some(rest) => pending = rest,
                None => return vec![],
            }
            patterns.extend(clause.body_atoms.iter().map(|a| Pattern { atom: a.clone(), alpha: None }));
        }
    }
    let budget = cap.saturating_mul(SEARCH_NODES_PER_CANDIDATE);
    let mut search = Search { j, vars, patterns, allow, cap, budget, out: Vec::new(), seen: BTreeSet::new() };
    search.go(0, sigma, pending, Vec::new());
    search.out.retain(|c| !j.applied.contains(&(source, c.sigma.clone())));
    search.out
}

/// Candidates whose side conditions hold.
pub fn find_instantiations(
    chk: &mut Checker<'_>,
    j: &Judgment,
    source: Source,
    cap: usize,
) -> Result<Vec<Substitution>, SmtError> {
    let mut out = Vec::new();
    for c in candidates(j, source, &|_| true, cap) {
        let res = match source {
            Source::Entry(key) => match j.entry(key).map(|e| &e.conclusion) {
                Some(Head::Bottom) => apply_bot(chk, j, key, &c.sigma).map(|_| ()),
                Some(Head::Atom(_)) => apply_p(chk, j, key, &c.sigma, None).map(|_| ()),
                None => continue,
            },
            Source::Clause(i) => apply_fold(chk, j, i, &c.sigma).map(|_| ()),
        };
        match res {
            Ok(()) => out.push(c.sigma),
            Err(RuleError::NotApplicable(_)) => {}
            Err(RuleError::Smt(e)) => return Err(e),
        }
    }
    Ok(out)
}
