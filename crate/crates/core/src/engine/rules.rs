//! The inference rules. Each function checks the rule's side conditions
//! and returns the premise judgments.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::clause::{in_encoding, sub_encoding, AnnotatedAtom, Atom, GammaEntry, Guard, Head, InTarget, InductionId};
use crate::engine::judgment::{atom_key, EntryKey, Judgment, OccId, Source};
use crate::smt::{SmtError, SmtSession};
use crate::term::{Formula, Ident, Poly, Substitute, Substitution, Term};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rule not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Smt(#[from] SmtError),
}

fn na<T>(msg: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::NotApplicable(msg.into()))
}

/// One proof step, with everything needed to re-execute it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Step {
    Induct { occ: OccId, alpha: InductionId, renaming: Vec<(Ident, Ident)> },
    Unfold { occ: OccId, renamings: Vec<Vec<(Ident, Ident)>> },
    ApplyBot { entry: EntryKey, sigma: Substitution },
    ApplyP { entry: EntryKey, sigma: Substitution, replace: Option<OccId> },
    Fold { clause: usize, sigma: Substitution },
    ValidBot,
    ValidP,
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Induct { .. } => "Induct",
            Step::Unfold { .. } => "Unfold",
            Step::ApplyBot { .. } => "ApplyBot",
            Step::ApplyP { .. } => "ApplyP",
            Step::Fold { .. } => "Fold",
            Step::ValidBot => "ValidBot",
            Step::ValidP => "ValidP",
        }
    }
}

/// Discharges validity side conditions. In strict mode every obligation
/// goes to the solver; otherwise syntactically evident ones are accepted
/// directly.
pub struct Checker<'a> {
    pub smt: &'a mut SmtSession,
    pub strict: bool,
}

impl Checker<'_> {
    /// `⊨ φ ⇒ goal`; an unknown answer counts as not valid.
    pub fn entails(&mut self, j: &Judgment, goal: &Formula) -> Result<bool, SmtError> {
        if !self.strict && (*goal == Formula::True || j.knows(goal)) {
            return Ok(true);
        }
        self.smt.is_valid(&j.phi(), goal)
    }

    /// `⊨ φ ⇒ ⌊target ∈ A⌋`
    pub fn member(&mut self, j: &Judgment, target: InTarget<'_>) -> Result<bool, SmtError> {
        if !self.strict {
            let syntactic = match target {
                InTarget::Lemma => true,
                InTarget::Atom(a) => {
                    let k = atom_key(a);
                    j.atoms.iter().any(|o| atom_key(&o.atom.atom) == k)
                }
                InTarget::Hyp(alpha, a) => {
                    let k = atom_key(a);
                    j.atoms.iter().any(|o| o.atom.marks.contains(&alpha) && atom_key(&o.atom.atom) == k)
                }
            };
            if syntactic {
                return Ok(true);
            }
        }
        let enc = in_encoding(target, j.annotated());
        if enc == Formula::False {
            return Ok(false);
        }
        self.smt.is_valid(&j.phi(), &enc)
    }

    /// `⊨ φ ⇒ ⌊A1 ⊆ A⌋`
    pub fn subset(&mut self, j: &Judgment, a1: &[Atom]) -> Result<bool, SmtError> {
        if self.strict {
            let enc = sub_encoding(a1, j.annotated());
            if enc.conjuncts().contains(&Formula::False) {
                return Ok(false);
            }
            return self.smt.is_valid(&j.phi(), &enc);
        }
        for a in a1 {
            if !self.member(j, InTarget::Atom(a))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn guard_target<'a>(entry: &'a GammaEntry, sigma_pivot: &'a Option<Atom>) -> InTarget<'a> {
    match (&entry.guard, sigma_pivot) {
        (Guard::Hyp { alpha, .. }, Some(p)) => InTarget::Hyp(*alpha, p),
        _ => InTarget::Lemma,
    }
}

fn check_domain(sigma: &Substitution, expected: &BTreeSet<Ident>) -> Result<(), RuleError> {
    if &sigma.domain() != expected {
        return na(format!(
            "substitution domain {:?} differs from required {:?}",
            sigma.domain(),
            expected
        ));
    }
    Ok(())
}

fn check_fresh(j: &Judgment, renaming: &[(Ident, Ident)], expected_domain: &BTreeSet<Ident>) -> Result<(), RuleError> {
    let domain: BTreeSet<Ident> = renaming.iter().map(|(a, _)| a.clone()).collect();
    if &domain != expected_domain || domain.len() != renaming.len() {
        return na("renaming does not cover exactly the variables to be freshened");
    }
    let used = j.used_names();
    let mut targets = BTreeSet::new();
    for (_, t) in renaming {
        if used.contains(t) || !targets.insert(t.clone()) || !t.is_reserved() {
            return na(format!("renamed variable `{t}` is not fresh"));
        }
    }
    Ok(())
}

/// Induct: mint `alpha` for the occurrence and add the hypothesis
/// `(alpha ▷ P(t̄), A, φ, h)` with variables renamed by `renaming`.
pub fn apply_induct(
    j: &Judgment,
    occ: OccId,
    alpha: InductionId,
    renaming: &[(Ident, Ident)],
) -> Result<Judgment, RuleError> {
    let Some(o) = j.occurrence(occ) else { return na(format!("no atom occurrence {occ:?}")) };
    if o.atom.inducted.is_some() {
        return na("atom has already been inducted on");
    }
    if j.used_alphas().contains(&alpha) {
        return na(format!("induction identifier {alpha} is not fresh"));
    }
    check_fresh(j, renaming, &j.fvs())?;
    let s = Substitution::renaming(renaming);
    let pivot = o.atom.atom.substitute(&s);
    let entry = GammaEntry {
        guard: Guard::Hyp { alpha, pivot },
        premise_atoms: j
            .atoms
            .iter()
            .filter(|a| a.id == occ || !a.implied)
            .map(|a| a.atom.atom.substitute(&s))
            .collect(),
        premise_formula: j.phi().substitute(&s),
        conclusion: j.target.substitute(&s),
    };
    let mut next = j.clone();
    next.gamma.push((EntryKey::Hyp(alpha), Arc::new(entry)));
    next.occurrence_mut(occ).unwrap().atom.inducted = Some(alpha);
    next.inductions += 1;
    Ok(next)
}

/// Instantiates one definition branch at `args`: substitutes the
/// parameters, solves unit-coefficient equations for existential variables
/// and renames the remaining ones with `renaming`. Returns the surviving
/// existential variables when `renaming` is `None`.
pub fn instantiate_branch(
    j: &Judgment,
    pred: &Ident,
    branch: usize,
    args: &[Term],
    renaming: Option<&[(Ident, Ident)]>,
) -> Result<(Vec<Formula>, Vec<Atom>, Vec<Ident>), RuleError> {
    let def = &j.defs.definitions[pred];
    let b = &def.branches[branch];
    let mut params = Substitution::new();
    for (p, a) in def.params.iter().zip(args) {
        params.insert(p.clone(), a.clone());
    }
    let mut conj: Vec<Formula> = b.formula.substitute(&params).conjuncts();
    let mut atoms: Vec<Atom> = b.atoms.substitute(&params);
    let arg_vars: BTreeSet<Ident> = args.iter().flat_map(Term::fvs).collect();
    let mut survivors = Vec::new();
    for v in &b.exists {
        if arg_vars.contains(v) {
            return na(format!("definition variable `{v}` clashes with an argument variable"));
        }
        let solved = conj.iter().enumerate().find_map(|(i, c)| match c {
            Formula::Cmp(crate::term::CmpOp::Eq, l, r) => {
                let diff = Poly::from_term(l).minus(&Poly::from_term(r));
                diff.isolate(v).map(|(pos, rest)| {
                    let value = if pos { rest.scale(&num_bigint::BigInt::from(-1)) } else { rest };
                    (i, value.to_term())
                })
            }
            _ => None,
        });
        match solved {
            Some((i, value)) => {
                conj.remove(i);
                let s: Substitution = [(v.clone(), value)].into_iter().collect();
                conj = conj.substitute(&s);
                atoms = atoms.substitute(&s);
            }
            None => survivors.push(v.clone()),
        }
    }
    let mut present = BTreeSet::new();
    conj.iter().for_each(|c| c.collect_vars(&mut present));
    atoms.iter().for_each(|a| a.collect_vars(&mut present));
    survivors.retain(|v| present.contains(v));
    if let Some(renaming) = renaming {
        let expected: BTreeSet<Ident> = survivors.iter().cloned().collect();
        check_fresh(j, renaming, &expected)?;
        let s = Substitution::renaming(renaming);
        conj = conj.substitute(&s);
        atoms = atoms.substitute(&s);
    }
    let atoms = atoms.iter().map(Atom::simplified).collect();
    Ok((conj, atoms, survivors))
}

/// Unfold: one premise per defining clause of the occurrence's predicate.
pub fn apply_unfold(j: &Judgment, occ: OccId, renamings: &[Vec<(Ident, Ident)>]) -> Result<Vec<Judgment>, RuleError> {
    let Some(o) = j.occurrence(occ) else { return na(format!("no atom occurrence {occ:?}")) };
    let pred = o.atom.atom.pred.clone();
    let args = o.atom.atom.args.clone();
    let mut marks = o.atom.marks.clone();
    marks.extend(o.atom.inducted);
    let n = j.defs.definitions.get(&pred).map_or(0, |d| d.branches.len());
    if renamings.len() != n {
        return na(format!("predicate `{pred}` has {n} defining clauses, step lists {}", renamings.len()));
    }
    let mut children = Vec::with_capacity(n);
    for (i, renaming) in renamings.iter().enumerate() {
        let (conj, atoms, _) = instantiate_branch(j, &pred, i, &args, Some(renaming))?;
        let mut child = j.clone();
        child.occurrence_mut(occ).unwrap().atom.unfolded = true;
        for a in atoms {
            let ann = AnnotatedAtom { atom: a, marks: marks.clone(), inducted: None, unfolded: false };
            child.push_atom(ann, 0);
        }
        child.add_knowledge(&Formula::and(conj));
        child.unfolds += 1;
        children.push(child);
    }
    Ok(children)
}

fn lookup(j: &Judgment, key: EntryKey) -> Result<Arc<GammaEntry>, RuleError> {
    match j.entry(key) {
        Some(e) => Ok(e.clone()),
        None => na(format!("no Γ entry {key}")),
    }
}

fn premise_domain(atoms: &[Atom]) -> BTreeSet<Ident> {
    let mut d = BTreeSet::new();
    atoms.iter().for_each(|a| a.collect_vars(&mut d));
    d
}

fn sigma_pivot(entry: &GammaEntry, sigma: &Substitution) -> Option<Atom> {
    match &entry.guard {
        Guard::Hyp { pivot, .. } => Some(pivot.substitute(sigma)),
        Guard::Lemma => None,
    }
}

fn check_entry_premises(
    chk: &mut Checker<'_>,
    j: &Judgment,
    entry: &GammaEntry,
    sigma: &Substitution,
) -> Result<(), RuleError> {
    let pivot = sigma_pivot(entry, sigma);
    if !chk.member(j, guard_target(entry, &pivot))? {
        return na("instantiated guard is not among the marked atoms");
    }
    if !chk.subset(j, &entry.premise_atoms.substitute(sigma))? {
        return na("instantiated premise atoms are not entailed");
    }
    Ok(())
}

/// `x̄ = fvs(φ′) ∖ dom σ` and `σφ′`.
fn residual(formula: &Formula, sigma: &Substitution) -> (Vec<Ident>, Formula) {
    let xs: Vec<Ident> = formula.fvs().into_iter().filter(|v| !sigma.contains(v)).collect();
    let mut partial = sigma.clone();
    for x in &xs {
        partial.remove(x);
    }
    (xs, formula.substitute(&partial))
}

/// Apply⊥: knowledge gains `∀x̄.¬σφ′`. The flag reports whether the
/// knowledge actually changed.
pub fn apply_bot(
    chk: &mut Checker<'_>,
    j: &Judgment,
    key: EntryKey,
    sigma: &Substitution,
) -> Result<(Judgment, bool), RuleError> {
    let entry = lookup(j, key)?;
    if entry.conclusion != Head::Bottom {
        return na("entry does not conclude false");
    }
    check_domain(sigma, &premise_domain(&entry.premise_atoms))?;
    check_entry_premises(chk, j, &entry, sigma)?;
    let (xs, body) = residual(&entry.premise_formula, sigma);
    let gained = Formula::forall(xs, body.negate());
    let mut next = j.clone();
    next.applied.insert((Source::Entry(key), sigma.clone()));
    let changed = next.add_knowledge(&gained);
    Ok((next, changed))
}

fn add_derived_atom(
    j: &Judgment,
    atom: Atom,
    sources: &[Atom],
    replace: Option<OccId>,
    implied: bool,
) -> (Judgment, bool) {
    let atom = atom.simplified();
    let mut next = j.clone();
    let depth = sources
        .iter()
        .filter_map(|s| {
            let k = atom_key(s);
            j.atoms.iter().filter(|o| atom_key(&o.atom.atom) == k).map(|o| o.depth).min()
        })
        .max()
        .map_or(1, |d| d + 1);
    let fresh = !next.seen_atoms.contains(&atom_key(&atom));
    if let Some(r) = replace {
        next.atoms.retain(|o| o.id != r);
    }
    let id = next.push_atom(AnnotatedAtom::plain(atom), depth);
    next.occurrence_mut(id).unwrap().implied = implied;
    (next, fresh)
}

/// ApplyP: atoms gain `P^{∅,◦}(σt̄)`; with `replace` the given occurrence
/// is dropped.
pub fn apply_p(
    chk: &mut Checker<'_>,
    j: &Judgment,
    key: EntryKey,
    sigma: &Substitution,
    replace: Option<OccId>,
) -> Result<(Judgment, bool), RuleError> {
    let entry = lookup(j, key)?;
    let Head::Atom(concl) = &entry.conclusion else { return na("entry concludes false") };
    let mut domain = premise_domain(&entry.premise_atoms);
    concl.collect_vars(&mut domain);
    check_domain(sigma, &domain)?;
    if let Some(r) = replace {
        if j.occurrence(r).is_none() {
            return na(format!("no atom occurrence {r:?} to replace"));
        }
    }
    check_entry_premises(chk, j, &entry, sigma)?;
    let (xs, body) = residual(&entry.premise_formula, sigma);
    if !chk.entails(j, &Formula::exists(xs, body))? {
        return na("instantiated premise formula is not entailed");
    }
    let sources = entry.premise_atoms.substitute(sigma);
    let (mut next, fresh) = add_derived_atom(j, concl.substitute(sigma), &sources, replace, replace.is_none() && matches!(key, EntryKey::Lemma(_)));
    next.applied.insert((Source::Entry(key), sigma.clone()));
    Ok((next, fresh))
}

/// Fold: atoms gain the instantiated head of a definite clause.
pub fn apply_fold(
    chk: &mut Checker<'_>,
    j: &Judgment,
    index: usize,
    sigma: &Substitution,
) -> Result<(Judgment, bool), RuleError> {
    let Some(clause) = j.defs.hccs.definite.get(index).cloned() else {
        return na(format!("no definite clause {index}"));
    };
    let head = clause.head.as_atom().expect("definite clause").clone();
    let mut domain = premise_domain(&clause.body_atoms);
    head.collect_vars(&mut domain);
    check_domain(sigma, &domain)?;
    let (xs, body) = residual(&clause.body_formula, sigma);
    if !chk.entails(j, &Formula::exists(xs, body))? {
        return na("instantiated clause constraint is not entailed");
    }
    let sources = clause.body_atoms.substitute(sigma);
    if !chk.subset(j, &sources)? {
        return na("instantiated body atoms are not entailed");
    }
    let (mut next, fresh) = add_derived_atom(j, head.substitute(sigma), &sources, None, true);
    next.applied.insert((Source::Clause(index), sigma.clone()));
    Ok((next, fresh))
}

/// Valid⊥: the knowledge is unsatisfiable.
pub fn check_valid_bot(chk: &mut Checker<'_>, j: &Judgment) -> Result<bool, RuleError> {
    if j.target != Head::Bottom {
        return Ok(false);
    }
    if !chk.strict && j.knowledge.contains(&Formula::False) {
        return Ok(true);
    }
    Ok(chk.smt.is_valid(&j.phi(), &Formula::False)?)
}

/// ValidP: the knowledge implies the target is among the atoms.
pub fn check_valid_p(chk: &mut Checker<'_>, j: &Judgment) -> Result<bool, RuleError> {
    let Head::Atom(t) = &j.target else { return Ok(false) };
    Ok(chk.member(j, InTarget::Atom(t))?)
}

/// Re-executes a recorded step and returns the premise judgments.
pub fn execute_step(chk: &mut Checker<'_>, j: &Judgment, step: &Step) -> Result<Vec<Judgment>, RuleError> {
    Ok(match step {
        Step::Induct { occ, alpha, renaming } => vec![apply_induct(j, *occ, *alpha, renaming)?],
        Step::Unfold { occ, renamings } => apply_unfold(j, *occ, renamings)?,
        Step::ApplyBot { entry, sigma } => vec![apply_bot(chk, j, *entry, sigma)?.0],
        Step::ApplyP { entry, sigma, replace } => vec![apply_p(chk, j, *entry, sigma, *replace)?.0],
        Step::Fold { clause, sigma } => vec![apply_fold(chk, j, *clause, sigma)?.0],
        Step::ValidBot => {
            if !check_valid_bot(chk, j)? {
                return na("knowledge is not contradictory");
            }
            vec![]
        }
        Step::ValidP => {
            if !check_valid_p(chk, j)? {
                return na("target atom is not entailed");
            }
            vec![]
        }
    })
}
