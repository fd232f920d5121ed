//! Atoms, Horn clauses, clause sets, predicate definitions, lemma and
//! hypothesis entries, annotated atoms and the membership encodings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::term::{Formula, Ident, Substitute, Substitution, Term, RESERVED_PREFIX};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Ident,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl AsRef<str>, args: Vec<Term>) -> Atom {
        Atom { pred: Ident::new(pred), args }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Ident>) {
        self.args.iter().for_each(|t| t.collect_vars(out));
    }

    pub fn fvs(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Arguments rewritten into polynomial normal form.
    pub fn simplified(&self) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(crate::term::simplify).collect() }
    }
}

impl Substitute for Atom {
    fn substitute(&self, s: &Substitution) -> Self {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|t| s.apply_term(t)).collect() }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.pred);
        }
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Clause head or lemma conclusion: an atom or `⊥`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Head {
    Atom(Atom),
    Bottom,
}

impl Head {
    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Head::Atom(a) => Some(a),
            Head::Bottom => None,
        }
    }

    pub fn fvs(&self) -> BTreeSet<Ident> {
        self.as_atom().map(Atom::fvs).unwrap_or_default()
    }
}

impl Substitute for Head {
    fn substitute(&self, s: &Substitution) -> Self {
        match self {
            Head::Atom(a) => Head::Atom(a.substitute(s)),
            Head::Bottom => Head::Bottom,
        }
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Atom(a) => write!(f, "{a}"),
            Head::Bottom => f.write_str("false"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HornClause {
    pub head: Head,
    pub body_atoms: Vec<Atom>,
    pub body_formula: Formula,
    pub vars: BTreeSet<Ident>,
}

impl HornClause {
    /// Builds a clause whose scope is exactly its free variables.
    pub fn new(head: Head, body_atoms: Vec<Atom>, body_formula: Formula) -> HornClause {
        let mut c = HornClause { head, body_atoms, body_formula, vars: BTreeSet::new() };
        c.vars = c.fvs();
        c
    }

    pub fn is_goal(&self) -> bool {
        matches!(self.head, Head::Bottom)
    }

    pub fn fvs(&self) -> BTreeSet<Ident> {
        let mut out = self.head.fvs();
        self.body_atoms.iter().for_each(|a| a.collect_vars(&mut out));
        self.body_formula.collect_vars(&mut out);
        out
    }

    pub fn substitute_vars(&self, s: &Substitution) -> HornClause {
        let mut c = HornClause {
            head: self.head.substitute(s),
            body_atoms: self.body_atoms.substitute(s),
            body_formula: self.body_formula.substitute(s),
            vars: BTreeSet::new(),
        };
        c.vars = self
            .vars
            .iter()
            .map(|v| match s.get(v) {
                Some(Term::Var(w)) => w.clone(),
                _ => v.clone(),
            })
            .collect();
        c.vars.extend(c.fvs());
        c
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= ", self.head)?;
        let mut parts: Vec<String> = self.body_atoms.iter().map(ToString::to_string).collect();
        if self.body_formula != Formula::True || parts.is_empty() {
            parts.push(self.body_formula.to_string());
        }
        f.write_str(&parts.join(" /\\ "))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Hccs {
    pub predicates: BTreeMap<Ident, usize>,
    pub definite: Vec<HornClause>,
    pub goals: Vec<HornClause>,
}

impl Hccs {
    pub fn clauses_of<'a>(&'a self, p: &'a Ident) -> impl Iterator<Item = (usize, &'a HornClause)> + 'a {
        self.definite
            .iter()
            .enumerate()
            .filter(move |(_, c)| matches!(&c.head, Head::Atom(a) if &a.pred == p))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(Ident),
    #[error("predicate `{pred}` expects {expected} argument(s), found {found}")]
    Arity { pred: Ident, expected: usize, found: usize },
}

pub fn check_atom(atom: &Atom, decls: &BTreeMap<Ident, usize>) -> Result<(), ModelError> {
    match decls.get(&atom.pred) {
        None => Err(ModelError::UndeclaredPredicate(atom.pred.clone())),
        Some(&n) if n != atom.args.len() => {
            Err(ModelError::Arity { pred: atom.pred.clone(), expected: n, found: atom.args.len() })
        }
        Some(_) => Ok(()),
    }
}

/// Renamings making the given variable scopes pairwise disjoint. A variable
/// keeps its name unless an earlier scope already used it; clashing names
/// get a `_k` suffix that avoids every name in `taken`.
pub fn disjoint_renamings(scopes: &[BTreeSet<Ident>], taken: &BTreeSet<Ident>) -> Vec<Substitution> {
    let mut used: BTreeSet<Ident> = BTreeSet::new();
    let mut all: BTreeSet<Ident> = taken.clone();
    scopes.iter().for_each(|s| all.extend(s.iter().cloned()));
    let mut out = Vec::with_capacity(scopes.len());
    for scope in scopes {
        let mut sub = Substitution::new();
        for v in scope {
            if used.contains(v) {
                let mut k = 1usize;
                let renamed = loop {
                    let cand = Ident::new(format!("{v}_{k}"));
                    if !all.contains(&cand) {
                        break cand;
                    }
                    k += 1;
                };
                all.insert(renamed.clone());
                used.insert(renamed.clone());
                sub.insert(v.clone(), Term::Var(renamed));
            } else {
                used.insert(v.clone());
            }
        }
        out.push(sub);
    }
    out
}

/// Splits clauses into definite and goal parts, checks arities and makes
/// clause scopes pairwise disjoint.
pub fn normalize_hccs(raw: Vec<HornClause>, decls: &BTreeMap<Ident, usize>) -> Result<Hccs, ModelError> {
    for c in &raw {
        if let Head::Atom(a) = &c.head {
            check_atom(a, decls)?;
        }
        for a in &c.body_atoms {
            check_atom(a, decls)?;
        }
    }
    let scopes: Vec<BTreeSet<Ident>> = raw
        .iter()
        .map(|c| {
            let mut s = c.vars.clone();
            s.extend(c.fvs());
            s
        })
        .collect();
    let taken: BTreeSet<Ident> = decls.keys().cloned().collect();
    let renamings = disjoint_renamings(&scopes, &taken);
    let mut hccs = Hccs { predicates: decls.clone(), ..Hccs::default() };
    for ((c, scope), sub) in raw.into_iter().zip(scopes).zip(renamings) {
        let mut c = HornClause { vars: scope, ..c };
        if !sub.is_empty() {
            c = c.substitute_vars(&sub);
        }
        if c.is_goal() {
            hccs.goals.push(c);
        } else {
            hccs.definite.push(c);
        }
    }
    Ok(hccs)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DefinitionBranch {
    pub clause_index: usize,
    pub exists: Vec<Ident>,
    pub formula: Formula,
    pub atoms: Vec<Atom>,
}

/// `λ params. ⋁ᵢ ∃ existsᵢ. formulaᵢ ∧ ⋀ atomsᵢ`
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DefinitionDisjunction {
    pub predicate: Ident,
    pub params: Vec<Ident>,
    pub branches: Vec<DefinitionBranch>,
}

pub fn param_name(i: usize) -> Ident {
    Ident::new(format!("{RESERVED_PREFIX}arg{i}"))
}

pub fn build_definition(hccs: &Hccs, p: &Ident) -> DefinitionDisjunction {
    let arity = hccs.predicates.get(p).copied().unwrap_or(0);
    let params: Vec<Ident> = (0..arity).map(param_name).collect();
    let mut branches = Vec::new();
    for (idx, clause) in hccs.clauses_of(p) {
        let head = clause.head.as_atom().expect("definite clause");
        let mut occurrences: BTreeMap<&Ident, usize> = BTreeMap::new();
        for t in &head.args {
            if let Term::Var(v) = t {
                *occurrences.entry(v).or_default() += 1;
            }
        }
        let mut sub = Substitution::new();
        let mut residual = Vec::new();
        for (i, t) in head.args.iter().enumerate() {
            match t {
                Term::Var(v) if occurrences[v] == 1 => {
                    sub.insert(v.clone(), Term::Var(params[i].clone()));
                }
                _ => residual.push((i, t.clone())),
            }
        }
        let mut conj = clause.body_formula.substitute(&sub).conjuncts();
        for (i, t) in residual {
            conj.push(Formula::eq(Term::Var(params[i].clone()), t.substitute(&sub)));
        }
        let atoms: Vec<Atom> = clause.body_atoms.substitute(&sub);
        let mut mentioned = BTreeSet::new();
        conj.iter().for_each(|f| f.collect_vars(&mut mentioned));
        atoms.iter().for_each(|a| a.collect_vars(&mut mentioned));
        let exists: Vec<Ident> =
            clause.vars.iter().filter(|v| !sub.contains(v) && mentioned.contains(*v)).cloned().collect();
        branches.push(DefinitionBranch { clause_index: idx, exists, formula: Formula::and(conj), atoms });
    }
    DefinitionDisjunction { predicate: p.clone(), params, branches }
}

impl DefinitionDisjunction {
    /// The definition as one formula over its parameters, with atoms
    /// rendered by `atom_formula`.
    pub fn to_formula(&self, atom_formula: impl Fn(&Atom) -> Formula) -> Formula {
        Formula::or(
            self.branches
                .iter()
                .map(|b| {
                    let mut parts = b.formula.conjuncts();
                    parts.extend(b.atoms.iter().map(&atom_formula));
                    Formula::exists(b.exists.clone(), Formula::and(parts))
                })
                .collect(),
        )
    }

    /// Expands the definition back into one clause per branch.
    pub fn to_clauses(&self) -> Vec<HornClause> {
        let head = Atom { pred: self.predicate.clone(), args: self.params.iter().cloned().map(Term::Var).collect() };
        self.branches
            .iter()
            .map(|b| HornClause::new(Head::Atom(head.clone()), b.atoms.clone(), b.formula.clone()))
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InductionId(pub u32);

impl fmt::Display for InductionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl fmt::Debug for InductionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Guard {
    Lemma,
    Hyp { alpha: InductionId, pivot: Atom },
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GammaEntry {
    pub guard: Guard,
    pub premise_atoms: Vec<Atom>,
    pub premise_formula: Formula,
    pub conclusion: Head,
}

impl GammaEntry {
    pub fn lemma(premise_atoms: Vec<Atom>, premise_formula: Formula, conclusion: Head) -> GammaEntry {
        GammaEntry { guard: Guard::Lemma, premise_atoms, premise_formula, conclusion }
    }

    pub fn fvs(&self) -> BTreeSet<Ident> {
        let mut out = self.conclusion.fvs();
        if let Guard::Hyp { pivot, .. } = &self.guard {
            pivot.collect_vars(&mut out);
        }
        self.premise_atoms.iter().for_each(|a| a.collect_vars(&mut out));
        self.premise_formula.collect_vars(&mut out);
        out
    }

    pub fn substitute_vars(&self, s: &Substitution) -> GammaEntry {
        GammaEntry {
            guard: match &self.guard {
                Guard::Lemma => Guard::Lemma,
                Guard::Hyp { alpha, pivot } => Guard::Hyp { alpha: *alpha, pivot: pivot.substitute(s) },
            },
            premise_atoms: self.premise_atoms.substitute(s),
            premise_formula: self.premise_formula.substitute(s),
            conclusion: self.conclusion.substitute(s),
        }
    }

    /// The entry read as a goal clause (for `⊥` conclusions) or definite
    /// clause.
    pub fn as_clause(&self) -> HornClause {
        HornClause::new(self.conclusion.clone(), self.premise_atoms.clone(), self.premise_formula.clone())
    }
}

impl fmt::Display for GammaEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.guard {
            Guard::Lemma => f.write_str("*")?,
            Guard::Hyp { alpha, pivot } => write!(f, "{alpha} |> {pivot}")?,
        }
        write!(f, " : {} ", self.premise_formula)?;
        for a in &self.premise_atoms {
            write!(f, "{a} ")?;
        }
        write!(f, "=> {}", self.conclusion)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AnnotatedAtom {
    pub atom: Atom,
    pub marks: BTreeSet<InductionId>,
    pub inducted: Option<InductionId>,
    pub unfolded: bool,
}

impl AnnotatedAtom {
    pub fn plain(atom: Atom) -> AnnotatedAtom {
        AnnotatedAtom { atom, marks: BTreeSet::new(), inducted: None, unfolded: false }
    }

    pub fn erase(&self) -> &Atom {
        &self.atom
    }

    pub fn substitute(&self, s: &Substitution) -> AnnotatedAtom {
        AnnotatedAtom { atom: self.atom.substitute(s), ..self.clone() }
    }
}

/// Left-hand side of `⌊· ∈ A⌋`.
#[derive(Clone, Copy, Debug)]
pub enum InTarget<'a> {
    Atom(&'a Atom),
    Lemma,
    Hyp(InductionId, &'a Atom),
}

fn tuple_eq(a: &Atom, b: &Atom) -> Formula {
    Formula::and(a.args.iter().zip(&b.args).map(|(s, t)| Formula::eq(s.clone(), t.clone())).collect())
}

/// `⌊target ∈ A⌋`
pub fn in_encoding<'a, I>(target: InTarget<'_>, atoms: I) -> Formula
where
    I: IntoIterator<Item = &'a AnnotatedAtom>,
{
    let (alpha, atom) = match target {
        InTarget::Lemma => return Formula::True,
        InTarget::Atom(a) => (None, a),
        InTarget::Hyp(alpha, a) => (Some(alpha), a),
    };
    Formula::or(
        atoms
            .into_iter()
            .filter(|b| b.atom.pred == atom.pred && b.atom.args.len() == atom.args.len())
            .filter(|b| alpha.is_none_or(|al| b.marks.contains(&al)))
            .map(|b| tuple_eq(atom, &b.atom))
            .collect(),
    )
}

/// `⌊A1 ⊆ A2⌋`
pub fn sub_encoding<'a, I>(a1: &[Atom], a2: I) -> Formula
where
    I: IntoIterator<Item = &'a AnnotatedAtom> + Clone,
{
    Formula::and(a1.iter().map(|a| in_encoding(InTarget::Atom(a), a2.clone())).collect())
}

/// Generator of reserved-prefix names `%stem.N`.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    next: u64,
}

impl FreshNames {
    pub fn new() -> Self {
        FreshNames { next: 0 }
    }

    /// A generator whose names never collide with the given identifiers.
    pub fn above<'a>(existing: impl IntoIterator<Item = &'a Ident>) -> Self {
        let mut next = 0;
        for id in existing {
            if let Some(rest) = id.as_str().strip_prefix(RESERVED_PREFIX) {
                if let Some(n) = rest.rsplit('.').next().and_then(|s| s.parse::<u64>().ok()) {
                    next = next.max(n + 1);
                }
            }
        }
        FreshNames { next }
    }

    pub fn fresh(&mut self, base: &Ident) -> Ident {
        let n = self.next;
        self.next += 1;
        Ident::new(format!("{RESERVED_PREFIX}{}.{n}", base.stem()))
    }

    pub fn freshen<'a>(&mut self, vars: impl IntoIterator<Item = &'a Ident>) -> Vec<(Ident, Ident)> {
        vars.into_iter().map(|v| (v.clone(), self.fresh(v))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Model;
    use num_bigint::BigInt;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    fn mult_clauses() -> (Vec<HornClause>, BTreeMap<Ident, usize>) {
        let p = |a, b, c| Atom::new("P", vec![a, b, c]);
        let q = |a, b, c, d| Atom::new("Q", vec![a, b, c, d]);
        let clauses = vec![
            HornClause::new(Head::Atom(p(v("x"), Term::int(0), Term::int(0))), vec![], Formula::True),
            HornClause::new(
                Head::Atom(p(v("x"), v("y"), Term::add(v("x"), v("r")))),
                vec![p(v("x"), Term::sub(v("y"), Term::int(1)), v("r"))],
                Formula::ne(v("y"), Term::int(0)),
            ),
            HornClause::new(Head::Atom(q(v("x"), Term::int(0), v("a"), v("a"))), vec![], Formula::True),
            HornClause::new(
                Head::Atom(q(v("x"), v("y"), v("a"), v("r"))),
                vec![q(v("x"), Term::sub(v("y"), Term::int(1)), Term::add(v("a"), v("x")), v("r"))],
                Formula::ne(v("y"), Term::int(0)),
            ),
            HornClause::new(
                Head::Bottom,
                vec![p(v("x"), v("y"), v("r1")), q(v("x"), v("y"), v("a"), v("r2"))],
                Formula::ne(Term::add(v("r1"), v("a")), v("r2")),
            ),
        ];
        let decls = [(Ident::new("P"), 3), (Ident::new("Q"), 4)].into_iter().collect();
        (clauses, decls)
    }

    #[test]
    fn normalize_splits_and_freshens() {
        let (clauses, decls) = mult_clauses();
        let h = normalize_hccs(clauses, &decls).unwrap();
        assert_eq!(h.definite.len(), 4);
        assert_eq!(h.goals.len(), 1);
        let mut all = h.definite.clone();
        all.extend(h.goals.clone());
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert!(all[i].vars.is_disjoint(&all[j].vars), "{} / {}", all[i], all[j]);
            }
        }
    }

    #[test]
    fn normalize_empty() {
        let h = normalize_hccs(vec![], &BTreeMap::new()).unwrap();
        assert!(h.definite.is_empty() && h.goals.is_empty());
    }

    #[test]
    fn normalize_rejects_arity_and_undeclared() {
        let (mut clauses, decls) = mult_clauses();
        clauses.push(HornClause::new(Head::Atom(Atom::new("P", vec![v("z")])), vec![], Formula::True));
        assert!(matches!(normalize_hccs(clauses, &decls), Err(ModelError::Arity { .. })));
        let c = HornClause::new(Head::Atom(Atom::new("R", vec![])), vec![], Formula::True);
        assert!(matches!(normalize_hccs(vec![c], &decls), Err(ModelError::UndeclaredPredicate(_))));
    }

    #[test]
    fn normalize_is_idempotent() {
        let (clauses, decls) = mult_clauses();
        let once = normalize_hccs(clauses, &decls).unwrap();
        let mut raw = once.definite.clone();
        raw.extend(once.goals.clone());
        let twice = normalize_hccs(raw, &decls).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn definition_of_mult() {
        let (clauses, decls) = mult_clauses();
        let h = normalize_hccs(clauses, &decls).unwrap();
        let d = build_definition(&h, &Ident::new("P"));
        assert_eq!(d.branches.len(), 2);
        assert!(d.branches[0].atoms.is_empty());
        assert!(d.branches[0].exists.is_empty());
        assert_eq!(d.branches[1].atoms.len(), 1);
        assert_eq!(d.branches[1].exists.len(), 1);
        // zero branches for an undefined predicate
        let mut h2 = h.clone();
        h2.predicates.insert(Ident::new("Z"), 1);
        assert!(build_definition(&h2, &Ident::new("Z")).branches.is_empty());
    }

    #[test]
    fn in_encoding_examples() {
        let z = Atom::new("P", vec![v("z")]);
        let a1 = AnnotatedAtom::plain(Atom::new("P", vec![Term::int(1)]));
        let a2 = AnnotatedAtom::plain(Atom::new("P", vec![Term::int(2)]));
        assert_eq!(
            in_encoding(InTarget::Atom(&z), [&a1, &a2]),
            Formula::or(vec![Formula::eq(v("z"), Term::int(1)), Formula::eq(v("z"), Term::int(2))])
        );
        assert_eq!(in_encoding(InTarget::Atom(&z), []), Formula::False);
        assert_eq!(in_encoding(InTarget::Lemma, [&a1]), Formula::True);
        let alpha = InductionId(0);
        let mut w = AnnotatedAtom::plain(Atom::new("P", vec![v("w")]));
        w.marks.insert(alpha);
        let vv = AnnotatedAtom::plain(Atom::new("P", vec![v("v")]));
        assert_eq!(in_encoding(InTarget::Hyp(alpha, &z), [&w, &vv]), Formula::eq(v("z"), v("w")));
    }

    #[test]
    fn sub_encoding_examples() {
        let a = AnnotatedAtom::plain(Atom::new("P", vec![Term::int(1)]));
        let b = AnnotatedAtom::plain(Atom::new("Q", vec![Term::int(2)]));
        assert_eq!(sub_encoding(&[], [&a]), Formula::True);
        let pz = Atom::new("P", vec![v("z")]);
        let qw = Atom::new("Q", vec![v("w")]);
        assert_eq!(sub_encoding(std::slice::from_ref(&pz), [&a]), Formula::eq(v("z"), Term::int(1)));
        assert_eq!(
            sub_encoding(&[pz, qw], [&a, &b]),
            Formula::and(vec![Formula::eq(v("z"), Term::int(1)), Formula::eq(v("w"), Term::int(2))])
        );
    }

    #[test]
    fn erasure_commutes_with_substitution() {
        let mut a = AnnotatedAtom::plain(Atom::new("P", vec![v("x"), Term::add(v("y"), Term::int(1))]));
        a.marks.insert(InductionId(3));
        let s: Substitution = [(Ident::new("y"), v("x"))].into_iter().collect();
        assert_eq!(a.substitute(&s).erase(), &a.erase().substitute(&s));
    }

    #[test]
    fn fresh_names_avoid_existing() {
        let existing = [Ident::new("%x.4"), Ident::new("y")];
        let mut g = FreshNames::above(existing.iter());
        assert_eq!(g.fresh(&Ident::new("r")), Ident::new("%r.5"));
        assert_eq!(g.fresh(&Ident::new("%r.5")), Ident::new("%r.6"));
    }

    #[test]
    fn definition_branch_semantics() {
        // P(a0,a1,a2) for a ground tuple holds through branch 0 iff a1 = 0 and a2 = 0
        let (clauses, decls) = mult_clauses();
        let h = normalize_hccs(clauses, &decls).unwrap();
        let d = build_definition(&h, &Ident::new("P"));
        let b0 = &d.branches[0];
        let model: Model = d
            .params
            .iter()
            .cloned()
            .zip([BigInt::from(7), BigInt::from(0), BigInt::from(0)])
            .collect();
        assert_eq!(b0.formula.eval(&model), Some(true));
    }
}
