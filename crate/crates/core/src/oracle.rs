//! Ground semantics of an HCCS.
//!
//! [`bounded_least_model`] iterates the one-step consequence operator on a
//! box of integers; [`Validator`] decides derivability of ground atoms top
//! down, the way a constraint logic program would run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::clause::{Atom, Hccs, Head, HornClause};
use crate::sexp::{parse_all, Sexp};
use crate::smt::{SatResult, SmtSession};
use crate::term::{Formula, Ident, Model, Poly, Term};

pub type Tuple = Vec<BigInt>;

#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct GroundAtomSet(pub BTreeMap<Ident, BTreeSet<Tuple>>);

impl GroundAtomSet {
    pub fn empty(hccs: &Hccs) -> Self {
        GroundAtomSet(hccs.predicates.keys().map(|p| (p.clone(), BTreeSet::new())).collect())
    }

    pub fn contains(&self, pred: &Ident, t: &[BigInt]) -> bool {
        self.0.get(pred).is_some_and(|s| s.contains(t))
    }

    pub fn insert(&mut self, pred: Ident, t: Tuple) -> bool {
        self.0.entry(pred).or_default().insert(t)
    }

    pub fn tuples(&self, pred: &Ident) -> impl Iterator<Item = &Tuple> {
        self.0.get(pred).into_iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.0.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &GroundAtomSet) -> bool {
        self.0.iter().all(|(p, s)| s.iter().all(|t| other.contains(p, t)))
    }

    /// Sorted `P(v1,...,vn)` lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (p, set) in &self.0 {
            for t in set {
                let vals: Vec<String> = t.iter().map(ToString::to_string).collect();
                out.push_str(&format!("{p}({})\n", vals.join(",")));
            }
        }
        out
    }
}

/// Linear propagation over an assignment: equations `p = 0` with a single
/// unassigned variable of degree one are solved.
#[derive(Clone, Default)]
struct Bindings {
    model: Model,
    pending: Vec<Poly>,
}

impl Bindings {
    /// Adds `p = 0`. `false` on a definite contradiction.
    fn equate(&mut self, p: Poly) -> bool {
        self.pending.push(p);
        self.propagate()
    }

    fn bind(&mut self, v: Ident, value: BigInt) -> bool {
        self.model.insert(v, value);
        self.propagate()
    }

    fn propagate(&mut self) -> bool {
        loop {
            let mut progress = false;
            let mut rest = Vec::with_capacity(self.pending.len());
            for p in std::mem::take(&mut self.pending) {
                let p = p.partial_eval(&self.model);
                if let Some(c) = p.as_constant() {
                    if !c.is_zero() {
                        return false;
                    }
                    continue;
                }
                let vars = p.vars();
                if vars.len() == 1 {
                    let v = vars.into_iter().next().unwrap();
                    if let Some((c, k)) = p.linear(&v) {
                        let k = k.as_constant().unwrap_or_default();
                        let (q, r) = (-k).div_rem(&c);
                        if !r.is_zero() {
                            return false;
                        }
                        self.model.insert(v, q);
                        progress = true;
                        continue;
                    }
                }
                rest.push(p);
            }
            self.pending = rest;
            if !progress {
                return true;
            }
        }
    }
}

fn atom_poly_eqs<'a>(atom: &'a Atom, values: &'a [BigInt]) -> impl Iterator<Item = Poly> + 'a {
    atom.args
        .iter()
        .zip(values)
        .map(|(a, v)| Poly::from_term(a).minus(&Poly::constant(v.clone())))
}

fn in_box(t: &[BigInt], bound: &BigInt) -> bool {
    t.iter().all(|v| v.abs() <= *bound)
}

/// Enumerates the assignments to `clause.vars` under which every body atom
/// is in `set` and the body formula holds. Variables not fixed by the body
/// atoms range over `[-bound, bound]`.
fn ground_instances(
    clause: &HornClause,
    set: &GroundAtomSet,
    bound: &BigInt,
    emit: &mut dyn FnMut(&Model),
) {
    fn atoms(
        clause: &HornClause,
        idx: usize,
        b: Bindings,
        set: &GroundAtomSet,
        bound: &BigInt,
        emit: &mut dyn FnMut(&Model),
    ) {
        let Some(atom) = clause.body_atoms.get(idx) else {
            let free: Vec<Ident> = clause.vars.iter().filter(|v| !b.model.contains_key(*v)).cloned().collect();
            return enumerate(clause, &free, b, bound, emit);
        };
        for t in set.tuples(&atom.pred) {
            let mut nb = b.clone();
            if atom_poly_eqs(atom, t).all(|p| nb.equate(p)) {
                atoms(clause, idx + 1, nb, set, bound, emit);
            }
        }
    }
    fn enumerate(clause: &HornClause, free: &[Ident], b: Bindings, bound: &BigInt, emit: &mut dyn FnMut(&Model)) {
        match free.split_first() {
            None => {
                if b.pending.is_empty() && clause.body_formula.eval(&b.model) == Some(true) {
                    emit(&b.model);
                }
            }
            Some((v, rest)) if b.model.contains_key(v) => enumerate(clause, rest, b, bound, emit),
            Some((v, rest)) => {
                let mut x = -bound.clone();
                while x <= *bound {
                    let mut nb = b.clone();
                    if nb.bind(v.clone(), x.clone()) {
                        enumerate(clause, rest, nb, bound, emit);
                    }
                    x += 1;
                }
            }
        }
    }
    atoms(clause, 0, Bindings::default(), set, bound, emit);
}

fn eval_args(atom: &Atom, m: &Model) -> Option<Tuple> {
    atom.args.iter().map(|a| a.eval(m)).collect()
}

/// One application of the consequence operator, truncated to the box.
pub fn consequence_step(hccs: &Hccs, set: &GroundAtomSet, bound: &BigInt) -> GroundAtomSet {
    let mut next = GroundAtomSet::empty(hccs);
    for clause in &hccs.definite {
        let Head::Atom(head) = &clause.head else { continue };
        ground_instances(clause, set, bound, &mut |m| {
            if let Some(t) = eval_args(head, m) {
                if in_box(&t, bound) {
                    next.insert(head.pred.clone(), t);
                }
            }
        });
    }
    next
}

/// `F^k(∅)` restricted to argument tuples within `[-bound, bound]`.
pub fn bounded_least_model(hccs: &Hccs, bound: u64, iterations: usize) -> GroundAtomSet {
    let bound = BigInt::from(bound);
    let mut cur = GroundAtomSet::empty(hccs);
    for _ in 0..iterations {
        let next = consequence_step(hccs, &cur, &bound);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    /// Index into the goal clauses.
    pub goal: usize,
    pub model: Model,
}

#[derive(Debug, thiserror::Error)]
#[error("malformed counterexample: {0}")]
pub struct CounterexampleParseError(String);

impl Counterexample {
    pub fn parse(text: &str) -> Result<Counterexample, CounterexampleParseError> {
        let bad = |m: &str| CounterexampleParseError(m.to_string());
        let forms = parse_all(text).map_err(|e| CounterexampleParseError(e.to_string()))?;
        let [form] = forms.as_slice() else { return Err(bad("expected one form")) };
        let items = form.as_list().ok_or_else(|| bad("expected a list"))?;
        if form.head() != Some("counterexample") {
            return Err(bad("expected (counterexample ...)"));
        }
        let mut goal = None;
        let mut model = Model::new();
        for it in &items[1..] {
            match (it.head(), it.as_list()) {
                (Some("goal"), Some([_, Sexp::Num(n, _)])) => {
                    goal = Some(n.try_into().map_err(|_| bad("goal index out of range"))?);
                }
                (Some("model"), Some(pairs)) => {
                    for p in &pairs[1..] {
                        let Some([Sexp::Sym(v, _), value]) = p.as_list() else { return Err(bad("model entry")) };
                        let n = crate::frontend::int_literal(value).ok_or_else(|| bad("model value"))?;
                        model.insert(Ident::new(v), n);
                    }
                }
                _ => return Err(bad("unexpected field")),
            }
        }
        Ok(Counterexample { goal: goal.ok_or_else(|| bad("missing goal"))?, model })
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(counterexample")?;
        writeln!(f, "  (goal {})", self.goal)?;
        write!(f, "  (model")?;
        for (v, n) in &self.model {
            write!(f, "\n    ({v} {})", Term::Int(n.clone()))?;
        }
        writeln!(f, "))")
    }
}

/// Ground instances of goal clauses whose body holds in `set`.
pub fn goal_violations(hccs: &Hccs, set: &GroundAtomSet, bound: u64) -> Vec<Counterexample> {
    let bound = BigInt::from(bound);
    let mut out = Vec::new();
    for (goal, clause) in hccs.goals.iter().enumerate() {
        ground_instances(clause, set, &bound, &mut |m| {
            out.push(Counterexample { goal, model: m.clone() });
        });
    }
    out
}

/// Derivations are searched recursively; deep ones need more than the
/// default thread stack.
fn on_large_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(scope, f)
            .expect("spawn validation thread")
            .join()
            .expect("validation thread panicked")
    })
}

pub const DEFAULT_VALIDATION_DEPTH: u32 = 64;
/// Work units: one per resolution step plus one per pending atom and constraint.
const STEP_BUDGET: u64 = 500_000;

#[derive(Clone)]
struct Goal {
    b: Bindings,
    constraints: Vec<Formula>,
    atoms: Vec<(Atom, u32)>,
}

/// Top-down derivability of ground atoms, memoized.
pub struct Validator<'a> {
    hccs: &'a Hccs,
    smt: Option<&'a mut SmtSession>,
    /// Smallest depth at which the atom was found derivable.
    proven: BTreeMap<(Ident, Tuple), u32>,
    /// Largest depth at which the atom was found underivable.
    refuted: BTreeMap<(Ident, Tuple), u32>,
    steps: u64,
    next_var: u64,
}

impl<'a> Validator<'a> {
    /// SMT is only consulted when a derivation leaves constraints over
    /// variables that no equation determines.
    pub fn new(hccs: &'a Hccs, smt: Option<&'a mut SmtSession>) -> Self {
        Validator { hccs, smt, proven: BTreeMap::new(), refuted: BTreeMap::new(), steps: 0, next_var: 0 }
    }

    pub fn derivable(&mut self, pred: &Ident, t: &[BigInt], depth: u32) -> bool {
        on_large_stack(|| self.derive(pred, t, depth))
    }

    fn derive(&mut self, pred: &Ident, t: &[BigInt], depth: u32) -> bool {
        let key = (pred.clone(), t.to_vec());
        if self.proven.get(&key).is_some_and(|d| *d <= depth) {
            return true;
        }
        if depth == 0 || self.refuted.get(&key).is_some_and(|d| *d >= depth) {
            return false;
        }
        let atom = Atom { pred: pred.clone(), args: t.iter().cloned().map(Term::Int).collect() };
        let ok = self.expand(Goal { b: Bindings::default(), constraints: Vec::new(), atoms: Vec::new() }, &atom, depth);
        if ok {
            let d = self.proven.entry(key).or_insert(depth);
            *d = (*d).min(depth);
        } else {
            let d = self.refuted.entry(key).or_insert(0);
            *d = (*d).max(depth);
        }
        ok
    }

    fn rename(&mut self, clause: &HornClause) -> HornClause {
        self.next_var += 1;
        let n = self.next_var;
        let s = clause.vars.iter().map(|v| (v.clone(), Term::var(format!("%v{n}.{v}")))).collect();
        clause.substitute_vars(&s)
    }

    fn residual_sat(&mut self, g: &Goal) -> bool {
        let mut parts: Vec<Formula> = Vec::new();
        let s = g.b.model.iter().map(|(v, n)| (v.clone(), Term::Int(n.clone()))).collect();
        for c in &g.constraints {
            parts.push(crate::term::substitute(&s, c));
        }
        for p in &g.b.pending {
            parts.push(Formula::eq(p.to_term(), Term::int(0)));
        }
        let f = Formula::and(parts);
        match f.eval(&Model::new()) {
            Some(b) => b,
            None => matches!(self.smt.as_deref_mut().map(|smt| smt.check_sat(&f)), Some(Ok(SatResult::Sat(_)))),
        }
    }

    fn resolve(&mut self, mut g: Goal) -> bool {
        self.steps += 1 + (g.constraints.len() + g.atoms.len() + g.b.pending.len()) as u64;
        if self.steps > STEP_BUDGET {
            return false;
        }
        let mut open = Vec::new();
        for c in std::mem::take(&mut g.constraints) {
            match c.eval(&g.b.model) {
                Some(true) => {}
                Some(false) => return false,
                None => open.push(c),
            }
        }
        g.constraints = open;
        loop {
            let ground = g.atoms.iter().position(|(a, _)| eval_args(a, &g.b.model).is_some());
            let Some(i) = ground else { break };
            let (a, d) = g.atoms.remove(i);
            let t = eval_args(&a, &g.b.model).unwrap();
            if !self.derive(&a.pred, &t, d) {
                return false;
            }
        }
        if g.atoms.is_empty() {
            return self.residual_sat(&g);
        }
        let (atom, depth) = g.atoms.remove(0);
        self.expand(g, &atom, depth)
    }

    /// Resolves `atom` against each of its clauses, then the rest of `g`.
    fn expand(&mut self, g: Goal, atom: &Atom, depth: u32) -> bool {
        if depth == 0 {
            return false;
        }
        let hccs = self.hccs;
        for (_, clause) in hccs.clauses_of(&atom.pred) {
            let c = self.rename(clause);
            let head = c.head.as_atom().expect("definite clause");
            let mut next = g.clone();
            let consistent = head.args.iter().zip(&atom.args).all(|(h, a)| {
                let p = Poly::from_term(h).minus(&Poly::from_term(a));
                next.b.equate(p)
            });
            if !consistent {
                continue;
            }
            next.constraints.extend(c.body_formula.conjuncts());
            let mut atoms: Vec<(Atom, u32)> = c.body_atoms.iter().map(|a| (a.clone(), depth - 1)).collect();
            atoms.append(&mut next.atoms);
            next.atoms = atoms;
            if self.resolve(next) {
                return true;
            }
        }
        false
    }
}

/// The goal's body formula holds under the model and every body atom is
/// derivable within `depth`.
pub fn validate_counterexample(
    hccs: &Hccs,
    cex: &Counterexample,
    depth: u32,
    smt: Option<&mut SmtSession>,
) -> bool {
    let Some(goal) = hccs.goals.get(cex.goal) else { return false };
    if !goal.vars.iter().all(|v| cex.model.contains_key(v)) {
        return false;
    }
    if goal.body_formula.eval(&cex.model) != Some(true) {
        return false;
    }
    let mut v = Validator::new(hccs, smt);
    goal.body_atoms.iter().all(|a| match eval_args(a, &cex.model) {
        Some(t) => v.derivable(&a.pred, &t, depth),
        None => false,
    })
}
