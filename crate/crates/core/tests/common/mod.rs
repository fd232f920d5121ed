#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use ihc::clause::{in_encoding, sub_encoding, AnnotatedAtom, Atom, InTarget, InductionId};
use ihc::engine::solve::{solve_hccs, SolveConfig, Verdict};
use ihc::frontend::{parse_problem, print_problem, ProblemFile, ReadCtx};
use ihc::oracle::{bounded_least_model, consequence_step, goal_violations, validate_counterexample, Counterexample, GroundAtomSet};
use ihc::sexp::{parse_all, Sexp};
use ihc::smt::{SatResult, SmtConfig, SmtSession};
use ihc::term::{Formula, Ident, Model, Term};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn bench_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../bench")
}

pub fn bench_path(name: &str) -> PathBuf {
    bench_dir().join(name)
}

pub fn load(name: &str) -> ProblemFile {
    let path = bench_path(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_problem(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Default configuration plus the options stored in the file.
pub fn config_for(p: &ProblemFile) -> SolveConfig {
    let mut cfg = SolveConfig::default();
    cfg.strategy.apply_p_replace = p.options.get("apply-p-replace").is_some_and(|v| v == "true");
    cfg.strategy.unfold_without_induct = p.options.get("unfold-without-induct").is_some_and(|v| v == "true");
    cfg
}

pub fn workers() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get()).min(8)
}

/// Runs `f` over `0..n` on a few threads, keeping results in index order.
pub fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<(usize, T)>> = Mutex::new(Vec::with_capacity(n));
    std::thread::scope(|s| {
        for _ in 0..workers() {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let r = f(i);
                out.lock().unwrap().push((i, r));
            });
        }
    });
    let mut v = out.into_inner().unwrap();
    v.sort_by_key(|(i, _)| *i);
    v.into_iter().map(|(_, t)| t).collect()
}

// ------------------------------------------------------------ random HCCS

fn int_text(n: i64) -> String {
    if n < 0 {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

fn linear(rng: &mut StdRng, vars: &[&str]) -> String {
    let mut parts = Vec::new();
    for v in vars {
        if rng.gen_bool(0.5) {
            match rng.gen_range(-2i64..=2) {
                0 => {}
                1 => parts.push(v.to_string()),
                -1 => parts.push(format!("(- {v})")),
                k => parts.push(format!("(* {} {v})", int_text(k))),
            }
        }
    }
    let c = rng.gen_range(-2i64..=2);
    if c != 0 || parts.is_empty() {
        parts.push(int_text(c));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

fn comparison(rng: &mut StdRng, vars: &[&str]) -> String {
    let op = ["<=", "<", "=", "distinct"][rng.gen_range(0..4)];
    format!("({op} {} {})", linear(rng, vars), linear(rng, vars))
}

/// A small random problem: at most two predicates of arity at most two,
/// coefficients in [-2, 2], one goal clause.
pub fn random_hccs(seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let vars = ["x", "y", "z"];
    let npred = rng.gen_range(1..=2);
    let preds: Vec<(String, usize)> = (0..npred).map(|i| (["P", "Q"][i].to_string(), rng.gen_range(1..=2))).collect();
    let atom = |rng: &mut StdRng, p: &(String, usize)| {
        let args: Vec<String> = (0..p.1).map(|_| linear(rng, &vars)).collect();
        format!("({} {})", p.0, args.join(" "))
    };
    let mut out = String::new();
    for (name, arity) in &preds {
        out.push_str(&format!("(declare-pred {name}{})\n", " Int".repeat(*arity)));
    }
    for (i, p) in preds.iter().enumerate() {
        let nclauses = rng.gen_range(1..=3);
        for c in 0..nclauses {
            let mut body = Vec::new();
            if c > 0 {
                let q = &preds[rng.gen_range(0..=i)];
                body.push(atom(&mut rng, q));
            }
            if c == 0 || rng.gen_bool(0.7) {
                body.push(comparison(&mut rng, &vars));
            }
            let head = atom(&mut rng, p);
            let body = match body.len() {
                0 => "true".to_string(),
                1 => body.pop().unwrap(),
                _ => format!("(and {})", body.join(" ")),
            };
            out.push_str(&format!("(clause (forall ((x Int) (y Int) (z Int)) (=> {body} {head})))\n"));
        }
    }
    let natoms = rng.gen_range(1..=2);
    let mut body: Vec<String> = (0..natoms)
        .map(|_| {
            let q = rng.gen_range(0..npred);
            atom(&mut rng, &preds[q])
        })
        .collect();
    body.push(comparison(&mut rng, &vars));
    out.push_str(&format!("(clause (forall ((x Int) (y Int) (z Int)) (=> (and {}) false)))\n", body.join(" ")));
    out
}

// ---------------------------------------------------- mutated goal clauses

pub const MULT_DEFS: &str = "(declare-pred P Int Int Int)
(clause (forall (x) (P x 0 0)))
(clause (forall (x y r) (=> (and (P x (- y 1) r) (distinct y 0)) (P x y (+ x r)))))
";

pub const SUM_DEFS: &str = "(declare-pred S Int Int)
(clause (S 0 0))
(clause (forall (x r) (=> (and (S (+ x 1) r) (< x 0)) (S x (+ r x)))))
(clause (forall (x r) (=> (and (S (- x 1) r) (> x 0)) (S x (+ r x)))))
";

#[derive(Clone, Debug)]
enum E {
    V(&'static str),
    C(i64),
    Add(Box<E>, Box<E>),
    Mul(Box<E>, Box<E>),
}

fn v(s: &'static str) -> E {
    E::V(s)
}
fn c(n: i64) -> E {
    E::C(n)
}
fn add(a: E, b: E) -> E {
    E::Add(Box::new(a), Box::new(b))
}
fn mul(a: E, b: E) -> E {
    E::Mul(Box::new(a), Box::new(b))
}

impl std::fmt::Display for E {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            E::V(s) => f.write_str(s),
            E::C(n) => f.write_str(&int_text(*n)),
            E::Add(a, b) => write!(f, "(+ {a} {b})"),
            E::Mul(a, b) => write!(f, "(* {a} {b})"),
        }
    }
}

#[derive(Clone, Debug)]
struct Goal {
    atoms: Vec<(&'static str, Vec<E>)>,
    cmps: Vec<(&'static str, E, E)>,
}

const OPS: [&str; 4] = ["<=", "<", "=", "distinct"];
const GOAL_VARS: [&str; 4] = ["x", "y", "r", "s"];

fn mult_goals() -> Vec<Goal> {
    let p = |a, b, r| ("P", vec![a, b, r]);
    vec![
        Goal { atoms: vec![p(v("x"), v("y"), v("r"))], cmps: vec![("distinct", v("r"), mul(v("x"), v("y")))] },
        Goal { atoms: vec![p(v("x"), v("y"), v("r"))], cmps: vec![("<", v("y"), c(0))] },
        Goal {
            atoms: vec![p(v("x"), v("y"), v("r")), p(v("x"), v("y"), v("s"))],
            cmps: vec![("distinct", v("r"), v("s"))],
        },
        Goal {
            atoms: vec![p(v("x"), v("y"), v("r"))],
            cmps: vec![("<=", c(0), v("x")), ("<", v("r"), c(0))],
        },
        Goal {
            atoms: vec![p(v("x"), add(v("y"), c(1)), v("r")), p(v("x"), v("y"), v("s"))],
            cmps: vec![("distinct", v("r"), add(v("s"), v("x")))],
        },
    ]
}

fn sum_goals() -> Vec<Goal> {
    let s = |a, r| ("S", vec![a, r]);
    vec![
        Goal {
            atoms: vec![s(v("x"), v("r"))],
            cmps: vec![("<=", c(0), v("x")), ("distinct", mul(c(2), v("r")), mul(v("x"), add(v("x"), c(1))))],
        },
        Goal { atoms: vec![s(v("x"), v("r"))], cmps: vec![("<", v("r"), c(0))] },
        Goal {
            atoms: vec![s(v("x"), v("r")), s(add(v("x"), c(-1)), v("s"))],
            cmps: vec![("<", c(0), v("x")), ("distinct", v("r"), add(v("x"), v("s")))],
        },
        Goal { atoms: vec![s(v("x"), v("r"))], cmps: vec![("<", v("r"), v("x"))] },
    ]
}

fn expr_sites(e: &E) -> usize {
    match e {
        E::V(_) | E::C(_) => 1,
        E::Add(a, b) | E::Mul(a, b) => expr_sites(a) + expr_sites(b),
    }
}

/// Mutates the `k`-th leaf of `e`; returns the remaining index otherwise.
fn mutate_expr(e: &mut E, k: &mut usize, rng: &mut StdRng) -> bool {
    match e {
        E::V(_) | E::C(_) if *k > 0 => {
            *k -= 1;
            false
        }
        E::V(name) => {
            if rng.gen_bool(0.5) {
                let others: Vec<&'static str> = GOAL_VARS.iter().copied().filter(|x| x != name).collect();
                *name = others[rng.gen_range(0..others.len())];
            } else {
                *e = add(E::V(name), c([-2, -1, 1, 2][rng.gen_range(0..4)]));
            }
            true
        }
        E::C(n) => {
            *n += [-2, -1, 1, 2][rng.gen_range(0..4)];
            true
        }
        E::Add(a, b) | E::Mul(a, b) => mutate_expr(a, k, rng) || mutate_expr(b, k, rng),
    }
}

fn mutate_goal(g: &mut Goal, rng: &mut StdRng) {
    let leaves: usize = g.atoms.iter().flat_map(|(_, a)| a.iter()).map(expr_sites).sum::<usize>()
        + g.cmps.iter().map(|(_, l, r)| expr_sites(l) + expr_sites(r)).sum::<usize>();
    let total = leaves + g.cmps.len();
    let mut k = rng.gen_range(0..total);
    if k >= leaves {
        let cmp = &mut g.cmps[k - leaves];
        let others: Vec<&'static str> = OPS.iter().copied().filter(|o| *o != cmp.0).collect();
        cmp.0 = others[rng.gen_range(0..others.len())];
        return;
    }
    for (_, args) in &mut g.atoms {
        for a in args {
            if mutate_expr(a, &mut k, rng) {
                return;
            }
        }
    }
    for (_, l, r) in &mut g.cmps {
        if mutate_expr(l, &mut k, rng) || mutate_expr(r, &mut k, rng) {
            return;
        }
    }
}

fn goal_text(g: &Goal) -> String {
    let mut parts: Vec<String> = g
        .atoms
        .iter()
        .map(|(p, args)| format!("({p} {})", args.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")))
        .collect();
    parts.extend(g.cmps.iter().map(|(op, l, r)| format!("({op} {l} {r})")));
    format!("(clause (forall (x y r s) (=> (and {}) false)))\n", parts.join(" "))
}

/// A goal over the mult or sum definitions, obtained from a valid
/// property by one or two random edits.
pub fn mutated_goal_problem(seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let (defs, goals) = if rng.gen_bool(0.5) { (MULT_DEFS, mult_goals()) } else { (SUM_DEFS, sum_goals()) };
    let mut g = goals[rng.gen_range(0..goals.len())].clone();
    for _ in 0..rng.gen_range(1..=2) {
        mutate_goal(&mut g, &mut rng);
    }
    format!("{defs}{}", goal_text(&g))
}

/// Independent check of a counterexample: the body formula holds and
/// every body atom belongs to a bottom-up least model over a box large
/// enough to hold the atom, or (for large values) is derivable top-down
/// with a fresh validator. Returns `(valid, checked_bottom_up)`.
pub fn independent_cex_check(p: &ProblemFile, cex: &Counterexample) -> (bool, bool) {
    let goal = &p.hccs.goals[cex.goal];
    if goal.body_formula.eval(&cex.model) != Some(true) {
        return (false, false);
    }
    let mut tuples = Vec::new();
    for a in &goal.body_atoms {
        let Some(t) = a.args.iter().map(|t| t.eval(&cex.model)).collect::<Option<Vec<_>>>() else {
            return (false, false);
        };
        tuples.push((a.pred.clone(), t));
    }
    let bound = tuples
        .iter()
        .flat_map(|(_, t)| t.iter())
        .map(|n| u64::try_from(n.magnitude().clone()).unwrap_or(u64::MAX))
        .max()
        .unwrap_or(0)
        .max(1);
    if bound <= 8 {
        let model = bounded_least_model(&p.hccs, bound, 2 * bound as usize + 4);
        return (tuples.iter().all(|(pred, t)| model.contains(pred, t)), true);
    }
    (validate(p, cex), false)
}

/// Top-down derivability check with its own solver session.
pub fn validate(p: &ProblemFile, cex: &Counterexample) -> bool {
    let mut smt = SmtSession::new(SmtConfig::default());
    validate_counterexample(&p.hccs, cex, 256, Some(&mut smt))
}

// ------------------------------------------------------ differential check

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiffOutcome {
    Solvable,
    Unsolvable,
    Unknown,
    /// A SOLVABLE verdict contradicted by the bounded least model, or an
    /// UNSOLVABLE one whose model fails validation.
    Contradiction(String),
}

pub fn differential_config() -> SolveConfig {
    let mut cfg = SolveConfig::default();
    cfg.limits.max_inductions = 2;
    cfg.limits.max_rule_applications = 2000;
    cfg.timeout = Some(Duration::from_secs(2));
    cfg
}

pub fn differential_case(seed: u64) -> DiffOutcome {
    let text = random_hccs(seed);
    let p = parse_problem(&text).unwrap_or_else(|e| panic!("generated problem does not parse: {e}\n{text}"));
    let report = match solve_hccs(&p, &differential_config()) {
        Ok(r) => r,
        Err(e) => return DiffOutcome::Contradiction(format!("solver failure {e}")),
    };
    match report.verdict {
        Verdict::Solvable => {
            let model = bounded_least_model(&p.hccs, 4, 6);
            match goal_violations(&p.hccs, &model, 4).first() {
                None => DiffOutcome::Solvable,
                Some(v) => DiffOutcome::Contradiction(format!("seed {seed}: SOLVABLE but {v}\n{text}")),
            }
        }
        Verdict::Unsolvable { cex, .. } => {
            if validate(&p, &cex) {
                DiffOutcome::Unsolvable
            } else {
                DiffOutcome::Contradiction(format!("seed {seed}: counterexample not derivable {cex}\n{text}"))
            }
        }
        _ => DiffOutcome::Unknown,
    }
}

// ------------------------------------------------ certificate mutations

fn leaves(e: &Sexp, out: &mut usize) {
    match e {
        Sexp::List(xs, _) => xs.iter().for_each(|x| leaves(x, out)),
        _ => *out += 1,
    }
}

fn collect_symbols(e: &Sexp, out: &mut BTreeSet<String>) {
    match e {
        Sexp::List(xs, _) => xs.iter().for_each(|x| collect_symbols(x, out)),
        Sexp::Sym(s, _) => {
            out.insert(s.clone());
        }
        _ => {}
    }
}

fn mutate_leaf(e: &mut Sexp, k: &mut usize, rng: &mut StdRng, symbols: &[String]) -> bool {
    match e {
        Sexp::List(xs, _) => xs.iter_mut().any(|x| mutate_leaf(x, k, rng, symbols)),
        _ if *k > 0 => {
            *k -= 1;
            false
        }
        Sexp::Num(n, _) => {
            let d = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
            *n = n.clone() + d;
            true
        }
        Sexp::Sym(s, _) => {
            let others: Vec<&String> = symbols.iter().filter(|x| *x != s).collect();
            *s = others[rng.gen_range(0..others.len())].clone();
            true
        }
        Sexp::Str(s, _) => {
            s.push('x');
            true
        }
    }
}

/// Changes one leaf of the certificate's s-expression tree. With
/// probability one half the leaf is drawn from a rule payload.
pub fn mutate_certificate(text: &str, seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut forms = parse_all(text).expect("certificate parses");
    let mut symbols = BTreeSet::new();
    forms.iter().for_each(|f| collect_symbols(f, &mut symbols));
    let symbols: Vec<String> = symbols.into_iter().collect();
    fn find_steps(e: &Sexp, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if e.head() == Some("step") {
            let mut n = 0;
            leaves(e, &mut n);
            if n > 2 {
                out.push(path.clone());
            }
        }
        if let Sexp::List(xs, _) = e {
            for (i, x) in xs.iter().enumerate() {
                path.push(i);
                find_steps(x, path, out);
                path.pop();
            }
        }
    }
    let mut targets: Vec<Vec<usize>> = Vec::new();
    if rng.gen_bool(0.5) {
        for (i, f) in forms.iter().enumerate() {
            find_steps(f, &mut vec![i], &mut targets);
        }
    }
    if targets.is_empty() {
        targets = (0..forms.len()).map(|i| vec![i]).collect();
    }
    let path = &targets[rng.gen_range(0..targets.len())];
    let mut node = &mut forms[path[0]];
    for &i in &path[1..] {
        let Sexp::List(xs, _) = node else { unreachable!() };
        node = &mut xs[i];
    }
    let mut n = 0;
    leaves(node, &mut n);
    // skip the `step` keyword itself
    let first = usize::from(node.head() == Some("step"));
    let mut k = rng.gen_range(first..n.max(first + 1));
    mutate_leaf(node, &mut k, &mut rng, &symbols);
    forms.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

// ------------------------------------------------------------ properties

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha))
}

fn arb_term() -> impl Strategy<Value = Term> {
    (-2i64..=2, -2i64..=2, -2i64..=2, 0usize..3).prop_map(|(c0, c1, c2, pick)| {
        let vars = ["x", "y", "z"];
        let a = vars[pick];
        let b = vars[(pick + 1) % 3];
        Term::add(Term::add(Term::int(c0), Term::mul(Term::int(c1), Term::var(a))), Term::mul(Term::int(c2), Term::var(b)))
    })
}

fn arb_atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        (arb_term(), arb_term()).prop_map(|(a, b)| Atom::new("P", vec![a, b])),
        arb_term().prop_map(|a| Atom::new("Q", vec![a])),
    ]
}

fn arb_annotated() -> impl Strategy<Value = AnnotatedAtom> {
    (arb_atom(), proptest::collection::btree_set(0u32..3, 0..3)).prop_map(|(atom, ms)| {
        let mut a = AnnotatedAtom::plain(atom);
        a.marks = ms.into_iter().map(InductionId).collect();
        a
    })
}

fn arb_model() -> impl Strategy<Value = Model> {
    (-3i64..=3, -3i64..=3, -3i64..=3).prop_map(|(x, y, z)| {
        [("x", x), ("y", y), ("z", z)].into_iter().map(|(k, n)| (Ident::new(k), BigInt::from(n))).collect()
    })
}

fn ground(a: &Atom, m: &Model) -> (Ident, Vec<BigInt>) {
    (a.pred.clone(), a.args.iter().map(|t| t.eval(m).expect("closed under model")).collect())
}

/// Membership encoding: under any assignment, `⌊P(t) ∈ A⌋` holds exactly
/// when some atom of `A` (with the required mark) denotes the same ground
/// atom, so `∧A ∧ φ ⇒ P(t)` follows from `φ ⇒ ⌊P(t) ∈ A⌋`.
pub fn prop_in_semantics(cases: u32) -> Result<(), String> {
    let strat = (arb_atom(), proptest::collection::vec(arb_annotated(), 0..5), proptest::option::of(0u32..3), arb_model());
    runner(cases)
        .run(&strat, |(target, set, alpha, m)| {
            let alpha = alpha.map(InductionId);
            let enc = match alpha {
                Some(a) => in_encoding(InTarget::Hyp(a, &target), set.iter()),
                None => in_encoding(InTarget::Atom(&target), set.iter()),
            };
            let holds = enc.eval(&m) == Some(true);
            let g = ground(&target, &m);
            let witness = set.iter().any(|b| alpha.is_none_or(|a| b.marks.contains(&a)) && ground(&b.atom, &m) == g);
            prop_assert_eq!(holds, witness);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Subset encoding: `⌊A1 ⊆ A2⌋` holds exactly when every atom of `A1`
/// denotes some atom of `A2`.
pub fn prop_sub_semantics(cases: u32) -> Result<(), String> {
    let strat = (
        proptest::collection::vec(arb_atom(), 0..4),
        proptest::collection::vec(arb_annotated(), 0..5),
        arb_model(),
    );
    runner(cases)
        .run(&strat, |(a1, a2, m)| {
            let holds = sub_encoding(&a1, a2.iter()).eval(&m) == Some(true);
            let expected = a1.iter().all(|a| {
                let g = ground(a, &m);
                a2.iter().any(|b| ground(&b.atom, &m) == g)
            });
            prop_assert_eq!(holds, expected);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `F^k(∅) ⊆ F^{k+1}(∅)` and `S1 ⊆ S2 ⇒ F(S1) ⊆ F(S2)` on random problems.
pub fn prop_kleene_monotone(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&any::<u64>(), |seed| {
            let p = parse_problem(&random_hccs(seed)).expect("parses");
            let bound = BigInt::from(3);
            let mut prev = GroundAtomSet::empty(&p.hccs);
            for k in 1..=5 {
                let next = bounded_least_model(&p.hccs, 3, k);
                prop_assert!(prev.is_subset(&next), "iteration {} shrinks", k);
                let (fp, fn_) = (consequence_step(&p.hccs, &prev, &bound), consequence_step(&p.hccs, &next, &bound));
                prop_assert!(fp.is_subset(&fn_), "consequence step is not monotone");
                prev = next;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Problems, s-expressions and counterexamples read back as what was
/// printed.
pub fn prop_round_trips(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(any::<u64>(), arb_model()), |(seed, m)| {
            let text = random_hccs(seed);
            let p = parse_problem(&text).expect("parses");
            let printed = print_problem(&p);
            let back = parse_problem(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(print_problem(&back), printed);
            for f in parse_all(&text).unwrap() {
                let again = parse_all(&f.to_string()).unwrap();
                prop_assert_eq!(again.len(), 1);
                prop_assert_eq!(again[0].to_string(), f.to_string());
            }
            let cex = Counterexample { goal: (seed % 3) as usize, model: m };
            prop_assert_eq!(Counterexample::parse(&cex.to_string()).unwrap(), cex);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let cmp = (arb_term(), arb_term(), 0usize..4, any::<bool>()).prop_map(|(a, b, op, square)| {
        let b = if square { Term::mul(b.clone(), b) } else { b };
        match op {
            0 => Formula::le(a, b),
            1 => Formula::lt(a, b),
            2 => Formula::eq(a, b),
            _ => Formula::ne(a, b),
        }
    });
    cmp.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Formula::and),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(Formula::or),
            inner.prop_map(Formula::not),
        ]
    })
}

/// Terms and formulas print as text that reads back equal.
pub fn prop_formula_round_trip(cases: u32) -> Result<(), String> {
    let decls = BTreeMap::new();
    let ctx = ReadCtx { decls: &decls, allow_reserved: true };
    runner(cases)
        .run(&arb_formula(), |f| {
            let e = parse_all(&f.to_string()).unwrap().remove(0);
            let back = ctx.formula(&e).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(back.to_string(), f.to_string());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Every `sat` answer comes with a model that satisfies the query; every
/// `unsat` answer has no satisfying point in a small box.
pub fn prop_smt_model_soundness(cases: u32) -> Result<(), String> {
    let session = std::cell::RefCell::new(SmtSession::new(SmtConfig::default()));
    runner(cases)
        .run(&arb_formula(), |f| {
            let r = session.borrow_mut().check_sat(&f).map_err(|e| TestCaseError::fail(e.to_string()))?;
            match r {
                SatResult::Sat(m) => prop_assert_eq!(f.eval(&m), Some(true), "model {:?} violates {}", m, f),
                SatResult::Unsat => {
                    for x in -3i64..=3 {
                        for y in -3i64..=3 {
                            for z in -3i64..=3 {
                                let m: Model = [("x", x), ("y", y), ("z", z)]
                                    .into_iter()
                                    .map(|(k, n)| (Ident::new(k), BigInt::from(n)))
                                    .collect();
                                prop_assert_ne!(f.eval(&m), Some(true), "unsat but {:?} satisfies {}", m, f);
                            }
                        }
                    }
                }
                SatResult::Unknown(_) => {}
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}
