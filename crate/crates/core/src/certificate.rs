//! Proof certificates: a versioned s-expression encoding of proof trees and
//! a replay checker that re-runs every recorded rule application.
//!
//! ```text
//! (version 1)
//! (lemma 0 NODE)
//! (goal 0 NODE)
//! NODE := (node (judgment ...) (step ...) (children NODE ...))
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::clause::{AnnotatedAtom, Atom, GammaEntry, Guard, Head, InductionId};
use crate::engine::judgment::{Defs, EntryKey, Judgment, OccId, Snapshot};
use crate::engine::rules::{execute_step, Checker, RuleError, Step};
use crate::engine::strategy::ProofNode;
use crate::frontend::{ProblemFile, ReadCtx};
use crate::sexp::{parse_all, Sexp};
use crate::smt::{SmtConfig, SmtError, SmtSession};
use crate::term::{Formula, Ident, Substitution, Term};

pub const VERSION: u32 = 1;
pub const EXTENSION: &str = "ihcp";

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Certificate {
    pub lemmas: Vec<ProofNode>,
    pub goals: Vec<ProofNode>,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("unsupported certificate version {found} (expected {VERSION})")]
    VersionMismatch { found: String },
    #[error(transparent)]
    Smt(#[from] SmtError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayResult {
    Verified,
    /// `path` names the proof and the child indices leading to the node.
    Rejected { reason: String, path: String },
}

impl ReplayResult {
    pub fn is_verified(&self) -> bool {
        matches!(self, ReplayResult::Verified)
    }
}

// ---------------------------------------------------------------- writing

fn atom_text(a: &Atom) -> String {
    a.to_string()
}

fn marks_text(marks: &BTreeSet<InductionId>) -> String {
    let ms: Vec<String> = marks.iter().map(ToString::to_string).collect();
    format!("(marks{}{})", if ms.is_empty() { "" } else { " " }, ms.join(" "))
}

fn entry_key_text(k: EntryKey) -> String {
    match k {
        EntryKey::Lemma(i) => format!("(lemma {i})"),
        EntryKey::Hyp(a) => format!("(hyp {a})"),
    }
}

fn list(head: &str, items: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("({head}");
    for it in items {
        s.push(' ');
        s.push_str(&it);
    }
    s.push(')');
    s
}

fn sigma_text(s: &Substitution) -> String {
    list("sigma", s.iter().map(|(v, t)| format!("({v} {t})")))
}

fn renaming_text(head: &str, r: &[(Ident, Ident)]) -> String {
    list(head, r.iter().map(|(a, b)| format!("({a} {b})")))
}

fn step_text(step: &Step) -> String {
    match step {
        Step::Induct { occ, alpha, renaming } => {
            format!("(induct (occ {}) (alpha {alpha}) {})", occ.0, renaming_text("renaming", renaming))
        }
        Step::Unfold { occ, renamings } => {
            let mut s = format!("(unfold (occ {})", occ.0);
            for r in renamings {
                s.push(' ');
                s.push_str(&renaming_text("branch", r));
            }
            s.push(')');
            s
        }
        Step::ApplyBot { entry, sigma } => format!("(apply-bot {} {})", entry_key_text(*entry), sigma_text(sigma)),
        Step::ApplyP { entry, sigma, replace } => {
            let r = replace.map(|o| format!(" (replace {})", o.0)).unwrap_or_default();
            format!("(apply-p {} {}{r})", entry_key_text(*entry), sigma_text(sigma))
        }
        Step::Fold { clause, sigma } => format!("(fold (clause {clause}) {})", sigma_text(sigma)),
        Step::ValidBot => "(valid-bot)".into(),
        Step::ValidP => "(valid-p)".into(),
    }
}

fn entry_text(key: EntryKey, e: Option<&GammaEntry>) -> String {
    match (key, e) {
        (EntryKey::Hyp(alpha), Some(e)) => {
            let pivot = match &e.guard {
                Guard::Hyp { pivot, .. } => atom_text(pivot),
                Guard::Lemma => "false".into(),
            };
            format!(
                "(hyp {alpha} (pivot {pivot}) {} (formula {}) (conclusion {}))",
                list("atoms", e.premise_atoms.iter().map(atom_text)),
                e.premise_formula,
                e.conclusion
            )
        }
        _ => entry_key_text(key),
    }
}

fn snapshot_text(s: &Snapshot, indent: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{indent}(judgment");
    let _ = writeln!(out, "{indent}  {}", list("gamma", s.gamma.iter().map(|(k, e)| entry_text(*k, e.as_ref()))));
    let atoms = s.atoms.iter().map(|(id, a)| {
        let ind = a.inducted.map_or("none".to_string(), |x| x.to_string());
        format!("({} {} {} (inducted {ind}) (unfolded {}))", id.0, atom_text(&a.atom), marks_text(&a.marks), a.unfolded)
    });
    let _ = writeln!(out, "{indent}  {}", list("atoms", atoms));
    let _ = writeln!(out, "{indent}  {}", list("knowledge", s.knowledge.iter().map(ToString::to_string)));
    let _ = write!(out, "{indent}  (target {}))", s.target);
    out
}

fn node_text(n: &ProofNode, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let _ = writeln!(out, "{indent}(node");
    out.push_str(&snapshot_text(&n.snapshot, &format!("{indent}  ")));
    out.push('\n');
    let _ = write!(out, "{indent}  (step {})", step_text(&n.step));
    if n.children.is_empty() {
        out.push_str(" (children))");
        return;
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{indent}  (children");
    for c in &n.children {
        node_text(c, depth + 2, out);
        out.push('\n');
    }
    let _ = write!(out, "{indent}  ))");
}

/// Canonical text of a certificate; equal certificates give equal text.
pub fn serialize(cert: &Certificate) -> String {
    let mut out = format!("(version {VERSION})\n");
    for (kind, trees) in [("lemma", &cert.lemmas), ("goal", &cert.goals)] {
        for (i, t) in trees.iter().enumerate() {
            let _ = writeln!(out, "({kind} {i}");
            node_text(t, 1, &mut out);
            out.push_str(")\n");
        }
    }
    out
}

pub fn snapshot_key(s: &Snapshot) -> String {
    snapshot_text(s, "")
}

// ---------------------------------------------------------------- reading

fn bad<T>(e: &Sexp, msg: impl std::fmt::Display) -> Result<T, CertificateError> {
    Err(CertificateError::Malformed(format!("{}: {msg}", e.pos())))
}

fn items<'a>(e: &'a Sexp, head: &str) -> Result<&'a [Sexp], CertificateError> {
    match e.as_list() {
        Some(l) if e.head() == Some(head) => Ok(&l[1..]),
        _ => bad(e, format!("expected `({head} ...)`")),
    }
}

fn exactly<'a, const N: usize>(e: &'a Sexp, head: &str) -> Result<&'a [Sexp; N], CertificateError> {
    let xs = items(e, head)?;
    xs.try_into().or_else(|_| bad(e, format!("`{head}` takes {N} argument(s)")))
}

fn number<T: TryFrom<u64>>(e: &Sexp) -> Result<T, CertificateError> {
    let Sexp::Num(n, _) = e else { return bad(e, "expected a number") };
    u64::try_from(n).ok().and_then(|v| T::try_from(v).ok()).map_or_else(|| bad(e, "number out of range"), Ok)
}

fn flag(e: &Sexp) -> Result<bool, CertificateError> {
    match e.as_sym() {
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        _ => bad(e, "expected `true` or `false`"),
    }
}

struct Reader {
    decls: BTreeMap<Ident, usize>,
}

impl Reader {
    fn ctx(&self) -> ReadCtx<'_> {
        ReadCtx { decls: &self.decls, allow_reserved: true }
    }

    fn ident(&self, e: &Sexp) -> Result<Ident, CertificateError> {
        self.ctx().ident(e).or_else(|err| bad(e, err.msg))
    }

    fn term(&self, e: &Sexp) -> Result<Term, CertificateError> {
        self.ctx().term(e).or_else(|err| bad(e, err.msg))
    }

    fn formula(&self, e: &Sexp) -> Result<Formula, CertificateError> {
        self.ctx().formula(e).or_else(|err| bad(e, err.msg))
    }

    fn alpha(&self, e: &Sexp) -> Result<InductionId, CertificateError> {
        e.as_sym()
            .and_then(|s| s.strip_prefix('a'))
            .and_then(|n| n.parse().ok())
            .map_or_else(|| bad(e, "expected an induction identifier `aN`"), |n| Ok(InductionId(n)))
    }

    fn atom(&self, e: &Sexp) -> Result<Atom, CertificateError> {
        let (pred, args) = match e {
            Sexp::Sym(..) => (self.ident(e)?, Vec::new()),
            Sexp::List(xs, _) if !xs.is_empty() => {
                let args = xs[1..].iter().map(|a| self.term(a)).collect::<Result<_, _>>()?;
                (self.ident(&xs[0])?, args)
            }
            _ => return bad(e, "expected an atom"),
        };
        Ok(Atom { pred, args })
    }

    fn head(&self, e: &Sexp) -> Result<Head, CertificateError> {
        if e.as_sym() == Some("false") {
            return Ok(Head::Bottom);
        }
        Ok(Head::Atom(self.atom(e)?))
    }

    fn entry_key(&self, e: &Sexp) -> Result<EntryKey, CertificateError> {
        match e.head() {
            Some("lemma") => Ok(EntryKey::Lemma(number(&exactly::<1>(e, "lemma")?[0])?)),
            Some("hyp") => Ok(EntryKey::Hyp(self.alpha(&exactly::<1>(e, "hyp")?[0])?)),
            _ => bad(e, "expected `(lemma N)` or `(hyp aN)`"),
        }
    }

    fn gamma_entry(&self, e: &Sexp) -> Result<(EntryKey, Option<GammaEntry>), CertificateError> {
        if e.head() == Some("hyp") && e.as_list().is_some_and(|l| l.len() == 6) {
            let [alpha, pivot, atoms, formula, concl] = exactly::<5>(e, "hyp")?;
            let alpha = self.alpha(alpha)?;
            let pivot = self.atom(&exactly::<1>(pivot, "pivot")?[0])?;
            let premise_atoms = items(atoms, "atoms")?.iter().map(|a| self.atom(a)).collect::<Result<_, _>>()?;
            let premise_formula = self.formula(&exactly::<1>(formula, "formula")?[0])?;
            let conclusion = self.head(&exactly::<1>(concl, "conclusion")?[0])?;
            let entry = GammaEntry { guard: Guard::Hyp { alpha, pivot }, premise_atoms, premise_formula, conclusion };
            return Ok((EntryKey::Hyp(alpha), Some(entry)));
        }
        let key = self.entry_key(e)?;
        if matches!(key, EntryKey::Hyp(_)) {
            return bad(e, "hypothesis entries need their contents");
        }
        Ok((key, None))
    }

    fn snapshot(&self, e: &Sexp) -> Result<Snapshot, CertificateError> {
        let [gamma, atoms, knowledge, target] = exactly::<4>(e, "judgment")?;
        let gamma = items(gamma, "gamma")?.iter().map(|g| self.gamma_entry(g)).collect::<Result<_, _>>()?;
        let atoms = items(atoms, "atoms")?
            .iter()
            .map(|a| {
                let xs = a.as_list().filter(|l| l.len() == 5).map_or_else(|| bad(a, "malformed atom entry"), Ok)?;
                let id = OccId(number(&xs[0])?);
                let atom = self.atom(&xs[1])?;
                let marks = items(&xs[2], "marks")?.iter().map(|m| self.alpha(m)).collect::<Result<_, _>>()?;
                let ind = &exactly::<1>(&xs[3], "inducted")?[0];
                let inducted = if ind.as_sym() == Some("none") { None } else { Some(self.alpha(ind)?) };
                let unfolded = flag(&exactly::<1>(&xs[4], "unfolded")?[0])?;
                Ok::<_, CertificateError>((id, AnnotatedAtom { atom, marks, inducted, unfolded }))
            })
            .collect::<Result<_, _>>()?;
        let knowledge = items(knowledge, "knowledge")?.iter().map(|f| self.formula(f)).collect::<Result<_, _>>()?;
        let target = self.head(&exactly::<1>(target, "target")?[0])?;
        Ok(Snapshot { gamma, atoms, knowledge, target })
    }

    fn sigma(&self, e: &Sexp) -> Result<Substitution, CertificateError> {
        let mut s = Substitution::new();
        for b in items(e, "sigma")? {
            let pair = b.as_list().filter(|l| l.len() == 2).map_or_else(|| bad(b, "expected `(var term)`"), Ok)?;
            if s.insert(self.ident(&pair[0])?, self.term(&pair[1])?).is_some() {
                return bad(b, "variable bound twice");
            }
        }
        Ok(s)
    }

    fn renaming(&self, e: &Sexp, head: &str) -> Result<Vec<(Ident, Ident)>, CertificateError> {
        items(e, head)?
            .iter()
            .map(|b| {
                let pair = b.as_list().filter(|l| l.len() == 2).map_or_else(|| bad(b, "expected `(old new)`"), Ok)?;
                Ok((self.ident(&pair[0])?, self.ident(&pair[1])?))
            })
            .collect()
    }

    fn occ(&self, e: &Sexp) -> Result<OccId, CertificateError> {
        Ok(OccId(number(&exactly::<1>(e, "occ")?[0])?))
    }

    fn step(&self, e: &Sexp) -> Result<Step, CertificateError> {
        Ok(match e.head() {
            Some("induct") => {
                let [occ, alpha, renaming] = exactly::<3>(e, "induct")?;
                Step::Induct {
                    occ: self.occ(occ)?,
                    alpha: self.alpha(&exactly::<1>(alpha, "alpha")?[0])?,
                    renaming: self.renaming(renaming, "renaming")?,
                }
            }
            Some("unfold") => {
                let xs = items(e, "unfold")?;
                let Some((occ, branches)) = xs.split_first() else { return bad(e, "missing occurrence") };
                let renamings = branches.iter().map(|b| self.renaming(b, "branch")).collect::<Result<_, _>>()?;
                Step::Unfold { occ: self.occ(occ)?, renamings }
            }
            Some("apply-bot") => {
                let [entry, sigma] = exactly::<2>(e, "apply-bot")?;
                Step::ApplyBot { entry: self.entry_key(entry)?, sigma: self.sigma(sigma)? }
            }
            Some("apply-p") => {
                let xs = items(e, "apply-p")?;
                if xs.len() != 2 && xs.len() != 3 {
                    return bad(e, "`apply-p` takes 2 or 3 arguments");
                }
                let replace = match xs.get(2) {
                    Some(r) => Some(OccId(number(&exactly::<1>(r, "replace")?[0])?)),
                    None => None,
                };
                Step::ApplyP { entry: self.entry_key(&xs[0])?, sigma: self.sigma(&xs[1])?, replace }
            }
            Some("fold") => {
                let [clause, sigma] = exactly::<2>(e, "fold")?;
                Step::Fold { clause: number(&exactly::<1>(clause, "clause")?[0])?, sigma: self.sigma(sigma)? }
            }
            Some("valid-bot") => {
                exactly::<0>(e, "valid-bot")?;
                Step::ValidBot
            }
            Some("valid-p") => {
                exactly::<0>(e, "valid-p")?;
                Step::ValidP
            }
            _ => return bad(e, "unknown rule"),
        })
    }

    fn node(&self, e: &Sexp) -> Result<ProofNode, CertificateError> {
        let [judgment, step, children] = exactly::<3>(e, "node")?;
        Ok(ProofNode {
            snapshot: self.snapshot(judgment)?,
            step: self.step(&exactly::<1>(step, "step")?[0])?,
            children: items(children, "children")?.iter().map(|c| self.node(c)).collect::<Result<_, _>>()?,
        })
    }
}

pub fn deserialize(text: &str) -> Result<Certificate, CertificateError> {
    let forms = parse_all(text).map_err(|e| CertificateError::Malformed(e.to_string()))?;
    let Some((first, rest)) = forms.split_first() else {
        return Err(CertificateError::Malformed("empty certificate".into()));
    };
    let [v] = exactly::<1>(first, "version")?;
    if !matches!(v, Sexp::Num(n, _) if *n == VERSION.into()) {
        return Err(CertificateError::VersionMismatch { found: v.to_string() });
    }
    let reader = Reader { decls: BTreeMap::new() };
    let mut cert = Certificate::default();
    for f in rest {
        let (kind, list) = match f.head() {
            Some("lemma") => ("lemma", &mut cert.lemmas),
            Some("goal") => ("goal", &mut cert.goals),
            _ => return bad(f, "expected `(lemma N NODE)` or `(goal N NODE)`"),
        };
        let [idx, node] = exactly::<2>(f, kind)?;
        if number::<usize>(idx)? != list.len() {
            return bad(idx, format!("{kind} proofs must be numbered consecutively from 0"));
        }
        list.push(reader.node(node)?);
    }
    Ok(cert)
}

// ---------------------------------------------------------------- replay

struct Replay<'a, 'b> {
    chk: Checker<'a>,
    proof: String,
    alphas: &'b mut BTreeSet<InductionId>,
}

fn path_text(proof: &str, path: &[usize]) -> String {
    let steps: Vec<String> = path.iter().map(ToString::to_string).collect();
    if steps.is_empty() {
        proof.to_string()
    } else {
        format!("{proof}/{}", steps.join("/"))
    }
}

impl Replay<'_, '_> {
    fn reject(&self, path: &[usize], reason: impl Into<String>) -> ReplayResult {
        ReplayResult::Rejected { reason: reason.into(), path: path_text(&self.proof, path) }
    }

    /// Checks `node` against the judgment `j` derived so far.
    fn check(&mut self, j: &Judgment, node: &ProofNode, path: &mut Vec<usize>) -> Result<ReplayResult, SmtError> {
        if snapshot_key(&j.snapshot()) != snapshot_key(&node.snapshot) {
            return Ok(self.reject(path, "recorded judgment differs from the derived one"));
        }
        if let Step::Induct { alpha, .. } = &node.step {
            if !self.alphas.insert(*alpha) {
                return Ok(self.reject(path, format!("induction identifier {alpha} is used twice")));
            }
        }
        let premises = match execute_step(&mut self.chk, j, &node.step) {
            Ok(p) => p,
            Err(RuleError::Smt(e)) => return Err(e),
            Err(RuleError::NotApplicable(m)) => return Ok(self.reject(path, format!("{}: {m}", node.step.name()))),
        };
        if premises.len() != node.children.len() {
            let msg = format!("{} yields {} premise(s), node has {}", node.step.name(), premises.len(), node.children.len());
            return Ok(self.reject(path, msg));
        }
        for (i, (p, c)) in premises.iter().zip(&node.children).enumerate() {
            path.push(i);
            let r = self.check(p, c, path)?;
            path.pop();
            if !r.is_verified() {
                return Ok(r);
            }
        }
        Ok(ReplayResult::Verified)
    }
}

/// Replays every proof against `problem`. Each rule application is
/// re-executed with all side conditions sent to a fresh solver session.
pub fn replay(cert: &Certificate, problem: &ProblemFile, smt: &SmtConfig) -> Result<ReplayResult, CertificateError> {
    let rejected = |reason: String, path: &str| ReplayResult::Rejected { reason, path: path.into() };
    if cert.lemmas.len() != problem.lemmas.len() {
        let msg = format!("root mismatch: problem has {} lemma(s), certificate {}", problem.lemmas.len(), cert.lemmas.len());
        return Ok(rejected(msg, "lemmas"));
    }
    let hccs = &problem.hccs;
    if cert.goals.len() != hccs.goals.len() {
        let msg = format!("root mismatch: problem has {} goal(s), certificate {}", hccs.goals.len(), cert.goals.len());
        return Ok(rejected(msg, "goals"));
    }
    let defs = Defs::new(hccs);
    let mut session = SmtSession::new(smt.clone());
    let roots = problem
        .lemmas
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let root = Judgment::root(defs.clone(), &problem.lemmas[..i], &l.premise_atoms, &l.premise_formula, l.conclusion.clone());
            (format!("lemma {i}"), root, &cert.lemmas[i])
        })
        .chain(hccs.goals.iter().enumerate().map(|(i, g)| {
            let root = Judgment::root(defs.clone(), &problem.lemmas, &g.body_atoms, &g.body_formula, g.head.clone());
            (format!("goal {i}"), root, &cert.goals[i])
        }));
    for (name, root, tree) in roots {
        if snapshot_key(&root.snapshot()) != snapshot_key(&tree.snapshot) {
            return Ok(rejected("root mismatch: judgment differs from the problem".into(), &name));
        }
        let mut alphas = BTreeSet::new();
        let mut r = Replay { chk: Checker { smt: &mut session, strict: true }, proof: name, alphas: &mut alphas };
        let res = r.check(&root, tree, &mut Vec::new())?;
        if !res.is_verified() {
            return Ok(res);
        }
    }
    Ok(ReplayResult::Verified)
}

/// Parses and replays certificate text.
pub fn replay_text(text: &str, problem: &ProblemFile, smt: &SmtConfig) -> Result<ReplayResult, CertificateError> {
    replay(&deserialize(text)?, problem, smt)
}
