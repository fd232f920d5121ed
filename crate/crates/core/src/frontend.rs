//! Problem files: a native s-expression grammar with lemmas and options,
//! plus the HORN fragment of SMT-LIB2.
//!
//! ```text
//! (declare-pred P Int Int)
//! (clause (forall ((x Int) (r Int)) (=> (and (P x r) (<= 0 x)) (P (+ x 1) r))))
//! (clause (forall (x r) (=> (and (P x r) (< r 0)) false)))
//! (lemma (forall (x r) (=> (P x r) (P x r))))
//! (option max-inductions 6)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use thiserror::Error;

use crate::clause::{disjoint_renamings, normalize_hccs, Atom, GammaEntry, Hccs, Head, HornClause, ModelError};
use crate::sexp::{parse_all, Pos, Sexp, SexpError};
use crate::term::{CmpOp, Formula, Ident, Term, RESERVED_PREFIX};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ProblemFile {
    pub hccs: Hccs,
    pub lemmas: Vec<GammaEntry>,
    pub options: BTreeMap<String, String>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    Arity,
    UndeclaredPredicate,
    ReservedName,
    UnboundVariable,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
    pub msg: String,
}

impl From<SexpError> for ParseError {
    fn from(e: SexpError) -> Self {
        ParseError { kind: ParseErrorKind::Lexical, pos: e.pos, msg: e.msg }
    }
}

fn err(kind: ParseErrorKind, at: &Sexp, msg: impl Into<String>) -> ParseError {
    ParseError { kind, pos: at.pos(), msg: msg.into() }
}

const KEYWORDS: &[&str] = &[
    "and", "or", "not", "=>", "true", "false", "forall", "exists", "+", "-", "*", "<=", "<", ">=", ">", "=",
    "distinct", "ite", "let", "Int", "Bool", "div", "mod", "abs",
];

fn is_simple_symbol(s: &str) -> bool {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || "~!@$%^&_.?/".contains(c) => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c))
}

/// Settings for reading terms and formulas.
#[derive(Clone, Copy)]
pub struct ReadCtx<'a> {
    pub decls: &'a BTreeMap<Ident, usize>,
    /// Certificates contain solver-generated names.
    pub allow_reserved: bool,
}

impl ReadCtx<'_> {
    pub fn ident(&self, e: &Sexp) -> Result<Ident, ParseError> {
        let s = e.as_sym().ok_or_else(|| err(ParseErrorKind::Syntax, e, "expected a symbol"))?;
        if s.starts_with(RESERVED_PREFIX) {
            if !self.allow_reserved {
                return Err(err(
                    ParseErrorKind::ReservedName,
                    e,
                    format!("identifier `{s}` uses the reserved prefix `{RESERVED_PREFIX}`"),
                ));
            }
        } else if !is_simple_symbol(s) || KEYWORDS.contains(&s) {
            return Err(err(ParseErrorKind::Syntax, e, format!("`{s}` is not a valid identifier")));
        }
        Ok(Ident::new(s))
    }

    pub fn term(&self, e: &Sexp) -> Result<Term, ParseError> {
        match e {
            Sexp::Num(n, _) => Ok(Term::Int(n.clone())),
            Sexp::Sym(..) => {
                let id = self.ident(e)?;
                if self.decls.contains_key(&id) {
                    return Err(err(ParseErrorKind::Syntax, e, format!("predicate `{id}` used as a term")));
                }
                Ok(Term::Var(id))
            }
            Sexp::Str(..) => Err(err(ParseErrorKind::Syntax, e, "string literal in term position")),
            Sexp::List(items, _) => {
                let op = items.first().and_then(Sexp::as_sym).ok_or_else(|| {
                    err(ParseErrorKind::Syntax, e, "expected an arithmetic operator")
                })?;
                let args = &items[1..];
                if args.is_empty() {
                    return Err(err(ParseErrorKind::Syntax, e, format!("`{op}` needs arguments")));
                }
                match op {
                    "+" | "*" => {
                        let mut ts = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                        let first = ts.remove(0);
                        Ok(ts.into_iter().fold(first, |acc, t| if op == "+" { Term::add(acc, t) } else { Term::mul(acc, t) }))
                    }
                    "-" if args.len() == 1 => match &args[0] {
                        Sexp::Num(n, _) => Ok(Term::Int(-n)),
                        other => Ok(Term::neg(self.term(other)?)),
                    },
                    "-" => {
                        let mut ts = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                        let first = ts.remove(0);
                        Ok(ts.into_iter().fold(first, Term::sub))
                    }
                    _ => Err(err(ParseErrorKind::Syntax, e, format!("unsupported term operator `{op}`"))),
                }
            }
        }
    }

    pub fn binders(&self, e: &Sexp) -> Result<Vec<Ident>, ParseError> {
        let items = e.as_list().ok_or_else(|| err(ParseErrorKind::Syntax, e, "expected a binder list"))?;
        let mut out = Vec::new();
        for b in items {
            let id = match b {
                Sexp::List(pair, _) => {
                    if pair.len() != 2 || pair[1].as_sym() != Some("Int") {
                        return Err(err(ParseErrorKind::Syntax, b, "binder must be `(name Int)`"));
                    }
                    self.ident(&pair[0])?
                }
                _ => self.ident(b)?,
            };
            if out.contains(&id) {
                return Err(err(ParseErrorKind::Syntax, b, format!("duplicate binder `{id}`")));
            }
            out.push(id);
        }
        Ok(out)
    }

    /// A formula without predicate atoms.
    pub fn formula(&self, e: &Sexp) -> Result<Formula, ParseError> {
        match e {
            Sexp::Sym(s, _) if s == "true" => Ok(Formula::True),
            Sexp::Sym(s, _) if s == "false" => Ok(Formula::False),
            Sexp::List(items, _) if !items.is_empty() => {
                let op = items[0].as_sym().unwrap_or("");
                let args = &items[1..];
                let terms = || args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>();
                let forms = || args.iter().map(|a| self.formula(a)).collect::<Result<Vec<_>, _>>();
                let chain = |op: CmpOp, flip: bool| -> Result<Formula, ParseError> {
                    let ts = terms()?;
                    if ts.len() < 2 {
                        return Err(err(ParseErrorKind::Syntax, e, "comparison needs two operands"));
                    }
                    Ok(Formula::and(
                        ts.windows(2)
                            .map(|w| {
                                if flip {
                                    Formula::cmp(op, w[1].clone(), w[0].clone())
                                } else {
                                    Formula::cmp(op, w[0].clone(), w[1].clone())
                                }
                            })
                            .collect(),
                    ))
                };
                match op {
                    "<=" => chain(CmpOp::Le, false),
                    "<" => chain(CmpOp::Lt, false),
                    ">=" => chain(CmpOp::Le, true),
                    ">" => chain(CmpOp::Lt, true),
                    "=" => chain(CmpOp::Eq, false),
                    "distinct" => {
                        let ts = terms()?;
                        if ts.len() < 2 {
                            return Err(err(ParseErrorKind::Syntax, e, "`distinct` needs two operands"));
                        }
                        let mut parts = Vec::new();
                        for i in 0..ts.len() {
                            for j in i + 1..ts.len() {
                                parts.push(Formula::ne(ts[i].clone(), ts[j].clone()));
                            }
                        }
                        Ok(Formula::and(parts))
                    }
                    "not" if args.len() == 1 => Ok(Formula::not(self.formula(&args[0])?)),
                    "and" => Ok(Formula::and(forms()?)),
                    "or" => Ok(Formula::or(forms()?)),
                    "=>" if args.len() >= 2 => {
                        let mut fs = forms()?;
                        let mut acc = fs.pop().unwrap();
                        while let Some(prem) = fs.pop() {
                            acc = Formula::or(vec![Formula::not(prem), acc]);
                        }
                        Ok(acc)
                    }
                    "forall" | "exists" if args.len() == 2 => {
                        let vs = self.binders(&args[0])?;
                        let body = self.formula(&args[1])?;
                        Ok(if op == "forall" { Formula::forall(vs, body) } else { Formula::exists(vs, body) })
                    }
                    _ => {
                        if let Some(s) = items[0].as_sym() {
                            if self.decls.contains_key(&Ident::new(s)) {
                                return Err(err(
                                    ParseErrorKind::Syntax,
                                    e,
                                    "predicate atoms may only occur as top-level conjuncts of a body",
                                ));
                            }
                        }
                        Err(err(ParseErrorKind::Syntax, e, format!("unsupported formula `{op}`")))
                    }
                }
            }
            _ => Err(err(ParseErrorKind::Syntax, e, "expected a formula")),
        }
    }

    /// A predicate application, or `None` if `e` is not headed by a
    /// declared predicate.
    pub fn atom(&self, e: &Sexp) -> Result<Option<Atom>, ParseError> {
        let (name, args) = match e {
            Sexp::Sym(s, _) => (s.as_str(), &[][..]),
            Sexp::List(items, _) if !items.is_empty() => match items[0].as_sym() {
                Some(s) => (s, &items[1..]),
                None => return Ok(None),
            },
            _ => return Ok(None),
        };
        if KEYWORDS.contains(&name) {
            return Ok(None);
        }
        let head = match e {
            Sexp::List(items, _) => &items[0],
            _ => e,
        };
        let pred = self.ident(head)?;
        let Some(&arity) = self.decls.get(&pred) else {
            return Err(err(ParseErrorKind::UndeclaredPredicate, head, format!("undeclared predicate `{pred}`")));
        };
        if arity != args.len() {
            return Err(err(
                ParseErrorKind::Arity,
                e,
                format!("predicate `{pred}` expects {arity} argument(s), found {}", args.len()),
            ));
        }
        let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
        Ok(Some(Atom { pred, args }))
    }

    fn head(&self, e: &Sexp) -> Result<Head, ParseError> {
        if e.as_sym() == Some("false") {
            return Ok(Head::Bottom);
        }
        match self.atom(e)? {
            Some(a) => Ok(Head::Atom(a)),
            None => Err(err(ParseErrorKind::Syntax, e, "head must be a predicate application or `false`")),
        }
    }

    fn body(&self, e: &Sexp, atoms: &mut Vec<Atom>, forms: &mut Vec<Formula>) -> Result<(), ParseError> {
        if e.head() == Some("and") {
            for it in &e.as_list().unwrap()[1..] {
                self.body(it, atoms, forms)?;
            }
            return Ok(());
        }
        match self.atom(e)? {
            Some(a) => atoms.push(a),
            None => forms.push(self.formula(e)?),
        }
        Ok(())
    }

    /// `(forall (vs) (=> body head))`, `(forall (vs) head)`,
    /// `(forall (vs) (not body))` or the same without the quantifier.
    pub fn clause(&self, e: &Sexp) -> Result<HornClause, ParseError> {
        let (binders, inner) = if e.head() == Some("forall") {
            let items = e.as_list().unwrap();
            if items.len() != 3 {
                return Err(err(ParseErrorKind::Syntax, e, "expected `(forall (binders) body)`"));
            }
            (Some(self.binders(&items[1])?), &items[2])
        } else if e.head() == Some("not") && e.as_list().unwrap().len() == 2 {
            let body = &e.as_list().unwrap()[1];
            if body.head() == Some("exists") {
                let items = body.as_list().unwrap();
                if items.len() != 3 {
                    return Err(err(ParseErrorKind::Syntax, body, "expected `(exists (binders) body)`"));
                }
                let vs = self.binders(&items[1])?;
                return self.finish_clause(Some(vs), e, Head::Bottom, &items[2]);
            }
            (None, e)
        } else {
            (None, e)
        };
        match inner.head() {
            Some("=>") => {
                let items = inner.as_list().unwrap();
                if items.len() != 3 {
                    return Err(err(ParseErrorKind::Syntax, inner, "expected `(=> body head)`"));
                }
                let head = self.head(&items[2])?;
                self.finish_clause(binders, e, head, &items[1])
            }
            Some("not") if inner.as_list().unwrap().len() == 2 => {
                self.finish_clause(binders, e, Head::Bottom, &inner.as_list().unwrap()[1])
            }
            _ => {
                let head = self.head(inner)?;
                let empty = Sexp::Sym("true".into(), inner.pos());
                self.finish_clause(binders, e, head, &empty)
            }
        }
    }

    fn finish_clause(
        &self,
        binders: Option<Vec<Ident>>,
        at: &Sexp,
        head: Head,
        body: &Sexp,
    ) -> Result<HornClause, ParseError> {
        let mut atoms = Vec::new();
        let mut forms = Vec::new();
        self.body(body, &mut atoms, &mut forms)?;
        let forms: Vec<Formula> = forms.into_iter().filter(|f| *f != Formula::True).collect();
        let formula = Formula::and(forms);
        if !formula.is_quantifier_free() {
            return Err(err(ParseErrorKind::Syntax, body, "clause bodies must be quantifier-free"));
        }
        let mut clause = HornClause::new(head, atoms, formula);
        if let Some(vs) = binders {
            let scope: BTreeSet<Ident> = vs.into_iter().collect();
            if let Some(v) = clause.vars.iter().find(|v| !scope.contains(*v)) {
                return Err(err(ParseErrorKind::UnboundVariable, at, format!("variable `{v}` is not bound")));
            }
            clause.vars = scope;
        }
        Ok(clause)
    }
}

fn declare(
    decls: &mut BTreeMap<Ident, usize>,
    ctx_allow: bool,
    name: &Sexp,
    sorts: &[Sexp],
) -> Result<(), ParseError> {
    let empty = BTreeMap::new();
    let ctx = ReadCtx { decls: &empty, allow_reserved: ctx_allow };
    let id = ctx.ident(name)?;
    for s in sorts {
        if s.as_sym() != Some("Int") {
            return Err(err(ParseErrorKind::Syntax, s, "only `Int` arguments are supported"));
        }
    }
    if decls.insert(id.clone(), sorts.len()).is_some() {
        return Err(err(ParseErrorKind::Syntax, name, format!("predicate `{id}` declared twice")));
    }
    Ok(())
}

fn model_error(e: ModelError, at: Pos) -> ParseError {
    let kind = match e {
        ModelError::Arity { .. } => ParseErrorKind::Arity,
        ModelError::UndeclaredPredicate(_) => ParseErrorKind::UndeclaredPredicate,
    };
    ParseError { kind, pos: at, msg: e.to_string() }
}

fn option_value(e: &Sexp) -> Result<String, ParseError> {
    match e {
        Sexp::Sym(s, _) | Sexp::Str(s, _) => Ok(s.clone()),
        Sexp::Num(n, _) => Ok(n.to_string()),
        Sexp::List(..) => Err(err(ParseErrorKind::Syntax, e, "option value must be an atom")),
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let forms = parse_all(text)?;
    let smtlib = forms.first().and_then(Sexp::head) == Some("set-logic");
    let mut decls = BTreeMap::new();
    let mut options = BTreeMap::new();
    // first pass: declarations, so clauses may precede them
    for f in &forms {
        let items = f.as_list().unwrap_or(&[]);
        match f.head() {
            Some("declare-pred") if !smtlib => {
                if items.len() < 2 {
                    return Err(err(ParseErrorKind::Syntax, f, "expected `(declare-pred P Int ...)`"));
                }
                declare(&mut decls, false, &items[1], &items[2..])?;
            }
            Some("declare-fun") => {
                if items.len() != 4 || items[3].as_sym() != Some("Bool") || items[2].as_list().is_none() {
                    return Err(err(ParseErrorKind::Syntax, f, "expected `(declare-fun P (Int ...) Bool)`"));
                }
                declare(&mut decls, false, &items[1], items[2].as_list().unwrap())?;
            }
            _ => {}
        }
    }
    let ctx = ReadCtx { decls: &decls, allow_reserved: false };
    let mut clauses = Vec::new();
    let mut clause_pos = Vec::new();
    let mut lemmas = Vec::new();
    for f in &forms {
        let items = f.as_list().unwrap_or(&[]);
        match (smtlib, f.head()) {
            (_, Some("declare-pred")) | (_, Some("declare-fun")) => {}
            (true, Some("set-logic")) => {
                if items.get(1).and_then(Sexp::as_sym) != Some("HORN") {
                    return Err(err(ParseErrorKind::Syntax, f, "only `(set-logic HORN)` is supported"));
                }
            }
            (true, Some("set-info" | "set-option" | "check-sat" | "get-model" | "exit")) => {}
            (true, Some("assert")) if items.len() == 2 => {
                clauses.push(ctx.clause(&items[1])?);
                clause_pos.push(f.pos());
            }
            (false, Some("clause")) if items.len() == 2 => {
                clauses.push(ctx.clause(&items[1])?);
                clause_pos.push(f.pos());
            }
            (false, Some("lemma")) if items.len() == 2 => {
                let c = ctx.clause(&items[1])?;
                lemmas.push((GammaEntry::lemma(c.body_atoms, c.body_formula, c.head), c.vars));
            }
            (false, Some("option")) if items.len() == 3 => {
                let k = items[1].as_sym().ok_or_else(|| err(ParseErrorKind::Syntax, &items[1], "option key"))?;
                options.insert(k.to_string(), option_value(&items[2])?);
            }
            _ => return Err(err(ParseErrorKind::Syntax, f, "unrecognized top-level form")),
        }
    }
    let hccs = normalize_hccs(clauses, &decls)
        .map_err(|e| model_error(e, clause_pos.first().copied().unwrap_or_default()))?;
    let mut taken: BTreeSet<Ident> = decls.keys().cloned().collect();
    for c in hccs.definite.iter().chain(&hccs.goals) {
        taken.extend(c.vars.iter().cloned());
    }
    let scopes: Vec<BTreeSet<Ident>> = lemmas
        .iter()
        .map(|(l, vars)| {
            let mut s = vars.clone();
            s.extend(l.fvs());
            s
        })
        .collect();
    let mut all_scopes = vec![taken.clone()];
    all_scopes.extend(scopes);
    let renamings = disjoint_renamings(&all_scopes, &taken);
    let lemmas = lemmas
        .into_iter()
        .zip(renamings.into_iter().skip(1))
        .map(|((l, _), sub)| l.substitute_vars(&sub))
        .collect();
    Ok(ProblemFile { hccs, lemmas, options })
}

fn binder_list(vars: &BTreeSet<Ident>) -> String {
    let parts: Vec<String> = vars.iter().map(|v| format!("({v} Int)")).collect();
    format!("({})", parts.join(" "))
}

/// Renders `(=> body head)` or a bare head.
pub fn implication_text(atoms: &[Atom], formula: &Formula, head: &Head) -> String {
    let mut items: Vec<String> = atoms.iter().map(ToString::to_string).collect();
    if *formula != Formula::True || items.is_empty() && *head == Head::Bottom {
        items.push(formula.to_string());
    }
    match items.len() {
        0 => head.to_string(),
        1 => format!("(=> {} {head})", items[0]),
        _ => format!("(=> (and {}) {head})", items.join(" ")),
    }
}

fn quantified(vars: &BTreeSet<Ident>, body: String) -> String {
    if vars.is_empty() {
        body
    } else {
        format!("(forall {} {body})", binder_list(vars))
    }
}

fn option_text(v: &str) -> String {
    if !v.is_empty() && (is_simple_symbol(v) || v.bytes().all(|b| b.is_ascii_digit())) {
        v.to_string()
    } else {
        format!("\"{}\"", v.replace('"', "\"\""))
    }
}

/// Native-format text that reads back as an equal problem.
pub fn print_problem(p: &ProblemFile) -> String {
    let mut out = String::new();
    for (pred, arity) in &p.hccs.predicates {
        let _ = write!(out, "(declare-pred {pred}");
        for _ in 0..*arity {
            out.push_str(" Int");
        }
        out.push_str(")\n");
    }
    for (k, v) in &p.options {
        let _ = writeln!(out, "(option {k} {})", option_text(v));
    }
    for c in p.hccs.definite.iter().chain(&p.hccs.goals) {
        let body = implication_text(&c.body_atoms, &c.body_formula, &c.head);
        let _ = writeln!(out, "(clause {})", quantified(&c.vars, body));
    }
    for l in &p.lemmas {
        let body = implication_text(&l.premise_atoms, &l.premise_formula, &l.conclusion);
        let _ = writeln!(out, "(lemma {})", quantified(&l.fvs(), body));
    }
    out
}

/// Reads an integer literal in either `n` or `(- n)` form.
pub fn int_literal(e: &Sexp) -> Option<BigInt> {
    match e {
        Sexp::Num(n, _) => Some(n.clone()),
        Sexp::List(items, _) if items.len() == 2 && items[0].as_sym() == Some("-") => match &items[1] {
            Sexp::Num(n, _) => Some(-n),
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MULT: &str = r#"
; multiplication two ways
(declare-pred P Int Int Int)
(declare-pred Q Int Int Int Int)
(clause (forall (x) (P x 0 0)))
(clause (forall (x y r) (=> (and (P x (- y 1) r) (distinct y 0)) (P x y (+ x r)))))
(clause (forall (x a) (Q x 0 a a)))
(clause (forall (x y a r) (=> (and (Q x (- y 1) (+ a x) r) (distinct y 0)) (Q x y a r))))
(clause (forall (x y r1 a r2) (=> (and (P x y r1) (Q x y a r2) (distinct (+ r1 a) r2)) false)))
"#;

    #[test]
    fn parses_mult() {
        let p = parse_problem(MULT).unwrap();
        assert_eq!(p.hccs.predicates.len(), 2);
        assert_eq!(p.hccs.definite.len(), 4);
        assert_eq!(p.hccs.goals.len(), 1);
    }

    #[test]
    fn parses_lemma() {
        let text = format!("{MULT}(lemma (forall (x y r) (=> (P x y r) (P (- x 1) y (- r y)))))\n");
        let p = parse_problem(&text).unwrap();
        assert_eq!(p.lemmas.len(), 1);
        assert_eq!(p.lemmas[0].guard, crate::clause::Guard::Lemma);
        let clause_vars: BTreeSet<Ident> =
            p.hccs.definite.iter().chain(&p.hccs.goals).flat_map(|c| c.vars.iter().cloned()).collect();
        assert!(p.lemmas[0].fvs().is_disjoint(&clause_vars));
    }

    #[test]
    fn unbalanced_is_lexical_error() {
        let e = parse_problem("(declare-pred P Int\n(clause").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Lexical);
        assert_eq!(e.pos, Pos { line: 2, col: 1 });
    }

    #[test]
    fn reports_arity_and_undeclared() {
        let e = parse_problem("(declare-pred P Int)\n(clause (P 1 2))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity);
        assert_eq!(e.pos.line, 2);
        let e = parse_problem("(declare-pred P Int)\n(clause (=> (R 1) (P 1)))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredPredicate);
    }

    #[test]
    fn rejects_reserved_prefix() {
        let e = parse_problem("(declare-pred P Int)\n(clause (forall (%x) (P %x)))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ReservedName);
        assert_eq!(e.pos, Pos { line: 2, col: 18 });
    }

    #[test]
    fn rejects_unbound() {
        let e = parse_problem("(declare-pred P Int)\n(clause (forall (x) (P y)))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnboundVariable);
    }

    #[test]
    fn smtlib_horn() {
        let text = r#"
(set-logic HORN)
(declare-fun P (Int Int) Bool)
(assert (forall ((x Int)) (=> (> x 100) (P x (- x 10)))))
(assert (forall ((x Int) (r Int) (s Int)) (=> (and (P (+ x 11) r) (P r s) (<= x 100)) (P x s))))
(assert (forall ((x Int) (r Int)) (=> (and (P x r) (<= x 101) (not (= r 91))) false)))
(assert (forall ((x Int)) (not (and (P x x) (< x 0)))))
(check-sat)
"#;
        let p = parse_problem(text).unwrap();
        assert_eq!(p.hccs.definite.len(), 2);
        assert_eq!(p.hccs.goals.len(), 2);
    }

    #[test]
    fn round_trip() {
        let text = format!("{MULT}(lemma (forall (x y r) (=> (P x y r) (P y x r))))\n(option expect sat)\n");
        let p = parse_problem(&text).unwrap();
        let printed = print_problem(&p);
        let q = parse_problem(&printed).unwrap();
        assert_eq!(p, q);
        assert_eq!(print_problem(&q), printed);
    }

    #[test]
    fn empty_round_trip() {
        let p = ProblemFile::default();
        let q = parse_problem(&print_problem(&p)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn negative_literals_round_trip() {
        let text = "(declare-pred P Int)\n(clause (P (- 3)))\n(clause (forall (x) (=> (P x) (P (- x (- 2))))))\n(clause (P (- (+ 4))))";
        let p = parse_problem(text).unwrap();
        let q = parse_problem(&print_problem(&p)).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.hccs.definite[0].head.as_atom().unwrap().args[0], Term::int(-3));
    }
}
