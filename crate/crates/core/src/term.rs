//! Integer terms, quantifier-carrying formulas, substitutions and ground
//! evaluation.
//!
//! Construction never simplifies: a term keeps the shape it was built with.
//! [`Poly`] provides an explicit polynomial normal form used for matching,
//! deduplication and solving unit-coefficient equations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// First character of every solver-generated identifier. User input may not
/// use it.
pub const RESERVED_PREFIX: char = '%';

/// An interned identifier for term variables and predicate symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(name: impl AsRef<str>) -> Self {
        Ident(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }

    /// The user-facing stem of the name: `%x.12` has stem `x`.
    pub fn stem(&self) -> &str {
        if let Some(rest) = self.0.strip_prefix(RESERVED_PREFIX) {
            match rest.rfind('.') {
                Some(dot) if dot > 0 => &rest[..dot],
                _ => rest,
            }
        } else {
            &self.0
        }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

/// An assignment of integers to variables.
pub type Model = BTreeMap<Ident, BigInt>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Ident),
    Int(BigInt),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Ident::new(name))
    }

    pub fn int(value: i64) -> Term {
        Term::Int(BigInt::from(value))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    /// `a - b`, represented as `a + (-b)`.
    pub fn sub(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(Term::Neg(Box::new(b))))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Term) -> Term {
        Term::Neg(Box::new(a))
    }

    pub fn as_var(&self) -> Option<&Ident> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Int(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Neg(a) => a.collect_vars(out),
        }
    }

    pub fn fvs(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Exact evaluation; `None` if a variable is unassigned.
    pub fn eval(&self, model: &Model) -> Option<BigInt> {
        Some(match self {
            Term::Var(v) => model.get(v)?.clone(),
            Term::Int(n) => n.clone(),
            Term::Add(a, b) => a.eval(model)? + b.eval(model)?,
            Term::Mul(a, b) => a.eval(model)? * b.eval(model)?,
            Term::Neg(a) => -a.eval(model)?,
        })
    }

    fn fmt_sexp(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Int(n) if n.is_negative() => write!(f, "(- {})", -n),
            Term::Int(n) => write!(f, "{n}"),
            Term::Add(a, b) => match b.as_ref() {
                Term::Neg(inner) => write!(f, "(- {a} {inner})"),
                _ => write!(f, "(+ {a} {b})"),
            },
            Term::Mul(a, b) => write!(f, "(* {a} {b})"),
            // `(- 5)` reads back as the literal -5, so a negated
            // non-negative literal needs a different spelling.
            Term::Neg(a) => match a.as_ref() {
                Term::Int(n) if !n.is_negative() => write!(f, "(- (+ {n}))"),
                _ => write!(f, "(- {a})"),
            },
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_sexp(f)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_sexp(f)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn holds(self, a: &BigInt, b: &BigInt) -> bool {
        match self {
            CmpOp::Le => a <= b,
            CmpOp::Lt => a < b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Cmp(CmpOp, Term, Term),
    True,
    False,
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Forall(Vec<Ident>, Box<Formula>),
    Exists(Vec<Ident>, Box<Formula>),
}

impl Formula {
    pub fn cmp(op: CmpOp, a: Term, b: Term) -> Formula {
        Formula::Cmp(op, a, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Cmp(CmpOp::Eq, a, b)
    }

    pub fn ne(a: Term, b: Term) -> Formula {
        Formula::Cmp(CmpOp::Ne, a, b)
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Cmp(CmpOp::Le, a, b)
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Cmp(CmpOp::Lt, a, b)
    }

    /// Conjunction; the empty conjunction is `true` and a singleton is its
    /// only element.
    pub fn and(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    pub fn or(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::False,
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn forall(vars: Vec<Ident>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    pub fn exists(vars: Vec<Ident>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// Top-level conjuncts with nested conjunctions flattened and `true`
    /// dropped.
    pub fn conjuncts(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.push_conjuncts(&mut out);
        out
    }

    fn push_conjuncts(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::True => {}
            Formula::And(parts) => parts.iter().for_each(|p| p.push_conjuncts(out)),
            other => out.push(other.clone()),
        }
    }

    /// Negation pushed through connectives and comparisons.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Cmp(op, a, b) => match op {
                CmpOp::Le => Formula::lt(b.clone(), a.clone()),
                CmpOp::Lt => Formula::le(b.clone(), a.clone()),
                CmpOp::Eq => Formula::ne(a.clone(), b.clone()),
                CmpOp::Ne => Formula::eq(a.clone(), b.clone()),
            },
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(f) => (**f).clone(),
            Formula::And(parts) => Formula::or(parts.iter().map(Formula::negate).collect()),
            Formula::Or(parts) => Formula::and(parts.iter().map(Formula::negate).collect()),
            Formula::Forall(vs, body) => Formula::exists(vs.clone(), body.negate()),
            Formula::Exists(vs, body) => Formula::forall(vs.clone(), body.negate()),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Cmp(..) | Formula::True | Formula::False => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().all(Formula::is_quantifier_free),
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Formula::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.collect_vars(out)),
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let mut inner = BTreeSet::new();
                body.collect_vars(&mut inner);
                for v in vs {
                    inner.remove(v);
                }
                out.extend(inner);
            }
        }
    }

    pub fn fvs(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Exact ground evaluation. `None` when a free variable is unassigned
    /// or a quantifier is reached.
    pub fn eval(&self, model: &Model) -> Option<bool> {
        match self {
            Formula::Cmp(op, a, b) => Some(op.holds(&a.eval(model)?, &b.eval(model)?)),
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Not(f) => f.eval(model).map(|b| !b),
            Formula::And(ps) => {
                let mut all = Some(true);
                for p in ps {
                    match p.eval(model) {
                        Some(false) => return Some(false),
                        Some(true) => {}
                        None => all = None,
                    }
                }
                all
            }
            Formula::Or(ps) => {
                let mut any = Some(false);
                for p in ps {
                    match p.eval(model) {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => any = None,
                    }
                }
                any
            }
            Formula::Forall(..) | Formula::Exists(..) => None,
        }
    }

    fn fmt_sexp(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Cmp(op, a, b) => {
                let sym = match op {
                    CmpOp::Le => "<=",
                    CmpOp::Lt => "<",
                    CmpOp::Eq => "=",
                    CmpOp::Ne => "distinct",
                };
                write!(f, "({sym} {a} {b})")
            }
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(ps) | Formula::Or(ps) if ps.is_empty() => {
                f.write_str(if matches!(self, Formula::And(_)) { "true" } else { "false" })
            }
            Formula::And(ps) | Formula::Or(ps) => {
                f.write_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" })?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                f.write_str(")")
            }
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let q = if matches!(self, Formula::Forall(..)) { "forall" } else { "exists" };
                write!(f, "({q} (")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "({v} Int)")?;
                }
                write!(f, ") {body})")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_sexp(f)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_sexp(f)
    }
}

/// A simultaneous, capture-avoiding map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Ident, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn renaming<'a>(pairs: impl IntoIterator<Item = &'a (Ident, Ident)>) -> Self {
        Substitution(
            pairs
                .into_iter()
                .map(|(from, to)| (from.clone(), Term::Var(to.clone())))
                .collect(),
        )
    }

    pub fn insert(&mut self, v: Ident, t: Term) -> Option<Term> {
        self.0.insert(v, t)
    }

    pub fn get(&self, v: &Ident) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn contains(&self, v: &Ident) -> bool {
        self.0.contains_key(v)
    }

    pub fn remove(&mut self, v: &Ident) -> Option<Term> {
        self.0.remove(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> BTreeSet<Ident> {
        self.0.keys().cloned().collect()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Int(_) => t.clone(),
            Term::Add(a, b) => Term::add(self.apply_term(a), self.apply_term(b)),
            Term::Mul(a, b) => Term::mul(self.apply_term(a), self.apply_term(b)),
            Term::Neg(a) => Term::neg(self.apply_term(a)),
        }
    }

    pub fn apply_formula(&self, f: &Formula) -> Formula {
        if self.is_empty() {
            return f.clone();
        }
        match f {
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, self.apply_term(a), self.apply_term(b)),
            Formula::True | Formula::False => f.clone(),
            Formula::Not(g) => Formula::not(self.apply_formula(g)),
            Formula::And(ps) => Formula::And(ps.iter().map(|p| self.apply_formula(p)).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(|p| self.apply_formula(p)).collect()),
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let (vs, body) = self.apply_under_binder(vs, body);
                if matches!(f, Formula::Forall(..)) {
                    Formula::Forall(vs, Box::new(body))
                } else {
                    Formula::Exists(vs, Box::new(body))
                }
            }
        }
    }

    fn apply_under_binder(&self, bound: &[Ident], body: &Formula) -> (Vec<Ident>, Formula) {
        let mut inner = self.clone();
        for b in bound {
            inner.0.remove(b);
        }
        let body_fvs = body.fvs();
        let mut range_fvs = BTreeSet::new();
        for (v, t) in &inner.0 {
            if body_fvs.contains(v) {
                t.collect_vars(&mut range_fvs);
            }
        }
        let mut avoid: BTreeSet<Ident> = range_fvs.clone();
        avoid.extend(body_fvs.iter().cloned());
        avoid.extend(bound.iter().cloned());
        let mut new_bound = Vec::with_capacity(bound.len());
        for b in bound {
            if range_fvs.contains(b) {
                let mut k = 0usize;
                let renamed = loop {
                    let cand = Ident::new(format!("{RESERVED_PREFIX}{}.b{k}", b.stem()));
                    if !avoid.contains(&cand) {
                        break cand;
                    }
                    k += 1;
                };
                avoid.insert(renamed.clone());
                inner.0.insert(b.clone(), Term::Var(renamed.clone()));
                new_bound.push(renamed);
            } else {
                new_bound.push(b.clone());
            }
        }
        (new_bound, inner.apply_formula(body))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<(Ident, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Ident, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

/// Values a substitution can be applied to.
pub trait Substitute {
    fn substitute(&self, s: &Substitution) -> Self;
}

impl Substitute for Term {
    fn substitute(&self, s: &Substitution) -> Self {
        s.apply_term(self)
    }
}

impl Substitute for Formula {
    fn substitute(&self, s: &Substitution) -> Self {
        s.apply_formula(self)
    }
}

impl<T: Substitute> Substitute for Vec<T> {
    fn substitute(&self, s: &Substitution) -> Self {
        self.iter().map(|x| x.substitute(s)).collect()
    }
}

pub fn substitute<T: Substitute>(s: &Substitution, x: &T) -> T {
    x.substitute(s)
}

/// A polynomial with integer coefficients: monomials (sorted variable
/// multisets) mapped to non-zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly(BTreeMap<Vec<Ident>, BigInt>);

impl Poly {
    pub fn constant(c: BigInt) -> Poly {
        let mut p = Poly::default();
        p.add_monomial(Vec::new(), c);
        p
    }

    pub fn from_term(t: &Term) -> Poly {
        match t {
            Term::Var(v) => {
                let mut p = Poly::default();
                p.add_monomial(vec![v.clone()], BigInt::one());
                p
            }
            Term::Int(n) => Poly::constant(n.clone()),
            Term::Add(a, b) => Poly::from_term(a).plus(&Poly::from_term(b)),
            Term::Mul(a, b) => Poly::from_term(a).times(&Poly::from_term(b)),
            Term::Neg(a) => Poly::from_term(a).scale(&BigInt::from(-1)),
        }
    }

    fn add_monomial(&mut self, mono: Vec<Ident>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(mono).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.retain(|_, v| !v.is_zero());
        }
    }

    pub fn plus(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_monomial(m.clone(), c.clone());
        }
        out
    }

    pub fn minus(&self, other: &Poly) -> Poly {
        self.plus(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.0 {
            out.add_monomial(m.clone(), c * k);
        }
        out
    }

    pub fn times(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let mut m = m1.clone();
                m.extend(m2.iter().cloned());
                m.sort();
                out.add_monomial(m, c1 * c2);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.0.len() {
            0 => Some(BigInt::zero()),
            1 => self.0.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Ident> {
        self.0.keys().flatten().cloned().collect()
    }

    /// Substitutes the values `m` assigns.
    pub fn partial_eval(&self, m: &Model) -> Poly {
        let mut out = Poly::default();
        for (mono, c) in &self.0 {
            let mut c = c.clone();
            let mut rest = Vec::new();
            for v in mono {
                match m.get(v) {
                    Some(x) => c *= x,
                    None => rest.push(v.clone()),
                }
            }
            out.add_monomial(rest, c);
        }
        out
    }

    /// Splits `self` as `c*v + rest` where `v` does not occur in `rest`.
    pub fn linear(&self, v: &Ident) -> Option<(BigInt, Poly)> {
        let mut coef = None;
        let mut rest = Poly::default();
        for (m, c) in &self.0 {
            if m.len() == 1 && &m[0] == v {
                coef = Some(c.clone());
            } else if m.contains(v) {
                return None;
            } else {
                rest.add_monomial(m.clone(), c.clone());
            }
        }
        Some((coef?, rest))
    }

    /// Like [`Poly::linear`] with `c` restricted to ±1; `true` means `c = 1`.
    pub fn isolate(&self, v: &Ident) -> Option<(bool, Poly)> {
        let (coef, rest) = self.linear(v)?;
        if coef.is_one() {
            Some((true, rest))
        } else if coef == BigInt::from(-1) {
            Some((false, rest))
        } else {
            None
        }
    }

    /// Sign-normalized so that the leading coefficient is positive.
    pub fn normalize_sign(&self) -> Poly {
        match self.0.iter().find(|(m, _)| !m.is_empty()).or_else(|| self.0.iter().next()) {
            Some((_, c)) if c.is_negative() => self.scale(&BigInt::from(-1)),
            _ => self.clone(),
        }
    }

    pub fn to_term(&self) -> Term {
        let mut out: Option<Term> = None;
        let ordered = self
            .0
            .iter()
            .filter(|(m, _)| !m.is_empty())
            .chain(self.0.iter().filter(|(m, _)| m.is_empty()));
        for (m, c) in ordered {
            let magnitude = c.abs();
            let body = if m.is_empty() {
                Term::Int(magnitude)
            } else {
                let mut product = m
                    .iter()
                    .map(|v| Term::Var(v.clone()))
                    .reduce(Term::mul)
                    .expect("non-empty monomial");
                if !magnitude.is_one() {
                    product = Term::mul(Term::Int(magnitude), product);
                }
                product
            };
            out = Some(match out {
                None if c.is_negative() => match body {
                    Term::Int(n) => Term::Int(-n),
                    other => Term::neg(other),
                },
                None => body,
                Some(acc) if c.is_negative() => Term::sub(acc, body),
                Some(acc) => Term::add(acc, body),
            });
        }
        out.unwrap_or_else(|| Term::int(0))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// Polynomial normal form of a term.
pub fn simplify(t: &Term) -> Term {
    Poly::from_term(t).to_term()
}

/// Key identifying a formula up to arithmetic normalization, commutativity
/// of `∧`/`∨`/`=`/`≠` and renaming of bound variables.
pub fn formula_key(f: &Formula) -> String {
    fn go(f: &Formula, bound: &mut Vec<(Ident, Ident)>) -> String {
        match f {
            Formula::Cmp(op, a, b) => {
                let rename = Substitution::renaming(bound.iter());
                let a = rename.apply_term(a);
                let b = rename.apply_term(b);
                let diff = Poly::from_term(&a).minus(&Poly::from_term(&b));
                match op {
                    CmpOp::Eq => format!("(= {} 0)", diff.normalize_sign()),
                    CmpOp::Ne => format!("(!= {} 0)", diff.normalize_sign()),
                    CmpOp::Le => format!("(<= {diff} 0)"),
                    // integer strictness: a - b < 0  iff  a - b + 1 <= 0
                    CmpOp::Lt => format!("(<= {} 0)", diff.plus(&Poly::constant(BigInt::one()))),
                }
            }
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Not(g) => format!("(not {})", go(g, bound)),
            Formula::And(ps) | Formula::Or(ps) => {
                let mut keys: Vec<String> = ps.iter().map(|p| go(p, bound)).collect();
                keys.sort();
                keys.dedup();
                let tag = if matches!(f, Formula::And(_)) { "and" } else { "or" };
                format!("({tag} {})", keys.join(" "))
            }
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let depth = bound.len();
                for (i, v) in vs.iter().enumerate() {
                    bound.push((v.clone(), Ident::new(format!("#{}", depth + i))));
                }
                let inner = go(body, bound);
                bound.truncate(depth);
                let tag = if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" };
                format!("({tag} {} {inner})", vs.len())
            }
        }
    }
    go(f, &mut Vec::new())
}

/// Key identifying a term up to polynomial normalization.
pub fn term_key(t: &Term) -> String {
    Poly::from_term(t).to_string()
}
