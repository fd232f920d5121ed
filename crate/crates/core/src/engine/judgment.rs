//! Proof states `D; Γ; A; φ ⊢ h`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::clause::{build_definition, AnnotatedAtom, Atom, DefinitionDisjunction, GammaEntry, Hccs, Head, InductionId};
use crate::term::{formula_key, term_key, Formula, Ident, Substitution};

/// Definite clauses with their predicate definitions precomputed.
#[derive(Debug)]
pub struct Defs {
    pub hccs: Hccs,
    pub definitions: BTreeMap<Ident, DefinitionDisjunction>,
}

impl Defs {
    pub fn new(hccs: &Hccs) -> Arc<Defs> {
        let hccs = Hccs { goals: Vec::new(), ..hccs.clone() };
        let definitions = hccs.predicates.keys().map(|p| (p.clone(), build_definition(&hccs, p))).collect();
        Arc::new(Defs { hccs, definitions })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccId(pub u32);

impl fmt::Debug for OccId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Occurrence {
    pub id: OccId,
    pub atom: AnnotatedAtom,
    /// Number of ApplyP/Fold steps the atom is derived through.
    pub depth: u32,
    /// Added by a lemma or a definite clause, so implied by the other atoms
    /// in every context. Induct leaves such atoms out of the hypothesis.
    pub implied: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum EntryKey {
    Lemma(usize),
    Hyp(InductionId),
}

impl fmt::Display for EntryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryKey::Lemma(i) => write!(f, "lemma {i}"),
            EntryKey::Hyp(a) => write!(f, "hyp {a}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Source {
    Entry(EntryKey),
    Clause(usize),
}

pub fn atom_key(a: &Atom) -> String {
    let args: Vec<String> = a.args.iter().map(term_key).collect();
    format!("{}({})", a.pred, args.join(","))
}

#[derive(Clone, Debug)]
pub struct Judgment {
    pub defs: Arc<Defs>,
    pub gamma: Vec<(EntryKey, Arc<GammaEntry>)>,
    pub atoms: Vec<Occurrence>,
    pub knowledge: Vec<Formula>,
    pub target: Head,
    pub next_occ: u32,
    pub applied: BTreeSet<(Source, Substitution)>,
    /// Keys of every atom that was ever part of this branch.
    pub seen_atoms: BTreeSet<String>,
    pub knowledge_keys: BTreeSet<String>,
    pub inductions: u32,
    pub unfolds: u32,
    /// Search bookkeeping: identifies the state for memoization.
    pub revision: u64,
}

/// The part of a judgment recorded in certificates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Snapshot {
    pub gamma: Vec<(EntryKey, Option<GammaEntry>)>,
    pub atoms: Vec<(OccId, AnnotatedAtom)>,
    pub knowledge: Vec<Formula>,
    pub target: Head,
}

impl Judgment {
    /// `D; Γ; A^{∅,◦}; φ ⊢ h`
    pub fn root(defs: Arc<Defs>, lemmas: &[GammaEntry], atoms: &[Atom], formula: &Formula, target: Head) -> Judgment {
        let mut j = Judgment {
            defs,
            gamma: lemmas.iter().enumerate().map(|(i, l)| (EntryKey::Lemma(i), Arc::new(l.clone()))).collect(),
            atoms: Vec::new(),
            knowledge: Vec::new(),
            target,
            next_occ: 0,
            applied: BTreeSet::new(),
            seen_atoms: BTreeSet::new(),
            knowledge_keys: BTreeSet::new(),
            inductions: 0,
            unfolds: 0,
            revision: 0,
        };
        for a in atoms {
            j.push_atom(AnnotatedAtom::plain(a.clone()), 0);
        }
        j.add_knowledge(formula);
        j
    }

    pub fn push_atom(&mut self, atom: AnnotatedAtom, depth: u32) -> OccId {
        let id = OccId(self.next_occ);
        self.next_occ += 1;
        self.seen_atoms.insert(atom_key(&atom.atom));
        self.atoms.push(Occurrence { id, atom, depth, implied: false });
        id
    }

    /// Adds the conjuncts of `f` that are not yet present; returns whether
    /// anything was added.
    pub fn add_knowledge(&mut self, f: &Formula) -> bool {
        let mut changed = false;
        for c in f.conjuncts() {
            if self.knowledge_keys.insert(formula_key(&c)) {
                self.knowledge.push(c);
                changed = true;
            }
        }
        changed
    }

    pub fn knows(&self, f: &Formula) -> bool {
        f.conjuncts().iter().all(|c| self.knowledge_keys.contains(&formula_key(c)))
    }

    pub fn phi(&self) -> Formula {
        Formula::and(self.knowledge.clone())
    }

    pub fn occurrence(&self, id: OccId) -> Option<&Occurrence> {
        self.atoms.iter().find(|o| o.id == id)
    }

    pub fn occurrence_mut(&mut self, id: OccId) -> Option<&mut Occurrence> {
        self.atoms.iter_mut().find(|o| o.id == id)
    }

    pub fn entry(&self, key: EntryKey) -> Option<&Arc<GammaEntry>> {
        self.gamma.iter().find(|(k, _)| *k == key).map(|(_, e)| e)
    }

    pub fn annotated(&self) -> impl Iterator<Item = &AnnotatedAtom> + Clone {
        self.atoms.iter().map(|o| &o.atom)
    }

    pub fn has_atom(&self, a: &Atom) -> bool {
        let k = atom_key(a);
        self.atoms.iter().any(|o| atom_key(&o.atom.atom) == k)
    }

    /// Free variables of atoms, knowledge and target.
    pub fn fvs(&self) -> BTreeSet<Ident> {
        let mut out = self.target.fvs();
        self.atoms.iter().for_each(|o| o.atom.atom.collect_vars(&mut out));
        self.knowledge.iter().for_each(|f| f.collect_vars(&mut out));
        out
    }

    /// Every identifier a fresh name must avoid: variables of the judgment
    /// and of all Γ entries.
    pub fn used_names(&self) -> BTreeSet<Ident> {
        let mut out = self.fvs();
        for (_, e) in &self.gamma {
            out.extend(e.fvs());
        }
        out
    }

    /// Induction identifiers already minted on this branch.
    pub fn used_alphas(&self) -> BTreeSet<InductionId> {
        let mut out: BTreeSet<InductionId> = self
            .gamma
            .iter()
            .filter_map(|(k, _)| match k {
                EntryKey::Hyp(a) => Some(*a),
                EntryKey::Lemma(_) => None,
            })
            .collect();
        for o in &self.atoms {
            out.extend(o.atom.marks.iter().copied());
            out.extend(o.atom.inducted);
        }
        out
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            gamma: self
                .gamma
                .iter()
                .map(|(k, e)| match k {
                    EntryKey::Lemma(_) => (*k, None),
                    EntryKey::Hyp(_) => (*k, Some((**e).clone())),
                })
                .collect(),
            atoms: self.atoms.iter().map(|o| (o.id, o.atom.clone())).collect(),
            knowledge: self.knowledge.clone(),
            target: self.target.clone(),
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|o| {
                let marks: Vec<String> = o.atom.marks.iter().map(ToString::to_string).collect();
                let ind = o.atom.inducted.map_or("o".to_string(), |a| a.to_string());
                let u = if o.atom.unfolded { "*" } else { "" };
                format!("{}^{{{}}},{}{}", o.atom.atom, marks.join(","), ind, u)
            })
            .collect();
        let phi: Vec<String> = self.knowledge.iter().map(ToString::to_string).collect();
        write!(f, "|G|={}; {}; {} |- {}", self.gamma.len(), atoms.join(" "), phi.join(" /\\ "), self.target)
    }
}
