mod common;

use std::collections::BTreeMap;

use ihc::certificate::{replay, serialize, Certificate};
use ihc::engine::judgment::{Defs, EntryKey};
use ihc::engine::rules::Step;
use ihc::engine::solve::{solve_hccs, GoalResult, SolveConfig, Verdict};
use ihc::engine::strategy::{solve_goal, GoalOutcome, ProofNode, SearchLimits, StrategyOptions};
use ihc::frontend::parse_problem;
use ihc::oracle::bounded_least_model;
use ihc::smt::{SmtConfig, SmtSession};
use num_bigint::BigInt;

use common::{config_for, load};

fn proved_goal(report: &ihc::engine::solve::SolveReport, i: usize) -> &ProofNode {
    match &report.goals[i].result {
        GoalResult::Proved(p) => p,
        other => panic!("goal {i} not proved: {other:?}"),
    }
}

#[test]
fn mult_equivalence_proof_shape() {
    let p = load("mult_equiv.ihcs");
    let report = solve_hccs(&p, &config_for(&p)).unwrap();
    assert_eq!(report.verdict, Verdict::Solvable);
    let proof = proved_goal(&report, 0);
    let counts = proof.rule_counts();
    let expected: BTreeMap<&str, usize> = [("Induct", 1), ("Unfold", 3), ("ApplyBot", 1), ("ValidBot", 4)].into_iter().collect();
    assert_eq!(counts, expected);
    assert_eq!(proof.size(), 9);
    assert_eq!(proof.step.name(), "Induct");
    assert_eq!(proof.children[0].step.name(), "Unfold");
}

#[test]
fn reflexive_lemma_closes_by_valid_p() {
    let p = parse_problem(
        "(declare-pred P Int Int)
         (clause (P 0 0))
         (clause (forall (x r) (=> (and (P (- x 1) r) (> x 0)) (P x (+ r x)))))
         (lemma (forall (x r) (=> (P x r) (P x r))))",
    )
    .unwrap();
    let report = solve_hccs(&p, &SolveConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Solvable);
    let ihc::engine::solve::LemmaResult::Proved(proof) = &report.lemmas[0].result else { panic!("lemma not proved") };
    assert_eq!(proof.step, Step::ValidP);
}

#[test]
fn false_lemma_is_not_accepted() {
    let p = parse_problem(
        "(declare-pred P Int Int Int)
         (clause (forall (x) (P x 0 0)))
         (clause (forall (x y r) (=> (and (P x (- y 1) r) (distinct y 0)) (P x y (+ x r)))))
         (lemma (forall (x y r) (=> (and (P x y r) (distinct r 0)) false)))",
    )
    .unwrap();
    let report = solve_hccs(&p, &SolveConfig::default()).unwrap();
    assert!(matches!(report.verdict, Verdict::LemmaRejected { lemma: 0, .. }), "{:?}", report.verdict);
    let model = bounded_least_model(&p.hccs, 2, 4);
    let one = BigInt::from(1);
    assert!(model.contains(&"P".into(), &[one.clone(), one.clone(), one]));
}

#[test]
fn trivially_false_goal_is_unsolvable() {
    let p = parse_problem("(clause (=> true false))").unwrap();
    let report = solve_hccs(&p, &SolveConfig::default()).unwrap();
    match report.verdict {
        Verdict::Unsolvable { goal, cex } => {
            assert_eq!(goal, 0);
            assert!(cex.model.is_empty());
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn zero_limits_give_unknown() {
    let p = load("mult_equiv.ihcs");
    let mut cfg = config_for(&p);
    cfg.limits.max_inductions = 0;
    let report = solve_hccs(&p, &cfg).unwrap();
    assert!(matches!(report.verdict, Verdict::Unknown(_)), "{:?}", report.verdict);
}

#[test]
fn every_proved_benchmark_replays() {
    let mut names: Vec<String> = std::fs::read_dir(common::bench_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".ihcs"))
        .collect();
    names.sort();
    let replayed = common::par_map(names.len(), |i| {
        let p = load(&names[i]);
        let mut cfg = config_for(&p);
        cfg.timeout = Some(std::time::Duration::from_secs(30));
        let report = solve_hccs(&p, &cfg).unwrap();
        let Some((lemmas, goals)) = report.proofs().filter(|_| report.verdict == Verdict::Solvable) else {
            return 0;
        };
        let cert = Certificate { lemmas, goals };
        let r = replay(&cert, &p, &SmtConfig::default()).unwrap();
        assert!(r.is_verified(), "{}: {r:?}", names[i]);
        1
    });
    assert!(replayed.iter().sum::<usize>() >= 15, "{replayed:?}");
}

#[test]
fn certificates_are_deterministic() {
    for name in ["mult_equiv.ihcs", "id05_mult_comm.ihcs", "id10_sum_equiv.ihcs"] {
        let p = load(name);
        let text = || {
            let report = solve_hccs(&p, &config_for(&p)).unwrap();
            let (lemmas, goals) = report.proofs().unwrap();
            serialize(&Certificate { lemmas, goals })
        };
        assert_eq!(text(), text(), "{name}");
    }
}

#[test]
fn parallel_goals_match_sequential() {
    let p = parse_problem(&format!(
        "{}(clause (forall (x y r s) (=> (and (P x y r) (P x y s) (distinct r s)) false)))
         (clause (forall (x r) (=> (and (P x 0 r) (distinct r 0)) false)))
         (clause (forall (x y r) (=> (and (P x y r) (>= y 0) (>= x 0) (< r 0)) false)))",
        common::MULT_DEFS
    ))
    .unwrap();
    let run = |jobs| {
        let cfg = SolveConfig { jobs, ..SolveConfig::default() };
        let report = solve_hccs(&p, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Solvable);
        let (lemmas, goals) = report.proofs().unwrap();
        serialize(&Certificate { lemmas, goals })
    };
    assert_eq!(run(1), run(3));
}

/// Induct only on fresh atoms, Unfold only unfolded ones, and the atoms an
/// Unfold of an inducted atom introduces carry its induction mark.
fn check_annotations(node: &ProofNode) {
    let atom = |n: &ProofNode, occ| n.snapshot.atoms.iter().find(|(o, _)| *o == occ).map(|(_, a)| a.clone());
    match &node.step {
        Step::Induct { occ, alpha, .. } => {
            let a = atom(node, *occ).expect("induct occurrence exists");
            assert!(a.inducted.is_none() && !a.unfolded);
            assert!(!node.snapshot.atoms.iter().any(|(_, b)| b.inducted == Some(*alpha) || b.marks.contains(alpha)));
            let c = atom(&node.children[0], *occ).unwrap();
            assert_eq!(c.inducted, Some(*alpha));
            assert!(node.children[0].snapshot.gamma.iter().any(|(k, _)| *k == EntryKey::Hyp(*alpha)));
        }
        Step::Unfold { occ, .. } => {
            let a = atom(node, *occ).unwrap();
            assert!(!a.unfolded);
            for child in &node.children {
                assert!(atom(child, *occ).unwrap().unfolded);
                for (o, b) in &child.snapshot.atoms {
                    if atom(node, *o).is_none() {
                        if let Some(alpha) = a.inducted {
                            assert!(b.marks.contains(&alpha), "new atom lacks mark {alpha:?}");
                        }
                        assert!(a.marks.is_subset(&b.marks));
                    }
                }
            }
        }
        _ => {}
    }
    node.children.iter().for_each(check_annotations);
}

/// Along a branch, atoms, knowledge and Γ only grow (an ApplyP that
/// replaces drops exactly its replaced atom).
fn check_monotone(node: &ProofNode) {
    let dropped = match &node.step {
        Step::ApplyP { replace, .. } => *replace,
        _ => None,
    };
    for child in &node.children {
        for (o, _) in &node.snapshot.atoms {
            if Some(*o) != dropped {
                assert!(child.snapshot.atoms.iter().any(|(c, _)| c == o), "occurrence {o:?} lost");
            }
        }
        assert!(child.snapshot.knowledge.starts_with(&node.snapshot.knowledge));
        assert!(child.snapshot.gamma.starts_with(&node.snapshot.gamma));
        check_monotone(child);
    }
}

#[test]
fn proofs_respect_annotation_discipline_and_grow_monotonically() {
    for name in ["mult_equiv.ihcs", "id03_mult_succ_left.ihcs", "id05_mult_comm.ihcs", "id11_sum_pred.ihcs", "id13_sum_down.ihcs"] {
        let p = load(name);
        let report = solve_hccs(&p, &config_for(&p)).unwrap();
        let (lemmas, goals) = report.proofs().unwrap_or_else(|| panic!("{name}: {:?}", report.verdict));
        for proof in lemmas.iter().chain(&goals) {
            check_annotations(proof);
            check_monotone(proof);
        }
    }
}

#[test]
fn distributivity_goal_proves_with_commutativity_assumed() {
    let p = load("id07_mult_dist_right.ihcs");
    let goal = &p.hccs.goals[0];
    let mut smt = SmtSession::new(SmtConfig::default());
    let opts = StrategyOptions { apply_p_replace: true, ..StrategyOptions::default() };
    let outcome = solve_goal(
        &mut smt,
        Defs::new(&p.hccs),
        &p.lemmas,
        &goal.body_atoms,
        &goal.body_formula,
        goal.head.clone(),
        SearchLimits::default(),
        opts,
    )
    .unwrap();
    let GoalOutcome::Proved(proof) = outcome else { panic!("{outcome:?}") };
    assert!(proof.rule_counts().get("ApplyP").copied().unwrap_or(0) >= 1);
}

#[test]
fn commutativity_lemma_is_rejected_for_partial_mult() {
    let p = load("id07_mult_dist_right.ihcs");
    let report = solve_hccs(&p, &config_for(&p)).unwrap();
    assert!(matches!(report.verdict, Verdict::LemmaRejected { lemma: 0, .. }), "{:?}", report.verdict);
    let m = bounded_least_model(&p.hccs, 2, 6);
    let (one, neg) = (BigInt::from(1), BigInt::from(-1));
    assert!(m.contains(&"P".into(), &[neg.clone(), one.clone(), neg.clone()]));
    assert!(!m.contains(&"P".into(), &[one, neg.clone(), neg]));
}
