mod common;

#[test]
fn membership_encoding_matches_semantics() {
    common::prop_in_semantics(256).unwrap();
}

#[test]
fn subset_encoding_matches_semantics() {
    common::prop_sub_semantics(256).unwrap();
}

#[test]
fn kleene_iteration_is_monotone() {
    common::prop_kleene_monotone(48).unwrap();
}

#[test]
fn problems_and_counterexamples_round_trip() {
    common::prop_round_trips(128).unwrap();
}

#[test]
fn formulas_round_trip() {
    common::prop_formula_round_trip(256).unwrap();
}

#[test]
fn smt_models_are_sound() {
    common::prop_smt_model_soundness(96).unwrap();
}
