//! Proof search by induction on derivations.

pub mod instantiate;
pub mod judgment;
pub mod rules;
pub mod strategy;
pub mod solve;
