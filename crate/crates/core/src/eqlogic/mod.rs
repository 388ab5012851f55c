//! Equational specifications, their morphisms and pushouts, a bounded
//! derivability oracle and pleomorphism checks.

mod closure;
mod model;
mod morphism;
mod pleo;
mod pushout;
mod spec;
mod term;

pub use closure::{derivable, derivable_all, replay, replay_instances, AxiomInstance, Derivation, DerivationTrace, INSTANCE_LIMIT, TERM_LIMIT};
pub use model::{refute, Counterexample, Model, RefuteOutcome};
pub use morphism::{derived_ops, SpecMorphism};
pub use pleo::{added_equations, image_spec, is_pleomorphism, PleoVerdict, Refutation};
pub use spec::{EqSpec, OpDecl};
pub use term::{Equation, Term};
