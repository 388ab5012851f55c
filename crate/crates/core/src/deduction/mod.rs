//! Deduction over equational specifications: rules as fractions, the
//! classic deduction step, and the pleopushout step whose kernel may drop
//! lemmas that are no longer needed.

mod instance;
mod rule;
mod script;
mod step;

pub use instance::{Direction, Instance, ZigLink, ZigZag};
pub use rule::{kernel_from_names, parse_rules, rule_from_fraction, rule_from_span, rule_to_text, DeductionRule, Fraction};
pub use script::{bind_instance, parse_script, run_derivation, DerivationRun, RunOptions, ScriptStep, StepMode, StepRecord};
pub use step::{
    classic_step, minimal_witness, pleopushout_step, verify_cube, ClassicStep, CubeDiagram, DeductionCube, FaceReport,
    FaceRequirement, Witness, PLEO_MORPHISMS,
};
