//! Algebraic graph rewriting (double pushout and sesqui-pushout) and
//! diagrammatic deduction over equational specifications.
//!
//! Both are built on one colimit engine: rewrite steps are generalized
//! pushouts of graphs, and deduction steps are pushouts of specifications
//! along pleomorphisms, with the pleopushout variant able to drop lemmas
//! that were only needed during a proof.

pub mod category;
pub mod colimit;
pub mod deduction;
pub mod eqlogic;
pub mod error;
#[doc(hidden)]
pub mod fixtures;
pub mod graph;
mod quotient;
pub mod rewriting;
pub mod text;

pub use category::{Arrow, Cospan, Gluing, Pushout, Span, Square};
pub use error::{Error, Result};
