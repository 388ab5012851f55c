//! Pushouts and their verification, generic over [`Gluing`] categories, plus
//! the graph-only complements used by the rewriting steps.

mod graph;

use crate::category::{Arrow, Gluing, Pushout, Span, Square};
use crate::error::{Error, Result};

pub use graph::{final_pullback_complement, pullback, pushout_complement, verify_pullback};

/// The two morphisms `K -> D -> G` completing `K -> L -> G` to a square.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementResult<A: Arrow> {
    /// `m_K : K -> D`
    pub to_context: A,
    /// `l_1 : D -> G`
    pub into_host: A,
}

impl<A: Arrow> ComplementResult<A> {
    pub fn context(&self) -> &A::Object {
        self.to_context.codomain()
    }

    /// The completed square, oriented as the span `L <- K -> D` closed by
    /// `L -> G <- D`.
    pub fn square(&self, rule_leg: &A, host_match: &A) -> Result<Square<A>> {
        Square::from_sides(
            rule_leg.clone(),
            self.to_context.clone(),
            host_match.clone(),
            self.into_host.clone(),
        )
    }
}

pub fn pushout<A: Gluing>(span: &Span<A>) -> Result<Pushout<A>> {
    A::pushout(span)
}

/// Exact pushout test: recompute the pushout of the square's span and check
/// that the comparison map into the square's vertex is an isomorphism.
pub fn verify_pushout<A: Gluing>(square: &Square<A>) -> Result<bool> {
    if !square.commutes()? {
        return Err(Error::NonCommuting);
    }
    let computed = A::pushout(square.span())?;
    Ok(A::mediate(&computed, square.cocone())?.is_some_and(|m| m.is_iso()))
}

/// Horizontal pasting of two squares sharing an edge: `first`'s right-hand
/// closing leg must equal `second`'s left span leg.
pub fn paste<A: Arrow>(first: &Square<A>, second: &Square<A>) -> Result<Square<A>> {
    if first.cocone().left() != second.span().right() {
        return Err(Error::NonComposable);
    }
    Square::from_sides(
        first.span().left().then(second.span().left())?,
        first.span().right().clone(),
        second.cocone().left().clone(),
        first.cocone().right().then(second.cocone().right())?,
    )
}

/// Pushout pasting law as a self-check. With `first` a pushout, returns
/// whether `second` is a pushout and fails with [`Error::PastingViolation`]
/// if that disagrees with the verdict on the composite square.
pub fn paste_check<A: Gluing>(first: &Square<A>, second: &Square<A>) -> Result<bool> {
    let composite = paste(first, second)?;
    let second_ok = verify_pushout(second)?;
    let composite_ok = verify_pushout(&composite)?;
    if second_ok != composite_ok {
        return Err(Error::PastingViolation {
            second: second_ok,
            composite: composite_ok,
        });
    }
    Ok(second_ok)
}
