//! Spans, cospans and commutative squares, generic over the underlying
//! category of presentations (finite graphs or equational specifications).

use std::fmt::Debug;

use crate::error::{Error, Result};

/// A morphism in a category of finite presentations.
pub trait Arrow: Clone + Debug + PartialEq + Sized {
    type Object: Clone + Debug + PartialEq;

    fn domain(&self) -> &Self::Object;
    fn codomain(&self) -> &Self::Object;
    fn identity(object: &Self::Object) -> Self;

    /// Diagrammatic composition: `self` first, then `next`.
    fn then(&self, next: &Self) -> Result<Self>;
}

/// Categories in which every span has a computed pushout.
pub trait Gluing: Arrow {
    fn pushout(span: &Span<Self>) -> Result<Pushout<Self>>;

    /// The comparison map out of a computed pushout into the vertex of
    /// another cocone over the same span. `None` when no morphism out of the
    /// pushout vertex is compatible with the cocone.
    fn mediate(pushout: &Pushout<Self>, cocone: &Cospan<Self>) -> Result<Option<Self>>;

    fn is_iso(&self) -> bool;
}

/// Two morphisms with the same domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Span<A: Arrow> {
    left: A,
    right: A,
}

impl<A: Arrow> Span<A> {
    pub fn new(left: A, right: A) -> Result<Self> {
        if left.domain() != right.domain() {
            return Err(Error::SpanMismatch);
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &A {
        &self.left
    }

    pub fn right(&self) -> &A {
        &self.right
    }

    pub fn apex(&self) -> &A::Object {
        self.left.domain()
    }

    pub fn identity(object: &A::Object) -> Self {
        Self {
            left: A::identity(object),
            right: A::identity(object),
        }
    }

    pub fn into_parts(self) -> (A, A) {
        (self.left, self.right)
    }
}

/// Two morphisms with the same codomain.
#[derive(Debug, Clone, PartialEq)]
pub struct Cospan<A: Arrow> {
    left: A,
    right: A,
}

impl<A: Arrow> Cospan<A> {
    pub fn new(left: A, right: A) -> Result<Self> {
        if left.codomain() != right.codomain() {
            return Err(Error::CospanMismatch);
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &A {
        &self.left
    }

    pub fn right(&self) -> &A {
        &self.right
    }

    pub fn vertex(&self) -> &A::Object {
        self.left.codomain()
    }

    pub fn into_parts(self) -> (A, A) {
        (self.left, self.right)
    }
}

/// A square given as a span `A <- K -> B` closed by a cospan `A -> Q <- B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Square<A: Arrow> {
    span: Span<A>,
    cocone: Cospan<A>,
}

impl<A: Arrow> Square<A> {
    pub fn new(span: Span<A>, cocone: Cospan<A>) -> Result<Self> {
        if span.left().codomain() != cocone.left().domain()
            || span.right().codomain() != cocone.right().domain()
        {
            return Err(Error::EndpointMismatch);
        }
        Ok(Self { span, cocone })
    }

    /// Builds the square from its four sides: `top: K -> A`, `side: K -> B`,
    /// `close_top: A -> Q`, `close_side: B -> Q`.
    pub fn from_sides(top: A, side: A, close_top: A, close_side: A) -> Result<Self> {
        Self::new(Span::new(top, side)?, Cospan::new(close_top, close_side)?)
    }

    pub fn span(&self) -> &Span<A> {
        &self.span
    }

    pub fn cocone(&self) -> &Cospan<A> {
        &self.cocone
    }

    pub fn commutes(&self) -> Result<bool> {
        let upper = self.span.left().then(self.cocone.left())?;
        let lower = self.span.right().then(self.cocone.right())?;
        Ok(upper == lower)
    }
}

/// A computed pushout: the span together with the cocone of injections.
#[derive(Debug, Clone, PartialEq)]
pub struct Pushout<A: Arrow> {
    pub span: Span<A>,
    pub cocone: Cospan<A>,
}

impl<A: Arrow> Pushout<A> {
    pub fn vertex(&self) -> &A::Object {
        self.cocone.vertex()
    }

    /// Injection of the left foot of the span.
    pub fn inject_left(&self) -> &A {
        self.cocone.left()
    }

    /// Injection of the right foot of the span.
    pub fn inject_right(&self) -> &A {
        self.cocone.right()
    }

    pub fn square(&self) -> Square<A> {
        Square {
            span: self.span.clone(),
            cocone: self.cocone.clone(),
        }
    }
}
