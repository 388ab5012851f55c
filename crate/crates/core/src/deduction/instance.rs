use serde::Serialize;

use crate::category::Arrow;
use crate::eqlogic::{EqSpec, PleoVerdict, SpecMorphism};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// From the previous specification to the next one.
    Forward,
    /// From the next specification back to the previous one.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZigLink {
    pub label: String,
    #[serde(skip)]
    pub morphism: SpecMorphism,
    pub direction: Direction,
    pub verdict: PleoVerdict,
    pub assumed: bool,
}

impl ZigLink {
    fn far_end(&self) -> &EqSpec {
        match self.direction {
            Direction::Forward => self.morphism.codomain(),
            Direction::Backward => self.morphism.domain(),
        }
    }

    fn near_end(&self) -> &EqSpec {
        match self.direction {
            Direction::Forward => self.morphism.domain(),
            Direction::Backward => self.morphism.codomain(),
        }
    }
}

/// Evidence that a specification presents the same theory as `ambient`: a
/// chain of pleomorphisms pointing either way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZigZag {
    #[serde(skip)]
    ambient: EqSpec,
    links: Vec<ZigLink>,
}

impl ZigZag {
    pub fn trivial(ambient: EqSpec) -> Self {
        Self {
            ambient,
            links: Vec::new(),
        }
    }

    pub fn ambient(&self) -> &EqSpec {
        &self.ambient
    }

    pub fn links(&self) -> &[ZigLink] {
        &self.links
    }

    pub fn end(&self) -> &EqSpec {
        self.links.last().map_or(&self.ambient, ZigLink::far_end)
    }

    /// Appends a link; it must start where the chain ends and carry a
    /// verified verdict unless `assumed`.
    pub fn push(&mut self, label: &str, morphism: SpecMorphism, direction: Direction, verdict: PleoVerdict, assumed: bool) -> Result<()> {
        let link = ZigLink {
            label: label.to_string(),
            morphism,
            direction,
            verdict,
            assumed,
        };
        if link.near_end() != self.end() {
            return Err(Error::InstanceMismatch(format!("link `{label}` does not continue the chain")));
        }
        if !link.verdict.is_verified() && !assumed {
            return Err(Error::PleoVerificationFailed {
                morphism: label.to_string(),
                reason: format!("verdict is {}", link.verdict.label()),
            });
        }
        self.links.push(link);
        Ok(())
    }

    pub fn with(mut self, label: &str, morphism: SpecMorphism, direction: Direction, verdict: PleoVerdict, assumed: bool) -> Result<Self> {
        self.push(label, morphism, direction, verdict, assumed)?;
        Ok(self)
    }

    /// Every link is verified (none assumed).
    pub fn is_verified(&self) -> bool {
        self.links.iter().all(|l| l.verdict.is_verified())
    }
}

/// An instance `ς : S1 -> S'` of a specification in the ambient one, with
/// evidence that `S'` is pleoequivalent to the ambient specification.
///
/// `anchor`, when known, is a morphism from the ambient specification into
/// `S'`; it lets steps keep track of where the original axioms went.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    morphism: SpecMorphism,
    evidence: ZigZag,
    anchor: Option<SpecMorphism>,
}

impl Instance {
    pub fn new(morphism: SpecMorphism, evidence: ZigZag, anchor: Option<SpecMorphism>) -> Result<Self> {
        if morphism.codomain() != evidence.end() {
            return Err(Error::InstanceMismatch("evidence does not end at the instance's codomain".into()));
        }
        if let Some(a) = &anchor {
            if a.domain() != evidence.ambient() || a.codomain() != morphism.codomain() {
                return Err(Error::InstanceMismatch("anchor does not run from the ambient specification".into()));
            }
        }
        Ok(Self {
            morphism,
            evidence,
            anchor,
        })
    }

    /// An instance directly in the ambient specification.
    pub fn direct(morphism: SpecMorphism) -> Self {
        let ambient = morphism.codomain().clone();
        Self {
            anchor: Some(SpecMorphism::identity(&ambient)),
            evidence: ZigZag::trivial(ambient),
            morphism,
        }
    }

    pub fn morphism(&self) -> &SpecMorphism {
        &self.morphism
    }

    pub fn evidence(&self) -> &ZigZag {
        &self.evidence
    }

    pub fn anchor(&self) -> Option<&SpecMorphism> {
        self.anchor.as_ref()
    }

    pub fn target(&self) -> &EqSpec {
        self.morphism.codomain()
    }
}
