use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::category::{Arrow, Pushout, Span};
use crate::colimit::pushout;
use crate::eqlogic::{is_pleomorphism, EqSpec, PleoVerdict, SpecMorphism};
use crate::error::{Error, Result};
use crate::text::{self, split_blocks, Line};

/// A cospan `numerator : A -> V <- B : denominator` whose denominator is a
/// pleomorphism (or explicitly assumed to be one).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fraction {
    #[serde(skip)]
    numerator: SpecMorphism,
    #[serde(skip)]
    denominator: SpecMorphism,
    pub verdict: PleoVerdict,
    /// The denominator was accepted without a verified verdict.
    pub assumed: bool,
}

impl Fraction {
    pub fn new(numerator: SpecMorphism, denominator: SpecMorphism, verdict: PleoVerdict, assumed: bool) -> Result<Self> {
        if numerator.codomain() != denominator.codomain() {
            return Err(Error::CospanMismatch);
        }
        match &verdict {
            PleoVerdict::Verified { .. } => {}
            PleoVerdict::Refuted { .. } => {
                return Err(Error::DenominatorNotPleo(format!("{:?}", verdict)));
            }
            PleoVerdict::Unknown { reason, .. } if !assumed => {
                return Err(Error::DenominatorUnknown(reason.clone()));
            }
            PleoVerdict::Unknown { .. } => {}
        }
        Ok(Self {
            numerator,
            denominator,
            verdict,
            assumed,
        })
    }

    pub fn numerator(&self) -> &SpecMorphism {
        &self.numerator
    }

    pub fn denominator(&self) -> &SpecMorphism {
        &self.denominator
    }

    pub fn vertex(&self) -> &EqSpec {
        self.numerator.codomain()
    }
}

/// A deduction rule `c / h`: hypothesis `H`, conclusion `C`, vertex `P`,
/// and optionally the span `H <- K -> C` whose pushout it is.
#[derive(Debug, Clone, PartialEq)]
pub struct DeductionRule {
    name: String,
    fraction: Fraction,
    span: Option<Span<SpecMorphism>>,
}

impl DeductionRule {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn fraction(&self) -> &Fraction {
        &self.fraction
    }

    /// `h : H -> P`
    pub fn h(&self) -> &SpecMorphism {
        self.fraction.denominator()
    }

    /// `c : C -> P`
    pub fn c(&self) -> &SpecMorphism {
        self.fraction.numerator()
    }

    pub fn hypothesis(&self) -> &EqSpec {
        self.h().domain()
    }

    pub fn conclusion(&self) -> &EqSpec {
        self.c().domain()
    }

    pub fn vertex(&self) -> &EqSpec {
        self.fraction.vertex()
    }

    pub fn span(&self) -> Option<&Span<SpecMorphism>> {
        self.span.as_ref()
    }

    pub fn assumed(&self) -> bool {
        self.fraction.assumed
    }

    /// The top face `K -> H, K -> C, H -> P, C -> P`, if the rule has a span.
    pub fn top_pushout(&self) -> Option<Pushout<SpecMorphism>> {
        let span = self.span.clone()?;
        let cocone = crate::category::Cospan::new(self.h().clone(), self.c().clone()).ok()?;
        Some(Pushout { span, cocone })
    }
}

/// Builds a rule from a span `H <- K -> C`; `P` is the pushout. The
/// denominator must verify as a pleomorphism within `depth` rounds, unless
/// `assume_pleo` accepts an unknown verdict.
pub fn rule_from_span(
    name: &str,
    l: SpecMorphism,
    r: SpecMorphism,
    depth: usize,
    assume_pleo: bool,
) -> Result<DeductionRule> {
    let span = Span::new(l, r)?;
    let po = pushout(&span)?;
    let verdict = is_pleomorphism(po.inject_left(), depth, None)?;
    let fraction = Fraction::new(po.inject_right().clone(), po.inject_left().clone(), verdict, assume_pleo)?;
    Ok(DeductionRule {
        name: name.to_string(),
        fraction,
        span: Some(span),
    })
}

/// Builds a rule directly from a fraction `H -h-> P <-c- C`.
pub fn rule_from_fraction(
    name: &str,
    h: SpecMorphism,
    c: SpecMorphism,
    depth: usize,
    assume_pleo: bool,
) -> Result<DeductionRule> {
    let verdict = is_pleomorphism(&h, depth, None)?;
    Ok(DeductionRule {
        name: name.to_string(),
        fraction: Fraction::new(c, h, verdict, assume_pleo)?,
        span: None,
    })
}

/// The features `H` and `C` share by name, with both inclusions.
pub fn kernel_from_names(h: &EqSpec, c: &EqSpec) -> Result<Span<SpecMorphism>> {
    let sorts: BTreeSet<String> = h.sorts().intersection(c.sorts()).cloned().collect();
    let mut ops = BTreeMap::new();
    for (name, decl) in h.ops() {
        if let Some(other) = c.ops().get(name) {
            if other.args != decl.args || other.result != decl.result {
                return Err(Error::SortMismatch(format!("operation `{name}` has different types")));
            }
            ops.insert(name.clone(), decl.clone());
        }
    }
    let mut vars = BTreeMap::new();
    for (name, sort) in h.vars() {
        if let Some(other) = c.vars().get(name) {
            if other != sort {
                return Err(Error::SortMismatch(format!("variable `{name}` has sorts {sort} and {other}")));
            }
            vars.insert(name.clone(), sort.clone());
        }
    }
    if let Some(clash) = h.ops().keys().find(|o| c.vars().contains_key(*o)) {
        return Err(Error::SortMismatch(format!("`{clash}` is an operation in one spec and a variable in the other")));
    }
    let terms: BTreeSet<_> = h.term_closure().intersection(&c.term_closure()).cloned().collect();
    let equations: BTreeSet<_> = h.equations().intersection(c.equations()).cloned().collect();
    let k = EqSpec::new(sorts, ops, vars, terms, equations)?;
    Span::new(SpecMorphism::inclusion(&k, h)?, SpecMorphism::inclusion(&k, c)?)
}

const RULE_BLOCKS: [&str; 8] = ["K", "H", "C", "P", "l", "r", "h", "c"];

fn morphism_block(
    blocks: &BTreeMap<&str, (usize, Vec<Line<'_>>)>,
    name: &str,
    domain: &EqSpec,
    codomain: &EqSpec,
) -> Result<SpecMorphism> {
    match blocks.get(name) {
        Some((number, lines)) => {
            SpecMorphism::parse_lines(domain, codomain, lines).map_err(|e| match e {
                Error::Parse { .. } => e,
                other => Error::parse(*number, other.to_string()),
            })
        }
        None => SpecMorphism::inclusion(domain, codomain),
    }
}

/// Parses rule files: `RULE name` headers, each followed by spec blocks
/// `H:` and `C:` plus either `K:` (span form; `l:`/`r:` default to
/// inclusions, and a missing `K:` is computed from shared names) or `P:`
/// with `h:`/`c:` (fraction form).
pub fn parse_rules(input: &str, depth: usize, assume_pleo: bool) -> Result<Vec<DeductionRule>> {
    let all = text::lines(input);
    let starts: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|(_, l)| l.text.split_whitespace().next() == Some("RULE"))
        .map(|(i, _)| i)
        .collect();
    if let Some(first) = all.first() {
        if starts.first() != Some(&0) {
            return Err(Error::parse(first.number, "expected `RULE name`"));
        }
    }
    let mut rules = Vec::new();
    for (n, &start) in starts.iter().enumerate() {
        let header = all[start];
        let name = header.text["RULE".len()..].trim();
        if name.is_empty() {
            return Err(Error::parse(header.number, "rule needs a name"));
        }
        let end = starts.get(n + 1).copied().unwrap_or(all.len());
        let (_, found) = split_blocks(&all[start + 1..end], &RULE_BLOCKS);
        let mut blocks = BTreeMap::new();
        for b in found {
            if !b.inline.is_empty() && b.inline != "inclusion" {
                return Err(Error::parse(b.header_line, format!("unexpected `{}` after `{}:`", b.inline, b.name)));
            }
            let name: &str = RULE_BLOCKS.iter().find(|x| **x == b.name).expect("known block");
            if blocks.insert(name, (b.header_line, b.lines)).is_some() {
                return Err(Error::parse(b.header_line, format!("duplicate `{name}:` block")));
            }
        }
        let spec = |key: &str| -> Result<Option<EqSpec>> {
            match blocks.get(key) {
                Some((number, lines)) => EqSpec::parse_lines(lines).map(Some).map_err(|e| match e {
                    Error::Parse { .. } => e,
                    other => Error::parse(*number, other.to_string()),
                }),
                None => Ok(None),
            }
        };
        let missing = |what: &str| Error::parse(header.number, format!("rule `{name}` has no `{what}:` block"));
        let h = spec("H")?.ok_or_else(|| missing("H"))?;
        let c = spec("C")?.ok_or_else(|| missing("C"))?;
        let rule = if let Some(p) = spec("P")? {
            let hm = morphism_block(&blocks, "h", &h, &p)?;
            let cm = morphism_block(&blocks, "c", &c, &p)?;
            rule_from_fraction(name, hm, cm, depth, assume_pleo)?
        } else {
            let (l, r) = match spec("K")? {
                Some(k) => (morphism_block(&blocks, "l", &k, &h)?, morphism_block(&blocks, "r", &k, &c)?),
                None => kernel_from_names(&h, &c)?.into_parts(),
            };
            rule_from_span(name, l, r, depth, assume_pleo)?
        };
        rules.push(rule);
    }
    Ok(rules)
}

/// Canonical span-form text of a rule (fraction form when it has no span).
pub fn rule_to_text(rule: &DeductionRule) -> String {
    let mut out = format!("RULE {}\n", rule.name());
    let block = |out: &mut String, name: &str, body: String| {
        out.push_str(name);
        out.push_str(":\n");
        out.push_str(&body);
    };
    match rule.span() {
        Some(span) => {
            block(&mut out, "K", span.apex().to_text());
            block(&mut out, "H", rule.hypothesis().to_text());
            block(&mut out, "C", rule.conclusion().to_text());
            block(&mut out, "l", span.left().to_text());
            block(&mut out, "r", span.right().to_text());
        }
        None => {
            block(&mut out, "H", rule.hypothesis().to_text());
            block(&mut out, "P", rule.vertex().to_text());
            block(&mut out, "C", rule.conclusion().to_text());
            block(&mut out, "h", rule.h().to_text());
            block(&mut out, "c", rule.c().to_text());
        }
    }
    out
}
