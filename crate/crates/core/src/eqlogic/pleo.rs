//! Pleomorphism checks: does a specification morphism present an
//! isomorphism of theories? Sound but incomplete, hence three verdicts.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::closure::{derivable_all, Derivation, DerivationTrace};
use super::model::{refute, Counterexample, Model, RefuteOutcome};
use super::morphism::SpecMorphism;
use super::spec::EqSpec;
use super::term::{Equation, Term};
use crate::category::Arrow;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refutation {
    /// The codomain has a sort or operation outside the image signature.
    ExtraSymbol { symbol: String },
    /// A finite model of the image falsifies an added equation.
    Counterexample(Counterexample),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum PleoVerdict {
    /// Every added equation (and every identification of operations) has a
    /// derivation.
    Verified { traces: Vec<DerivationTrace> },
    Refuted { refutation: Refutation },
    Unknown { reason: String, pending: Vec<Equation> },
}

impl PleoVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, PleoVerdict::Verified { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, PleoVerdict::Refuted { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            PleoVerdict::Verified { .. } => "verified",
            PleoVerdict::Refuted { .. } => "refuted",
            PleoVerdict::Unknown { .. } => "unknown",
        }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        PleoVerdict::Unknown {
            reason: reason.into(),
            pending: Vec::new(),
        }
    }
}

/// The codomain's signature and variables with the image of the domain's
/// terms and equations.
pub fn image_spec(tau: &SpecMorphism) -> Result<EqSpec> {
    let (dom, cod) = (tau.domain(), tau.codomain());
    let terms = dom.term_closure().iter().map(|t| tau.map_term(t)).collect();
    let equations = dom.equations().iter().map(|e| tau.map_equation(e)).collect();
    cod.with_content(terms, equations)
}

/// Equations of the codomain that are not images of domain equations.
pub fn added_equations(tau: &SpecMorphism) -> Vec<Equation> {
    let image: BTreeSet<Equation> = tau.domain().equations().iter().map(|e| tau.map_equation(e)).collect();
    tau.codomain()
        .sorted_equations()
        .into_iter()
        .filter(|e| !image.contains(e))
        .cloned()
        .collect()
}

fn fresh_var(spec: &EqSpec, taken: &mut BTreeSet<String>) -> String {
    let mut i = 1;
    loop {
        let name = format!("v{i}");
        if !spec.vars().contains_key(&name) && !spec.ops().contains_key(&name) && taken.insert(name.clone()) {
            return name;
        }
        i += 1;
    }
}

/// Pairs of distinct domain operations sent to the same codomain operation,
/// stated as equations over fresh variables of the domain.
fn identifications(tau: &SpecMorphism) -> Result<Option<(EqSpec, Vec<Equation>)>> {
    let dom = tau.domain();
    let mut by_image: BTreeMap<&Term, Vec<&String>> = BTreeMap::new();
    for (op, t) in tau.op_map() {
        by_image.entry(t).or_default().push(op);
    }
    let groups: Vec<Vec<&String>> = by_image.into_values().filter(|g| g.len() > 1).collect();
    if groups.is_empty() {
        return Ok(None);
    }
    let mut taken = BTreeSet::new();
    let mut extra_vars = Vec::new();
    let mut goals = Vec::new();
    for group in groups {
        let decl = &dom.ops()[group[0]];
        let args: Vec<Term> = decl
            .args
            .iter()
            .map(|s| {
                let v = fresh_var(dom, &mut taken);
                extra_vars.push((v.clone(), s.clone()));
                Term::var(v)
            })
            .collect();
        for other in &group[1..] {
            goals.push(Equation::new(
                Term::app(group[0].clone(), args.clone()),
                Term::app((*other).clone(), args.clone()),
            ));
        }
    }
    Ok(Some((dom.with_vars(extra_vars)?, goals)))
}

/// Checks whether `tau` is a pleomorphism, deriving each added equation
/// from the image of the domain within `depth` rounds. A model, when given,
/// must interpret the codomain's signature; it is used to refute added
/// equations.
pub fn is_pleomorphism(tau: &SpecMorphism, depth: usize, model: Option<&Model>) -> Result<PleoVerdict> {
    let (dom, cod) = (tau.domain(), tau.codomain());
    let sort_image: BTreeSet<&String> = tau.sort_map().values().collect();
    if let Some(s) = cod.sorts().iter().find(|s| !sort_image.contains(s)) {
        return Ok(PleoVerdict::Refuted {
            refutation: Refutation::ExtraSymbol { symbol: s.clone() },
        });
    }
    let op_image: BTreeSet<&str> = tau.op_map().values().filter_map(Term::as_simple_template).collect();
    let derived = !tau.is_simple();
    if let Some(op) = cod.ops().keys().find(|o| !op_image.contains(o.as_str())) {
        if !derived {
            return Ok(PleoVerdict::Refuted {
                refutation: Refutation::ExtraSymbol { symbol: op.clone() },
            });
        }
        return Ok(PleoVerdict::unknown(format!(
            "operation `{op}` is only reachable through derived operations"
        )));
    }
    if derived {
        return Ok(PleoVerdict::unknown("derived operation images are not checked"));
    }
    if sort_image.len() != dom.sorts().len() {
        return Ok(PleoVerdict::unknown("sorts are identified"));
    }

    let mut traces = Vec::new();
    if let Some((extended, goals)) = identifications(tau)? {
        let results = derivable_all(&extended, &goals, depth)?;
        let pending: Vec<Equation> = results
            .iter()
            .filter(|d| !d.is_verified())
            .map(|d| d.goal().clone())
            .collect();
        if !pending.is_empty() {
            return Ok(PleoVerdict::Unknown {
                reason: "identified operations are not provably equal".into(),
                pending,
            });
        }
        traces.extend(results.into_iter().filter_map(|d| match d {
            Derivation::Verified(t) => Some(t),
            Derivation::Unknown { .. } => None,
        }));
    }

    let image = image_spec(tau)?;
    let added = added_equations(tau);
    if let Some(model) = model {
        for e in &added {
            if let RefuteOutcome::Refuted(c) = refute(&image, e, model)? {
                return Ok(PleoVerdict::Refuted {
                    refutation: Refutation::Counterexample(c),
                });
            }
        }
    }
    let results = derivable_all(&image, &added, depth)?;
    let mut pending = Vec::new();
    let mut reason = String::new();
    for d in results {
        match d {
            Derivation::Verified(t) => traces.push(t),
            Derivation::Unknown { goal, reason: r } => {
                if reason.is_empty() {
                    reason = r;
                }
                pending.push(goal);
            }
        }
    }
    if pending.is_empty() {
        Ok(PleoVerdict::Verified { traces })
    } else {
        Ok(PleoVerdict::Unknown { reason, pending })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqlogic::closure::replay;

    const NAT: &str = "SORTS N\nOPS\n0 : -> N\ns : N -> N\n_+_ : N N -> N\nVARS\nx y : N\nEQNS\n0 + y == y\ns(x) + y == s(x + y)\n";
    const MOD2: &str = "CARRIERS\nN : 0 1\nTABLES\n0 = 0\ns(0) = 1\ns(1) = 0\n+(0, 0) = 0\n+(0, 1) = 1\n+(1, 0) = 1\n+(1, 1) = 0\n";

    fn nat() -> EqSpec {
        EqSpec::parse(NAT).unwrap()
    }

    #[test]
    fn identity_is_verified() {
        let n = nat();
        assert!(is_pleomorphism(&SpecMorphism::identity(&n), 0, None).unwrap().is_verified());
    }

    #[test]
    fn adding_lemmas_is_verified() {
        let n = nat();
        let k = n
            .with_terms([n.parse_term("s(0) + s(0)").unwrap(), n.parse_term("s(s(0))").unwrap()])
            .unwrap();
        let h = k
            .with_equations([
                n.parse_equation("s(0) + s(0) == s(0 + s(0))").unwrap(),
                n.parse_equation("s(0 + s(0)) == s(s(0))").unwrap(),
            ])
            .unwrap();
        let l1 = SpecMorphism::inclusion(&k, &h).unwrap();
        let PleoVerdict::Verified { traces } = is_pleomorphism(&l1, 2, None).unwrap() else {
            panic!("inclusion not verified")
        };
        assert_eq!(traces.len(), 2);
        assert!(traces.iter().all(|t| replay(&image_spec(&l1).unwrap(), t)));
    }

    #[test]
    fn false_equation_is_refuted_by_model() {
        let n = nat();
        let bigger = n.with_equations([n.parse_equation("0 == s(0)").unwrap()]).unwrap();
        let incl = SpecMorphism::inclusion(&n, &bigger).unwrap();
        let model = Model::parse(MOD2).unwrap();
        let v = is_pleomorphism(&incl, 2, Some(&model)).unwrap();
        assert!(v.is_refuted(), "{v:?}");
        assert!(matches!(is_pleomorphism(&incl, 1, None).unwrap(), PleoVerdict::Unknown { .. }));
    }

    #[test]
    fn extra_operation_is_refuted() {
        let small = EqSpec::parse("SORTS N\nOPS\n0 : -> N\n").unwrap();
        let v = is_pleomorphism(&SpecMorphism::inclusion(&small, &nat()).unwrap(), 1, None).unwrap();
        assert_eq!(
            v,
            PleoVerdict::Refuted {
                refutation: Refutation::ExtraSymbol { symbol: "+".into() }
            }
        );
    }

    #[test]
    fn identifying_provably_equal_constants() {
        let a = EqSpec::parse("SORTS T\nOPS\na b : -> T\nEQNS\na == b\n").unwrap();
        let one = EqSpec::parse("SORTS T\nOPS\na : -> T\nTERMS\na\n").unwrap();
        let fold = SpecMorphism::parse(&a, &one, "OPMAP\nb |-> a\n").unwrap();
        assert!(is_pleomorphism(&fold, 1, None).unwrap().is_verified());
        let free = EqSpec::parse("SORTS T\nOPS\na b : -> T\n").unwrap();
        let fold = SpecMorphism::parse(&free, &one, "OPMAP\nb |-> a\n").unwrap();
        assert!(matches!(is_pleomorphism(&fold, 2, None).unwrap(), PleoVerdict::Unknown { .. }));
    }
}
