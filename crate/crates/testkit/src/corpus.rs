//! Deduction fixtures: the worked example plus generated instances of the
//! bundled rules in extensions of `NAT` by ground lemmas.

use pleo::deduction::{bind_instance, parse_rules, DeductionRule, Direction, Instance, ZigZag};
use pleo::eqlogic::{is_pleomorphism, EqSpec, Equation, SpecMorphism, Term};
use pleo::fixtures;
use pleo::Arrow;
use rand::seq::SliceRandom;

use crate::specs::{ground_terms, nat, nat_value};
use crate::Rng;

pub struct DeductionFixture {
    pub name: String,
    pub rule: DeductionRule,
    pub inst: Instance,
}

pub fn rules(depth: usize) -> Vec<DeductionRule> {
    parse_rules(&fixtures::rules(), depth, false).unwrap()
}

pub fn rule(name: &str) -> DeductionRule {
    rules(3).into_iter().find(|r| r.name() == name).unwrap()
}

/// An instance of `rule` in `NAT + lemmas`, reached from `NAT` by a verified
/// inclusion. `None` if the lemmas do not verify within `depth`.
pub fn instance(rule: &DeductionRule, lemmas: &[Equation], bindings: &[(&str, &str)], depth: usize) -> Option<Instance> {
    let ambient = nat();
    let target = ambient.with_equations(lemmas.iter().cloned()).ok()?;
    let bindings: Vec<(String, String)> = bindings.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let sigma_h = bind_instance(rule.hypothesis(), &target, &bindings).ok()?;
    let incl = SpecMorphism::inclusion(&ambient, sigma_h.codomain()).ok()?;
    let verdict = is_pleomorphism(&incl, depth, None).ok()?;
    if !verdict.is_verified() {
        return None;
    }
    let evidence = ZigZag::trivial(ambient).with("lemmas", incl.clone(), Direction::Forward, verdict, false).ok()?;
    Instance::new(sigma_h, evidence, Some(incl)).ok()
}

pub fn worked_example() -> DeductionFixture {
    let r = rule("trans");
    let nat_h = EqSpec::parse(fixtures::NAT_H).unwrap();
    let lemmas: Vec<Equation> = nat_h.equations().iter().filter(|e| !nat().equations().contains(e)).cloned().collect();
    let inst = instance(&r, &lemmas, &[("x", "s(0) + s(0)"), ("y", "s(0 + s(0))"), ("z", "s(s(0))")], 3).unwrap();
    DeductionFixture {
        name: "worked".into(),
        rule: r,
        inst,
    }
}

fn render(t: &Term) -> String {
    nat().render(t)
}

/// The worked example followed by up to `count - 1` generated fixtures:
/// transitivity and symmetry on ground lemmas with equal values, and the
/// axiom-instantiation rules at random ground arguments.
pub fn deduction_fixtures(rng: &mut Rng, count: usize, depth: usize) -> Vec<DeductionFixture> {
    let pool = ground_terms(4);
    let (trans, sym, subst, context) = (rule("trans"), rule("sym"), rule("subst"), rule("context"));
    let mut out = vec![worked_example()];
    let mut attempts = 0;
    while out.len() < count && attempts < 20 * count {
        attempts += 1;
        let kind = out.len() % 4;
        let fixture = match kind {
            0 | 1 => {
                let x = pool.choose(rng).unwrap();
                let same: Vec<&Term> = pool.iter().filter(|t| nat_value(t) == nat_value(x) && *t != x).collect();
                if same.len() < 2 {
                    continue;
                }
                let y = *same.choose(rng).unwrap();
                let z = *same.choose(rng).unwrap();
                if kind == 0 && y != z {
                    let lemmas = [Equation::new(x.clone(), y.clone()), Equation::new(y.clone(), z.clone())];
                    let b = [("x", render(x)), ("y", render(y)), ("z", render(z))];
                    let b: Vec<(&str, &str)> = b.iter().map(|(a, t)| (*a, t.as_str())).collect();
                    instance(&trans, &lemmas, &b, depth).map(|i| ("trans", trans.clone(), i))
                } else {
                    let lemmas = [Equation::new(x.clone(), y.clone())];
                    let b = [("x", render(x)), ("y", render(y))];
                    let b: Vec<(&str, &str)> = b.iter().map(|(a, t)| (*a, t.as_str())).collect();
                    instance(&sym, &lemmas, &b, depth).map(|i| ("sym", sym.clone(), i))
                }
            }
            2 => {
                let a = render(pool.choose(rng).unwrap());
                let b = render(pool.choose(rng).unwrap());
                let bindings = [("u", "s(?1) + ?2"), ("w", "s(?1 + ?2)"), ("a", a.as_str()), ("b", b.as_str())];
                instance(&subst, &[], &bindings, depth).map(|i| ("subst", subst.clone(), i))
            }
            _ => {
                let a = render(pool.choose(rng).unwrap());
                let k = ["s(?1)", "?1 + 0", "s(0) + ?1"].choose(rng).unwrap().to_string();
                let bindings = [("u", "0 + ?1"), ("w", "?1"), ("k", k.as_str()), ("a", a.as_str())];
                instance(&context, &[], &bindings, depth).map(|i| ("context", context.clone(), i))
            }
        };
        if let Some((name, rule, inst)) = fixture {
            out.push(DeductionFixture {
                name: format!("{name}-{}", out.len()),
                rule,
                inst,
            });
        }
    }
    out
}
