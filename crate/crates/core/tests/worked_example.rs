use pleo::deduction::{
    classic_step, minimal_witness, parse_rules, parse_script, pleopushout_step, run_derivation, DeductionRule, Instance,
    RunOptions, StepMode, Witness,
};
use pleo::eqlogic::{EqSpec, SpecMorphism};
use pleo::fixtures;

fn rule(name: &str) -> DeductionRule {
    parse_rules(&fixtures::rules(), 3, false)
        .unwrap()
        .into_iter()
        .find(|r| r.name() == name)
        .unwrap()
}

fn spec(text: &str) -> EqSpec {
    EqSpec::parse(text).unwrap()
}

/// `x, y, z |-> 1+1, s(0+1), s(1)` in the specification with both lemmas.
fn transitivity_instance(rule: &DeductionRule) -> Instance {
    let nat_h = spec(fixtures::NAT_H);
    let sigma_h = SpecMorphism::parse(
        rule.hypothesis(),
        &nat_h,
        "SORTMAP\nT |-> N\nOPMAP\nx |-> s(0) + s(0)\ny |-> s(0 + s(0))\nz |-> s(s(0))\n",
    )
    .unwrap();
    // the lemmas are derivable in NAT, so NAT_H is reached from NAT by a pleomorphism
    let nat = spec(fixtures::NAT);
    let incl = SpecMorphism::inclusion(&nat, &nat_h).unwrap();
    let verdict = pleo::eqlogic::is_pleomorphism(&incl, 3, None).unwrap();
    assert!(verdict.is_verified(), "{verdict:?}");
    let evidence = pleo::deduction::ZigZag::trivial(nat)
        .with("lemmas", incl.clone(), pleo::deduction::Direction::Forward, verdict, false)
        .unwrap();
    Instance::new(sigma_h, evidence, Some(incl)).unwrap()
}

#[test]
fn transitivity_rule_shape() {
    let r = rule("trans");
    assert_eq!(r.vertex().equations().len(), 3);
    assert!(r.fraction().verdict.is_verified());
}

#[test]
fn classic_step_adds_the_conclusion() {
    let r = rule("trans");
    let inst = transitivity_instance(&r);
    let (next, step) = classic_step(&r, &inst, 3, false).unwrap();
    assert_eq!(step.result(), &spec(fixtures::NAT_P));
    assert!(step.pushout_verified);
    let eq = r.conclusion().equations().iter().next().unwrap();
    assert_eq!(next.target().render_equation(&next.morphism().map_equation(eq)), "s(0) + s(0) == s(s(0))");
}

#[test]
fn minimal_witness_is_the_small_kernel() {
    let r = rule("trans");
    let inst = transitivity_instance(&r);
    let w = minimal_witness(&r, &inst, 3).unwrap().unwrap();
    assert_eq!(w.kernel(), &spec(fixtures::NAT_K));
    let (next, cube) = pleopushout_step(&r, &inst, &w, 3).unwrap();
    assert_eq!(next.target(), &spec(fixtures::NAT_C));
    assert!(cube.all_faces_hold() && cube.all_verified());
}

#[test]
fn identity_witness_agrees_with_classic() {
    let r = rule("trans");
    let inst = transitivity_instance(&r);
    let (classic, _) = classic_step(&r, &inst, 3, false).unwrap();
    let w = Witness::identity(&r, &inst).unwrap();
    let (pleo, _) = pleopushout_step(&r, &inst, &w, 3).unwrap();
    assert_eq!(classic.target(), pleo.target());
    assert_eq!(classic.morphism().op_map(), pleo.morphism().op_map());
}

#[test]
fn script_in_both_modes() {
    let rules = parse_rules(&fixtures::rules(), 3, false).unwrap();
    let script = parse_script(fixtures::SCRIPT).unwrap();
    let nat = spec(fixtures::NAT);
    for (mode, expected) in [(StepMode::PleoMinimal, fixtures::NAT_C), (StepMode::Classic, fixtures::NAT_P)] {
        let opts = RunOptions {
            mode: Some(mode),
            ..RunOptions::default()
        };
        let run = run_derivation(&nat, &rules, &script, &opts);
        assert!(run.is_complete(), "{mode}: {:?}", run.error);
        assert_eq!(run.final_spec(), &spec(expected), "{mode}");
    }
}
