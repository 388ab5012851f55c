use std::collections::BTreeSet;

use pleo::category::Pushout;
use pleo::deduction::{classic_step, minimal_witness, parse_script, pleopushout_step, run_derivation, Instance, RunOptions, StepMode, Witness, PLEO_MORPHISMS};
use pleo::eqlogic::{derivable, EqSpec, SpecMorphism};
use pleo::{fixtures, Arrow, Cospan};
use pleo_testkit::corpus::{deduction_fixtures, worked_example, rule, rules};
use pleo_testkit::rng;
use pleo_testkit::specs::{brute_mediators, exhaustive_min_kernel, nat};

#[test]
fn cube_conclusions_hold_on_every_fixture() {
    let fixtures = deduction_fixtures(&mut rng(21), 24, 3);
    assert!(fixtures.len() >= 20, "only {} fixtures", fixtures.len());
    let mut steps = 0;
    for f in &fixtures {
        let mut witnesses = vec![Witness::identity(&f.rule, &f.inst).unwrap()];
        witnesses.extend(minimal_witness(&f.rule, &f.inst, 3).unwrap());
        for w in witnesses {
            let (_, cube) = pleopushout_step(&f.rule, &f.inst, &w, 4).unwrap_or_else(|e| panic!("{}: {e}", f.name));
            assert!(cube.all_faces_hold(), "{}", f.name);
            for name in PLEO_MORPHISMS {
                assert!(cube.verdicts[name].is_verified(), "{}: {name}", f.name);
            }
            steps += 1;
        }
    }
    assert!(steps >= 40);
}

#[test]
fn identity_witness_reduces_to_classic_step() {
    for f in deduction_fixtures(&mut rng(22), 20, 3) {
        let (classic, _) = classic_step(&f.rule, &f.inst, 3, false).unwrap();
        let w = Witness::identity(&f.rule, &f.inst).unwrap();
        let (pleo, _) = pleopushout_step(&f.rule, &f.inst, &w, 3).unwrap();
        assert_eq!(classic.target(), pleo.target(), "{}", f.name);
        for e in f.rule.conclusion().equations() {
            assert_eq!(classic.morphism().map_equation(e), pleo.morphism().map_equation(e), "{}", f.name);
        }
    }
}

#[test]
fn mediating_morphism_is_unique() {
    let f = worked_example();
    let w = minimal_witness(&f.rule, &f.inst, 3).unwrap().unwrap();
    let (_, cube) = pleopushout_step(&f.rule, &f.inst, &w, 3).unwrap();
    let d = &cube.diagram;
    assert!(d.sigma_p.codomain().symbol_count() <= 30);
    let top = Pushout {
        span: f.rule.span().unwrap().clone(),
        cocone: Cospan::new(d.h.clone(), d.c.clone()).unwrap(),
    };
    let cocone = Cospan::new(d.sigma_h.then(&d.h1).unwrap(), d.sigma_c.then(&d.c1).unwrap()).unwrap();
    let all = brute_mediators(&top, &cocone);
    assert_eq!(all, vec![d.sigma_p.clone()]);
}

#[test]
fn lemma_dropping_sizes() {
    let f = worked_example();
    let n = nat().equations().len();
    let (classic, _) = classic_step(&f.rule, &f.inst, 3, false).unwrap();
    let w = minimal_witness(&f.rule, &f.inst, 3).unwrap().unwrap();
    let (pleo, _) = pleopushout_step(&f.rule, &f.inst, &w, 3).unwrap();
    assert_eq!(pleo.target().equations().len(), n + 1);
    assert_eq!(classic.target().equations().len(), n + 3);
}

#[test]
fn minimal_runs_are_conservative() {
    let start = nat();
    let script = parse_script(fixtures::SCRIPT).unwrap();
    let opts = RunOptions {
        mode: Some(StepMode::PleoMinimal),
        ..RunOptions::default()
    };
    let run = run_derivation(&start, &rules(3), &script, &opts);
    assert!(run.is_complete());
    for record in &run.steps {
        assert!(start.equations().is_subset(record.result.equations()));
    }
    for e in run.final_spec().equations().difference(start.equations()) {
        assert!(derivable(&start, e, 3).unwrap().is_verified(), "{e:?}");
    }
    assert!(run.instance.unwrap().evidence().is_verified());
}

/// `NAT` with an extra constant `a` and the axiom `a + 0 == a`, which `NAT`
/// cannot derive; the transitivity instance needs it.
fn extra_axiom_instance(anchored: bool) -> Instance {
    let r = rule("trans");
    let base = EqSpec::parse(&format!("{}OPS\na : -> N\nEQNS\na + 0 == a\n", fixtures::NAT)).unwrap();
    let eq = |s: &str| base.parse_equation(s).unwrap();
    let target = base.with_equations([eq("s(a) + 0 == s(a + 0)"), eq("s(a + 0) == s(a)")]).unwrap();
    let bindings: Vec<(String, String)> =
        [("x", "s(a) + 0"), ("y", "s(a + 0)"), ("z", "s(a)")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let sigma_h = pleo::deduction::bind_instance(r.hypothesis(), &target, &bindings).unwrap();
    let incl = SpecMorphism::inclusion(&base, sigma_h.codomain()).unwrap();
    let v = pleo::eqlogic::is_pleomorphism(&incl, 3, None).unwrap();
    let evidence = pleo::deduction::ZigZag::trivial(base).with("lemmas", incl.clone(), pleo::deduction::Direction::Forward, v, false).unwrap();
    Instance::new(sigma_h, evidence, anchored.then_some(incl)).unwrap()
}

#[test]
fn greedy_witness_matches_exhaustive_search() {
    let r = rule("trans");
    for anchored in [true, false] {
        let inst = extra_axiom_instance(anchored);
        let w = minimal_witness(&r, &inst, 2).unwrap().unwrap();
        let kernel = w.kernel();
        assert!(kernel.equations().contains(&kernel.parse_equation("a + 0 == a").unwrap()) || !anchored);
        // exhaustive search over the same terms, keeping whatever the anchor forces
        let target = inst.target();
        let to_target = r.span().unwrap().left().then(inst.morphism()).unwrap();
        let mut terms: BTreeSet<_> = r.span().unwrap().apex().term_closure().iter().map(|t| to_target.map_term(t)).collect();
        let mut required = BTreeSet::new();
        if let Some(a) = inst.anchor() {
            terms.extend(a.domain().term_closure().iter().map(|t| a.map_term(t)));
            required.extend(a.domain().equations().iter().map(|e| a.map_equation(e)));
        }
        let (best, winners) = exhaustive_min_kernel(target, &terms, &required, 2).unwrap();
        let greedy: BTreeSet<_> = kernel.equations().difference(&required).cloned().collect();
        assert_eq!(greedy.len(), best, "anchored={anchored}");
        assert!(winners.iter().any(|w| w.difference(&required).cloned().collect::<BTreeSet<_>>() == greedy));
    }
}
