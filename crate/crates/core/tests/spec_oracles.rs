use pleo::colimit::{paste_check, pushout, verify_pushout};
use pleo::eqlogic::{derivable, is_pleomorphism, refute, replay, Derivation, EqSpec, Equation, PleoVerdict, RefuteOutcome, SpecMorphism};
use pleo::{Arrow, Span};
use pleo_testkit::specs::{ground_terms, modular, nat, nat_value, random_inclusion_span, random_triple, union};
use pleo_testkit::rng;

#[test]
fn inclusion_pushouts_are_unions() {
    let mut rng = rng(11);
    for _ in 0..120 {
        let (k, a, b) = random_inclusion_span(&mut rng);
        let span = Span::new(SpecMorphism::inclusion(&k, &a).unwrap(), SpecMorphism::inclusion(&k, &b).unwrap()).unwrap();
        let po = pushout(&span).unwrap();
        assert_eq!(po.vertex(), &union(&a, &b));
        assert!(verify_pushout(&po.square()).unwrap());
        assert!(po.vertex().symbol_count() <= 24);
    }
}

#[test]
fn extra_symbols_spoil_spec_pushouts() {
    let mut rng = rng(12);
    for _ in 0..60 {
        let (k, a, b) = random_inclusion_span(&mut rng);
        let span = Span::new(SpecMorphism::inclusion(&k, &a).unwrap(), SpecMorphism::inclusion(&k, &b).unwrap()).unwrap();
        let vertex = union(&a, &b);
        let bigger = EqSpec::parse(&format!("{}OPS\nzz : -> T\n", vertex.to_text())).unwrap();
        let cocone = pleo::Cospan::new(SpecMorphism::inclusion(&a, &bigger).unwrap(), SpecMorphism::inclusion(&b, &bigger).unwrap()).unwrap();
        let sq = pleo::Square::new(span, cocone).unwrap();
        assert!(!verify_pushout(&sq).unwrap());
    }
}

#[test]
fn pasting_law_on_spec_squares() {
    let mut rng = rng(13);
    let mut checked = 0;
    for _ in 0..100 {
        let (k, a, b) = random_inclusion_span(&mut rng);
        let span = Span::new(SpecMorphism::inclusion(&k, &a).unwrap(), SpecMorphism::inclusion(&k, &b).unwrap()).unwrap();
        let first = pushout(&span).unwrap().square();
        let (_, _, a2) = random_inclusion_span(&mut rng);
        // grow A by a disjoint extension
        let ext = union(&a, &a2.with_content(Default::default(), Default::default()).unwrap());
        let Ok(next) = SpecMorphism::inclusion(&a, &ext) else { continue };
        let second = pushout(&Span::new(next, first.cocone().left().clone()).unwrap()).unwrap().square();
        assert!(paste_check(&first, &second).unwrap());
        checked += 1;
    }
    assert!(checked >= 100);
}

#[test]
fn derivations_are_sound_and_replayable() {
    let pool = ground_terms(4);
    let n = nat();
    let mut verified = 0;
    for (i, a) in pool.iter().enumerate() {
        for b in &pool[i + 1..] {
            if nat_value(a) != nat_value(b) {
                continue;
            }
            let goal = Equation::new(a.clone(), b.clone());
            match derivable(&n, &goal, 3).unwrap() {
                Derivation::Verified(trace) => {
                    assert!(replay(&n, &trace));
                    verified += 1;
                }
                Derivation::Unknown { .. } => {}
            }
        }
    }
    assert!(verified >= 7, "{verified}");
}

#[test]
fn refute_and_derivable_never_both_succeed() {
    let pool = ground_terms(4);
    let mut rng = rng(14);
    let (mut refuted, mut proved) = (0, 0);
    for _ in 0..50 {
        let (spec, goal, model, modulus) = random_triple(&mut rng, &pool);
        let r = refute(&spec, &goal, &model).unwrap();
        let d = derivable(&spec, &goal, 2).unwrap();
        let (a, b) = (goal.lhs(), goal.rhs());
        assert!(!(d.is_verified() && matches!(r, RefuteOutcome::Refuted(_))), "{goal:?}");
        // the model answers exactly by value modulo n
        assert_eq!(matches!(r, RefuteOutcome::Refuted(_)), nat_value(a) % modulus != nat_value(b) % modulus);
        refuted += usize::from(matches!(r, RefuteOutcome::Refuted(_)));
        proved += usize::from(d.is_verified());
    }
    assert!(refuted > 5 && proved > 5, "{refuted} {proved}");
}

fn renamed_nat() -> (EqSpec, SpecMorphism) {
    let n = nat();
    let text = n.to_text().replace("s(", "succ(").replace("s :", "succ :");
    let m = EqSpec::parse(&text).unwrap();
    let iso = SpecMorphism::parse(&n, &m, "OPMAP\ns |-> succ(?1)\n").unwrap();
    (m, iso)
}

#[test]
fn identities_and_isomorphisms_verify() {
    let (m, iso) = renamed_nat();
    assert!(is_pleomorphism(&SpecMorphism::identity(&m), 1, None).unwrap().is_verified());
    assert!(is_pleomorphism(&iso, 1, None).unwrap().is_verified());
    let back = SpecMorphism::parse(&m, &nat(), "OPMAP\nsucc |-> s(?1)\n").unwrap();
    assert_eq!(iso.then(&back).unwrap(), SpecMorphism::identity(&nat()));
    assert!(is_pleomorphism(&back, 1, None).unwrap().is_verified());
}

/// A chain of inclusions `NAT <= A <= B` mixing derivable lemmas and
/// equations false in the integers modulo two.
fn chains() -> Vec<[EqSpec; 3]> {
    let n = nat();
    let eq = |s: &str| n.parse_equation(s).unwrap();
    let true1 = eq("s(0) + s(0) == s(s(0))");
    let true2 = eq("0 + s(0) == s(0)");
    let false1 = eq("0 == s(0)");
    let mut out = Vec::new();
    for first in [vec![], vec![true1.clone()], vec![false1.clone()]] {
        for second in [vec![], vec![true2.clone()], vec![false1.clone()]] {
            let a = n.with_equations(first.clone()).unwrap();
            let b = a.with_equations(second).unwrap();
            out.push([n.clone(), a, b]);
        }
    }
    out
}

#[test]
fn two_out_of_three_consistency() {
    let model = modular(2);
    let (mut verified, mut refuted) = (0, 0);
    for [n, a, b] in chains() {
        let f = SpecMorphism::inclusion(&n, &a).unwrap();
        let g = SpecMorphism::inclusion(&a, &b).unwrap();
        let gf = f.then(&g).unwrap();
        // the model only applies where it satisfies the domain
        let verdict = |m: &SpecMorphism| {
            let usable = model.satisfies(m.domain()).unwrap();
            is_pleomorphism(m, 3, usable.then_some(&model)).unwrap()
        };
        let v: Vec<PleoVerdict> = [&f, &g, &gf].into_iter().map(verdict).collect();
        verified += v.iter().filter(|x| x.is_verified()).count();
        refuted += v.iter().filter(|x| x.is_refuted()).count();
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            if v[i].is_verified() && v[j].is_verified() {
                assert!(!v[k].is_refuted(), "2-out-of-3 violated on {:?}", b.to_text());
            }
        }
    }
    assert!(verified > 10 && refuted > 3, "{verified} {refuted}");
}

#[test]
fn pleomorphisms_are_stable_under_pushout() {
    let n = nat();
    let lemma = n.with_equations([n.parse_equation("s(0) + s(0) == s(s(0))").unwrap()]).unwrap();
    let tau = SpecMorphism::inclusion(&n, &lemma).unwrap();
    assert!(is_pleomorphism(&tau, 3, None).unwrap().is_verified());
    let extensions = [
        "OPS\nc : -> N\n",
        "OPS\nc : -> N\nEQNS\nc == s(0)\n",
        "OPS\nd : N -> N\nEQNS\nd(0) == 0\n",
        "TERMS\ns(s(s(0)))\n",
    ];
    for ext in extensions {
        let other = EqSpec::parse(&format!("{}{ext}", n.to_text())).unwrap();
        let sigma = SpecMorphism::inclusion(&n, &other).unwrap();
        let po = pushout(&Span::new(tau.clone(), sigma).unwrap()).unwrap();
        let v = is_pleomorphism(po.inject_right(), 3, None).unwrap();
        assert!(v.is_verified(), "{ext}: {v:?}");
    }
}
