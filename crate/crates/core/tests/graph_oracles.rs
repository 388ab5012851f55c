use pleo::colimit::{paste_check, pushout, verify_pushout};
use pleo::graph::{find_matches, isomorphic, GraphMorphism, MatchKind};
use pleo::rewriting::{dpo_step, parse_rules, sqpo_step};
use pleo::{Arrow, Error, Span, Square};
use pleo_testkit::graphs::{brute_matches, is_pushout_by_kernel, random_graph, random_morphism, random_span, raw, with_extra_node};
use pleo_testkit::rng;

#[test]
fn matches_agree_with_brute_force() {
    let mut rng = rng(1);
    for _ in 0..200 {
        let pattern = random_graph(&mut rng, "p", 3, 3, 2);
        let host = random_graph(&mut rng, "h", 4, 5, 2);
        for (kind, injective) in [(MatchKind::Homomorphism, false), (MatchKind::Mono, true)] {
            let found: Vec<_> = find_matches(&pattern, &host, kind).iter().map(raw).collect();
            let expected = brute_matches(&pattern, &host, injective);
            assert_eq!(found.len(), expected.len(), "duplicates or misses");
            assert!(found.iter().all(|m| expected.contains(m)));
        }
    }
}

#[test]
fn computed_pushouts_pass_both_checks() {
    let mut rng = rng(2);
    for _ in 0..150 {
        let span = random_span(&mut rng, 3);
        let po = pushout(&span).unwrap();
        let sq = po.square();
        assert!(verify_pushout(&sq).unwrap());
        assert!(is_pushout_by_kernel(&sq));
    }
}

/// Commuting squares that are not pushouts: the computed pushout followed
/// by a non-iso map (an inclusion into a bigger graph, or a fold).
fn spoiled(po_sq: &Square<GraphMorphism>, rng: &mut pleo_testkit::Rng) -> Option<Square<GraphMorphism>> {
    let vertex = po_sq.cocone().vertex();
    let bigger = with_extra_node(vertex);
    let out = if rng_bool(rng) {
        GraphMorphism::inclusion(vertex, &bigger).unwrap()
    } else {
        let target = random_graph(rng, "q", 2, 2, 1);
        random_morphism(rng, vertex, &target, MatchKind::Homomorphism)?
    };
    Square::new(
        po_sq.span().clone(),
        pleo::Cospan::new(po_sq.cocone().left().then(&out).unwrap(), po_sq.cocone().right().then(&out).unwrap()).unwrap(),
    )
    .ok()
}

fn rng_bool(rng: &mut pleo_testkit::Rng) -> bool {
    use rand::Rng;
    rng.gen_bool(0.5)
}

#[test]
fn verify_pushout_matches_kernel_oracle_on_spoiled_squares() {
    let mut rng = rng(3);
    let mut negatives = 0;
    for _ in 0..150 {
        let sq = pushout(&random_span(&mut rng, 3)).unwrap().square();
        if let Some(bad) = spoiled(&sq, &mut rng) {
            let expected = is_pushout_by_kernel(&bad);
            assert_eq!(verify_pushout(&bad).unwrap(), expected);
            negatives += usize::from(!expected);
        }
    }
    assert!(negatives > 50, "too few non-pushouts generated: {negatives}");
}

#[test]
fn pasting_law_on_enumerated_pairs() {
    let mut rng = rng(4);
    let (mut pairs, mut second_pushouts) = (0, 0);
    while pairs < 120 {
        let first = pushout(&random_span(&mut rng, 3)).unwrap().square();
        // second square starts on the first one's closing leg A -> Q
        let a = first.span().left().codomain().clone();
        let a2 = random_graph(&mut rng, "c", 3, 2, 1);
        let Some(next) = random_morphism(&mut rng, &a, &a2, MatchKind::Homomorphism) else { continue };
        let span2 = Span::new(next, first.cocone().left().clone()).unwrap();
        let mut second = pushout(&span2).unwrap().square();
        if rng_bool(&mut rng) {
            match spoiled(&second, &mut rng) {
                Some(s) => second = s,
                None => continue,
            }
        }
        let holds = paste_check(&first, &second).expect("pasting law violated");
        assert_eq!(holds, is_pushout_by_kernel(&second));
        second_pushouts += usize::from(holds);
        pairs += 1;
    }
    assert!(second_pushouts > 20 && second_pushouts < pairs - 20);
}

const DELETE: &str = "\
RULE del_edge
L:
  NODES
  u : a
  v : a
  EDGES
  e : u -> v : x
K:
  NODES
  u : a
  v : a
R:
  NODES
  u : a
  v : a
l: inclusion
r: inclusion
RULE del_node
L:
  NODES
  u : a
K:
R:
l: inclusion
r: inclusion
RULE clone_free
L:
  NODES
  u : a
K:
  NODES
  u : a
R:
  NODES
  u : a
  w : a
  EDGES
  f : u -> w : y
l: inclusion
r: inclusion
RULE del_loop_keep
L:
  NODES
  u : a
  EDGES
  e : u -> u : x
K:
  NODES
  u : a
R:
  NODES
  u : a
l: inclusion
r: inclusion
";

#[test]
fn sqpo_agrees_with_dpo_on_mono_matches() {
    let rules = parse_rules(DELETE).unwrap();
    let mut rng = rng(5);
    let (mut agreed, mut dangling) = (0, 0);
    for _ in 0..120 {
        let host = random_graph(&mut rng, "g", 5, 5, 1);
        for rule in &rules {
            for m in find_matches(rule.lhs(), &host, MatchKind::Mono) {
                match dpo_step(rule, &m) {
                    Ok(d) => {
                        let s = sqpo_step(rule, &m).unwrap();
                        assert!(isomorphic(d.result(), s.result()));
                        assert!(d.check().unwrap() && s.check().unwrap());
                        agreed += 1;
                    }
                    Err(Error::DanglingViolation { .. }) => {
                        // SqPO deletes the dangling edges with the node
                        let s = sqpo_step(rule, &m).unwrap();
                        let deleted = m.node_image();
                        let expected_edges = host.edges().values().filter(|e| !deleted.contains(&e.source) && !deleted.contains(&e.target)).count();
                        assert_eq!(s.result().node_count(), host.node_count() - deleted.len() + rule.rhs().node_count() - rule.interface().node_count());
                        assert!(s.result().edge_count() >= expected_edges);
                        dangling += 1;
                    }
                    Err(e) => panic!("unexpected DPO failure on a mono match: {e}"),
                }
            }
        }
    }
    assert!(agreed > 100 && dangling > 10, "{agreed} {dangling}");
}

#[test]
fn node_with_incident_edge() {
    let rules = parse_rules(DELETE).unwrap();
    let del_node = &rules[1];
    let host = pleo::graph::text::parse_graph("NODES\nn : a\nm : a\nEDGES\ne : n -> m : x\n").unwrap();
    let m = GraphMorphism::from_pairs(del_node.lhs(), &host, [("u", "n")], []).unwrap();
    assert!(matches!(dpo_step(del_node, &m), Err(Error::DanglingViolation { .. })));
    let s = sqpo_step(del_node, &m).unwrap();
    let expected = pleo::graph::text::parse_graph("NODES\nm : a\n").unwrap();
    assert!(isomorphic(s.result(), &expected));
}
