use pleo::eqlogic::{EqSpec, Equation, Term};
use pleo::graph::text::{graph_to_text, parse_graph};
use pleo::graph::Graph;
use proptest::prelude::*;

fn nat_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::constant("0")), Just(Term::var("x")), Just(Term::var("y"))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("s", vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::app("+", vec![a, b])),
        ]
    })
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..5, prop::collection::vec((0usize..5, 0usize..5, any::<bool>()), 0..6)).prop_map(|(n, edges)| {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_node(format!("n{i}"), if i % 2 == 0 { "a" } else { "b" }).unwrap();
        }
        for (i, (s, t, l)) in edges.into_iter().enumerate() {
            g.add_edge(format!("e{i}"), format!("n{}", s % n), format!("n{}", t % n), if l { "x" } else { "y" }).unwrap();
        }
        g
    })
}

proptest! {
    #[test]
    fn terms_render_and_parse_back(t in nat_term()) {
        let nat = EqSpec::parse(pleo::fixtures::NAT).unwrap();
        prop_assert_eq!(nat.parse_term(&nat.render(&t)).unwrap(), t);
    }

    #[test]
    fn specs_round_trip(a in nat_term(), b in nat_term()) {
        let nat = EqSpec::parse(pleo::fixtures::NAT).unwrap();
        let spec = nat.with_equations([Equation::new(a, b)]).unwrap();
        let text = spec.to_text();
        let again = EqSpec::parse(&text).unwrap();
        prop_assert_eq!(&again, &spec);
        prop_assert_eq!(again.to_text(), text);
    }

    #[test]
    fn graphs_round_trip(g in small_graph()) {
        let text = graph_to_text(&g);
        prop_assert_eq!(parse_graph(&text).unwrap(), g);
    }
}
