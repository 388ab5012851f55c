use std::collections::{BTreeMap, BTreeSet};

use pleo::graph::{find_matches, Graph, GraphMorphism, MatchKind};
use pleo::{Arrow, Span, Square};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::Rng;

const NODE_LABELS: [&str; 2] = ["a", "b"];
const EDGE_LABELS: [&str; 2] = ["x", "y"];

/// A random graph with up to `max_nodes` nodes and `max_edges` edges.
/// `labels` bounds how many distinct labels are used (1 or 2).
pub fn random_graph(rng: &mut Rng, prefix: &str, max_nodes: usize, max_edges: usize, labels: usize) -> Graph {
    let mut g = Graph::new();
    let n = rng.gen_range(1..=max_nodes.max(1));
    for i in 0..n {
        g.add_node(format!("{prefix}{i}"), NODE_LABELS[rng.gen_range(0..labels)]).unwrap();
    }
    let m = rng.gen_range(0..=max_edges);
    for i in 0..m {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        g.add_edge(
            format!("{prefix}e{i}"),
            format!("{prefix}{s}"),
            format!("{prefix}{t}"),
            EDGE_LABELS[rng.gen_range(0..labels)],
        )
        .unwrap();
    }
    g
}

pub fn random_morphism(rng: &mut Rng, dom: &Graph, cod: &Graph, kind: MatchKind) -> Option<GraphMorphism> {
    find_matches(dom, cod, kind).choose(rng).cloned()
}

/// A random span `A <- K -> B` of graphs with at most `max_nodes` nodes each.
pub fn random_span(rng: &mut Rng, max_nodes: usize) -> Span<GraphMorphism> {
    loop {
        let k = random_graph(rng, "k", 2.min(max_nodes), 1, 1);
        let a = random_graph(rng, "a", max_nodes, 3, 1);
        let b = random_graph(rng, "b", max_nodes, 3, 1);
        let kind = if rng.gen_bool(0.5) { MatchKind::Mono } else { MatchKind::Homomorphism };
        if let (Some(f), Some(g)) = (random_morphism(rng, &k, &a, kind), random_morphism(rng, &k, &b, MatchKind::Homomorphism)) {
            return Span::new(f, g).unwrap();
        }
    }
}

pub type RawMap = (BTreeMap<String, String>, BTreeMap<String, String>);

/// Every label- and incidence-preserving map, by trying all functions.
pub fn brute_matches(pattern: &Graph, host: &Graph, injective: bool) -> BTreeSet<RawMap> {
    let pn: Vec<&String> = pattern.nodes().keys().collect();
    let pe: Vec<&String> = pattern.edges().keys().collect();
    let hn: Vec<&String> = host.nodes().keys().collect();
    let he: Vec<&String> = host.edges().keys().collect();
    let mut out = BTreeSet::new();
    for nodes in all_functions(pn.len(), hn.len()) {
        for edges in all_functions(pe.len(), he.len()) {
            let nm: BTreeMap<String, String> = pn.iter().zip(&nodes).map(|(p, &i)| ((*p).clone(), hn[i].clone())).collect();
            let em: BTreeMap<String, String> = pe.iter().zip(&edges).map(|(p, &i)| ((*p).clone(), he[i].clone())).collect();
            let labels_ok = nm.iter().all(|(p, h)| pattern.nodes()[p] == host.nodes()[h]);
            let edges_ok = em.iter().all(|(p, h)| {
                let (a, b) = (&pattern.edges()[p], &host.edges()[h]);
                a.label == b.label && nm[&a.source] == b.source && nm[&a.target] == b.target
            });
            let inj = !injective
                || (nm.values().collect::<BTreeSet<_>>().len() == nm.len()
                    && em.values().collect::<BTreeSet<_>>().len() == em.len());
            if labels_ok && edges_ok && inj {
                out.insert((nm, em));
            }
        }
    }
    out
}

fn all_functions(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..from {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..to).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn raw(m: &GraphMorphism) -> RawMap {
    (m.node_map().clone(), m.edge_map().clone())
}

fn find(parent: &mut BTreeMap<(u8, String), (u8, String)>, x: &(u8, String)) -> (u8, String) {
    let p = parent.get(x).cloned().unwrap_or_else(|| x.clone());
    if &p == x {
        return p;
    }
    let root = find(parent, &p);
    parent.insert(x.clone(), root.clone());
    root
}

/// Pushout test by the set-level description: a commuting square of graphs
/// is a pushout iff, on nodes and on edges separately, the closing legs are
/// jointly surjective and identify exactly what the span forces together.
pub fn is_pushout_by_kernel(sq: &Square<GraphMorphism>) -> bool {
    if !sq.commutes().unwrap() {
        return false;
    }
    let (f, g) = (sq.span().left(), sq.span().right());
    let (p, q) = (sq.cocone().left(), sq.cocone().right());
    let vertex = p.codomain();
    for edges in [false, true] {
        let items = |m: &GraphMorphism| -> BTreeMap<String, String> {
            if edges { m.edge_map().clone() } else { m.node_map().clone() }
        };
        let (fm, gm, pm, qm) = (items(f), items(g), items(p), items(q));
        let mut parent = BTreeMap::new();
        for (k, a) in &fm {
            let (x, y) = (find(&mut parent, &(0, a.clone())), find(&mut parent, &(1, gm[k].clone())));
            if x != y {
                parent.insert(x, y);
            }
        }
        let all: Vec<(u8, String)> = pm.keys().map(|a| (0, a.clone())).chain(qm.keys().map(|b| (1, b.clone()))).collect();
        let image = |x: &(u8, String)| if x.0 == 0 { pm[&x.1].clone() } else { qm[&x.1].clone() };
        for x in &all {
            for y in &all {
                let same_class = find(&mut parent, x) == find(&mut parent, y);
                if same_class != (image(x) == image(y)) {
                    return false;
                }
            }
        }
        let hit: BTreeSet<String> = all.iter().map(image).collect();
        let total = if edges { vertex.edge_count() } else { vertex.node_count() };
        if hit.len() != total {
            return false;
        }
    }
    true
}

/// A graph with one extra isolated node.
pub fn with_extra_node(g: &Graph) -> Graph {
    let mut out = g.clone();
    out.add_node("extra", "a").unwrap();
    out
}
