//! Backtracking enumeration of graph homomorphisms.

use std::collections::{BTreeMap, BTreeSet};

use super::{Graph, GraphMorphism};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchKind {
    #[default]
    Homomorphism,
    Mono,
}

struct Search<'a> {
    pattern: &'a Graph,
    host: &'a Graph,
    injective: bool,
    pattern_nodes: Vec<&'a String>,
    pattern_edges: Vec<&'a String>,
    out: Vec<GraphMorphism>,
}

impl<'a> Search<'a> {
    fn edge_candidates(&self, edge_id: &str, nodes: &BTreeMap<String, String>) -> Vec<&'a String> {
        let edge = &self.pattern.edges()[edge_id];
        let (s, t) = (&nodes[&edge.source], &nodes[&edge.target]);
        self.host
            .edges()
            .iter()
            .filter(|(_, h)| h.label == edge.label && &h.source == s && &h.target == t)
            .map(|(id, _)| id)
            .collect()
    }

    /// Every pattern edge whose endpoints are both assigned must have a
    /// candidate image.
    fn consistent(&self, nodes: &BTreeMap<String, String>, just: &str) -> bool {
        self.pattern.edges().iter().all(|(id, e)| {
            if (e.source != just && e.target != just)
                || !nodes.contains_key(&e.source)
                || !nodes.contains_key(&e.target)
            {
                return true;
            }
            !self.edge_candidates(id, nodes).is_empty()
        })
    }

    fn assign_nodes(&mut self, depth: usize, nodes: &mut BTreeMap<String, String>, used: &mut BTreeSet<String>) {
        if depth == self.pattern_nodes.len() {
            let mut edges = BTreeMap::new();
            let mut used_edges = BTreeSet::new();
            self.assign_edges(0, nodes, &mut edges, &mut used_edges);
            return;
        }
        let p = self.pattern_nodes[depth];
        let label = &self.pattern.nodes()[p];
        let host = self.host;
        for (h, hl) in host.nodes() {
            if hl != label || (self.injective && used.contains(h)) {
                continue;
            }
            nodes.insert(p.clone(), h.clone());
            if self.consistent(nodes, p) {
                used.insert(h.clone());
                self.assign_nodes(depth + 1, nodes, used);
                used.remove(h);
            }
            nodes.remove(p);
        }
    }

    fn assign_edges(
        &mut self,
        depth: usize,
        nodes: &BTreeMap<String, String>,
        edges: &mut BTreeMap<String, String>,
        used: &mut BTreeSet<String>,
    ) {
        if depth == self.pattern_edges.len() {
            self.out.push(GraphMorphism::new_unchecked(
                self.pattern.clone(),
                self.host.clone(),
                nodes.clone(),
                edges.clone(),
            ));
            return;
        }
        let e = self.pattern_edges[depth];
        for h in self.edge_candidates(e, nodes) {
            if self.injective && used.contains(h) {
                continue;
            }
            edges.insert(e.clone(), h.clone());
            used.insert(h.clone());
            self.assign_edges(depth + 1, nodes, edges, used);
            used.remove(h);
            edges.remove(e);
        }
    }
}

/// All label- and incidence-preserving maps `pattern -> host`, ordered
/// lexicographically by node assignment (pattern nodes in identifier order),
/// then by edge assignment.
pub fn find_matches(pattern: &Graph, host: &Graph, kind: MatchKind) -> Vec<GraphMorphism> {
    let mut search = Search {
        pattern,
        host,
        injective: kind == MatchKind::Mono,
        pattern_nodes: pattern.nodes().keys().collect(),
        pattern_edges: pattern.edges().keys().collect(),
        out: Vec::new(),
    };
    search.assign_nodes(0, &mut BTreeMap::new(), &mut BTreeSet::new());
    search.out
}

/// Some isomorphism `a -> b`, if one exists.
pub fn find_isomorphism(a: &Graph, b: &Graph) -> Option<GraphMorphism> {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let mut labels_a: Vec<_> = a.nodes().values().collect();
    let mut labels_b: Vec<_> = b.nodes().values().collect();
    labels_a.sort();
    labels_b.sort();
    if labels_a != labels_b {
        return None;
    }
    // An injective homomorphism between graphs of equal size is bijective,
    // and its inverse preserves labels and incidence.
    find_matches(a, b, MatchKind::Mono).into_iter().next()
}

pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    find_isomorphism(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3() -> Graph {
        Graph::from_parts(
            [("a", "_"), ("b", "_"), ("c", "_")],
            [("ab", "a", "b", "_"), ("bc", "b", "c", "_"), ("ca", "c", "a", "_")],
        )
        .unwrap()
    }

    #[test]
    fn empty_pattern_has_one_match() {
        let m = find_matches(&Graph::new(), &cycle3(), MatchKind::Homomorphism);
        assert_eq!(m.len(), 1);
        assert_eq!(find_matches(&Graph::new(), &Graph::new(), MatchKind::Mono).len(), 1);
    }

    #[test]
    fn single_edge_into_three_cycle() {
        let edge = Graph::from_parts([("a", "_"), ("b", "_")], [("e", "a", "b", "_")]).unwrap();
        let ms = find_matches(&edge, &cycle3(), MatchKind::Homomorphism);
        assert_eq!(ms.len(), 3);
        let firsts: Vec<_> = ms.iter().map(|m| m.node("a").unwrap().to_string()).collect();
        assert_eq!(firsts, vec!["a", "b", "c"]);
    }

    #[test]
    fn three_cycle_folds_onto_loop() {
        let lp = Graph::from_parts([("v", "_")], [("l", "v", "v", "_")]).unwrap();
        assert_eq!(find_matches(&cycle3(), &lp, MatchKind::Homomorphism).len(), 1);
        assert!(find_matches(&cycle3(), &lp, MatchKind::Mono).is_empty());
    }

    #[test]
    fn isomorphism_ignores_identifiers() {
        let renamed = Graph::from_parts(
            [("x", "_"), ("y", "_"), ("z", "_")],
            [("1", "y", "z", "_"), ("2", "z", "x", "_"), ("3", "x", "y", "_")],
        )
        .unwrap();
        assert!(isomorphic(&cycle3(), &renamed));
        let path = Graph::from_parts(
            [("x", "_"), ("y", "_"), ("z", "_")],
            [("1", "x", "y", "_"), ("2", "y", "z", "_"), ("3", "x", "z", "_")],
        )
        .unwrap();
        assert!(!isomorphic(&cycle3(), &path));
    }
}
