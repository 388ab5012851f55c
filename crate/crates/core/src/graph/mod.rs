//! Finite labeled directed multigraphs and their morphisms.

mod matching;
pub mod text;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::category::Arrow;
use crate::error::{Error, Result};

pub use matching::{find_isomorphism, find_matches, isomorphic, MatchKind};

/// Label used when a node or edge is written without one.
pub const DEFAULT_LABEL: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Graph {
    nodes: BTreeMap<String, String>,
    edges: BTreeMap<String, Edge>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<String>, label: impl Into<String>) -> Result<()> {
        let id = id.into();
        if self.nodes.contains_key(&id) {
            return Err(Error::MalformedGraph(format!("duplicate node `{id}`")));
        }
        self.nodes.insert(id, label.into());
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
        label: impl Into<String>,
    ) -> Result<()> {
        let id = id.into();
        let (source, target) = (source.into(), target.into());
        if self.edges.contains_key(&id) {
            return Err(Error::MalformedGraph(format!("duplicate edge `{id}`")));
        }
        for end in [&source, &target] {
            if !self.nodes.contains_key(end) {
                return Err(Error::MalformedGraph(format!(
                    "edge `{id}` refers to missing node `{end}`"
                )));
            }
        }
        self.edges.insert(
            id,
            Edge {
                source,
                target,
                label: label.into(),
            },
        );
        Ok(())
    }

    /// Convenience builder used by tests and fixtures.
    pub fn from_parts<'a>(
        nodes: impl IntoIterator<Item = (&'a str, &'a str)>,
        edges: impl IntoIterator<Item = (&'a str, &'a str, &'a str, &'a str)>,
    ) -> Result<Self> {
        let mut g = Graph::new();
        for (id, label) in nodes {
            g.add_node(id, label)?;
        }
        for (id, s, t, label) in edges {
            g.add_edge(id, s, t, label)?;
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &BTreeMap<String, String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<String, Edge> {
        &self.edges
    }

    pub fn node_label(&self, id: &str) -> Option<&str> {
        self.nodes.get(id).map(String::as_str)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Subgraph induced by keeping the given nodes and edges. Edges whose
    /// endpoints are not kept are rejected.
    pub fn restrict(&self, nodes: &BTreeSet<String>, edges: &BTreeSet<String>) -> Result<Graph> {
        let mut g = Graph::new();
        for n in nodes {
            let label = self
                .node_label(n)
                .ok_or_else(|| Error::MalformedGraph(format!("no node `{n}`")))?;
            g.add_node(n.clone(), label)?;
        }
        for e in edges {
            let edge = self
                .edge(e)
                .ok_or_else(|| Error::MalformedGraph(format!("no edge `{e}`")))?;
            g.add_edge(e.clone(), &edge.source, &edge.target, &edge.label)?;
        }
        Ok(g)
    }
}

/// Structure-preserving map between two graphs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphMorphism {
    domain: Graph,
    codomain: Graph,
    node_map: BTreeMap<String, String>,
    edge_map: BTreeMap<String, String>,
}

/// A match of a rule's left-hand side in a host graph.
pub type Match = GraphMorphism;

impl GraphMorphism {
    pub fn new(
        domain: Graph,
        codomain: Graph,
        node_map: BTreeMap<String, String>,
        edge_map: BTreeMap<String, String>,
    ) -> Result<Self> {
        let m = Self {
            domain,
            codomain,
            node_map,
            edge_map,
        };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(
        domain: Graph,
        codomain: Graph,
        node_map: BTreeMap<String, String>,
        edge_map: BTreeMap<String, String>,
    ) -> Self {
        let m = Self {
            domain,
            codomain,
            node_map,
            edge_map,
        };
        debug_assert!(m.validate().is_ok(), "{:?}", m.validate());
        m
    }

    /// Builds a morphism from string pairs.
    pub fn from_pairs<'a>(
        domain: &Graph,
        codomain: &Graph,
        nodes: impl IntoIterator<Item = (&'a str, &'a str)>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        Self::new(
            domain.clone(),
            codomain.clone(),
            nodes
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            edges
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        )
    }

    /// Inclusion of `domain` into `codomain` by identifiers.
    pub fn inclusion(domain: &Graph, codomain: &Graph) -> Result<Self> {
        Self::new(
            domain.clone(),
            codomain.clone(),
            domain.nodes.keys().map(|n| (n.clone(), n.clone())).collect(),
            domain.edges.keys().map(|e| (e.clone(), e.clone())).collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedMorphism(msg));
        if self.node_map.len() != self.domain.nodes.len()
            || self.edge_map.len() != self.domain.edges.len()
        {
            return bad("map is not total on the domain".into());
        }
        for (n, label) in &self.domain.nodes {
            let Some(img) = self.node_map.get(n) else {
                return bad(format!("node `{n}` is unmapped"));
            };
            match self.codomain.node_label(img) {
                None => return bad(format!("node image `{img}` is not in the codomain")),
                Some(l) if l != label => {
                    return bad(format!("node `{n}` labelled `{label}` maps to `{img}` labelled `{l}`"))
                }
                _ => {}
            }
        }
        for (e, edge) in &self.domain.edges {
            let Some(img) = self.edge_map.get(e) else {
                return bad(format!("edge `{e}` is unmapped"));
            };
            let Some(target) = self.codomain.edge(img) else {
                return bad(format!("edge image `{img}` is not in the codomain"));
            };
            if target.label != edge.label {
                return bad(format!("edge `{e}` changes label"));
            }
            if self.node_map[&edge.source] != target.source
                || self.node_map[&edge.target] != target.target
            {
                return bad(format!("edge `{e}` does not preserve incidence"));
            }
        }
        Ok(())
    }

    pub fn node_map(&self) -> &BTreeMap<String, String> {
        &self.node_map
    }

    pub fn edge_map(&self) -> &BTreeMap<String, String> {
        &self.edge_map
    }

    pub fn node(&self, id: &str) -> Option<&str> {
        self.node_map.get(id).map(String::as_str)
    }

    pub fn edge(&self, id: &str) -> Option<&str> {
        self.edge_map.get(id).map(String::as_str)
    }

    pub fn is_mono(&self) -> bool {
        is_mono(self)
    }

    pub fn node_image(&self) -> BTreeSet<String> {
        self.node_map.values().cloned().collect()
    }

    pub fn edge_image(&self) -> BTreeSet<String> {
        self.edge_map.values().cloned().collect()
    }

    /// Same maps, with a different (but compatible) codomain.
    pub fn with_codomain(&self, codomain: &Graph) -> Result<Self> {
        Self::new(
            self.domain.clone(),
            codomain.clone(),
            self.node_map.clone(),
            self.edge_map.clone(),
        )
    }
}

/// Pointwise composition `g ∘ f`.
pub fn compose(f: &GraphMorphism, g: &GraphMorphism) -> Result<GraphMorphism> {
    if f.codomain != g.domain {
        return Err(Error::EndpointMismatch);
    }
    let node_map = f
        .node_map
        .iter()
        .map(|(a, b)| (a.clone(), g.node_map[b].clone()))
        .collect();
    let edge_map = f
        .edge_map
        .iter()
        .map(|(a, b)| (a.clone(), g.edge_map[b].clone()))
        .collect();
    Ok(GraphMorphism::new_unchecked(
        f.domain.clone(),
        g.codomain.clone(),
        node_map,
        edge_map,
    ))
}

/// True iff both component maps are injective.
pub fn is_mono(f: &GraphMorphism) -> bool {
    f.node_image().len() == f.node_map.len() && f.edge_image().len() == f.edge_map.len()
}

impl Arrow for GraphMorphism {
    type Object = Graph;

    fn domain(&self) -> &Graph {
        &self.domain
    }

    fn codomain(&self) -> &Graph {
        &self.codomain
    }

    fn identity(object: &Graph) -> Self {
        GraphMorphism::new_unchecked(
            object.clone(),
            object.clone(),
            object.nodes.keys().map(|n| (n.clone(), n.clone())).collect(),
            object.edges.keys().map(|e| (e.clone(), e.clone())).collect(),
        )
    }

    fn then(&self, next: &Self) -> Result<Self> {
        compose(self, next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> Graph {
        Graph::from_parts(
            [("a", "_"), ("b", "_")],
            [("e", "a", "b", "_"), ("f", "b", "a", "_")],
        )
        .unwrap()
    }

    fn loop_graph() -> Graph {
        Graph::from_parts([("v", "_")], [("l", "v", "v", "_")]).unwrap()
    }

    #[test]
    fn rejects_dangling_edges() {
        let mut g = Graph::new();
        g.add_node("a", "_").unwrap();
        assert!(g.add_edge("e", "a", "b", "_").is_err());
        assert!(g.add_node("a", "x").is_err());
    }

    #[test]
    fn identity_laws() {
        let g = two_cycle();
        let l = loop_graph();
        let fold = GraphMorphism::from_pairs(&g, &l, [("a", "v"), ("b", "v")], [("e", "l"), ("f", "l")])
            .unwrap();
        let id_g = GraphMorphism::identity(&g);
        let id_l = GraphMorphism::identity(&l);
        assert_eq!(compose(&id_g, &fold).unwrap(), fold);
        assert_eq!(compose(&fold, &id_l).unwrap(), fold);
    }

    #[test]
    fn compose_rejects_mismatched_endpoints() {
        let g = two_cycle();
        let l = loop_graph();
        let id_g = GraphMorphism::identity(&g);
        let id_l = GraphMorphism::identity(&l);
        assert_eq!(compose(&id_g, &id_l), Err(Error::EndpointMismatch));
    }

    #[test]
    fn mono_checks() {
        let g = two_cycle();
        assert!(is_mono(&GraphMorphism::identity(&g)));

        let two = Graph::from_parts([("a", "_"), ("b", "_")], []).unwrap();
        let one = Graph::from_parts([("v", "_")], []).unwrap();
        let constant = GraphMorphism::from_pairs(&two, &one, [("a", "v"), ("b", "v")], []).unwrap();
        assert!(!is_mono(&constant));

        // Every node and edge of the loop has two preimages under the fold.
        let l = loop_graph();
        let fold = GraphMorphism::from_pairs(&g, &l, [("a", "v"), ("b", "v")], [("e", "l"), ("f", "l")])
            .unwrap();
        let preimages = fold.node_map().values().filter(|v| *v == "v").count();
        assert_eq!(preimages, 2);
        assert!(!is_mono(&fold));
    }

    #[test]
    fn morphism_validation_catches_label_and_incidence_errors() {
        let g = two_cycle();
        let l = loop_graph();
        assert!(GraphMorphism::from_pairs(&g, &l, [("a", "v")], [("e", "l"), ("f", "l")]).is_err());
        let labelled = Graph::from_parts([("v", "x")], [("l", "v", "v", "_")]).unwrap();
        assert!(GraphMorphism::from_pairs(
            &g,
            &labelled,
            [("a", "v"), ("b", "v")],
            [("e", "l"), ("f", "l")]
        )
        .is_err());
        let path = Graph::from_parts([("p", "_"), ("q", "_")], [("e", "p", "q", "_"), ("f", "p", "q", "_")])
            .unwrap();
        assert!(GraphMorphism::from_pairs(&g, &path, [("a", "p"), ("b", "q")], [("e", "e"), ("f", "f")])
            .is_err());
    }
}
