//! Text and DOT formats for graphs and graph morphisms.
//!
//! ```text
//! NODES
//! a : person
//! b : person
//! EDGES
//! e1 : a -> b : knows
//! ```
//!
//! Morphisms use `NODEMAP` / `EDGEMAP` sections of `x |-> y` lines. An
//! optional `LABELS` section declares the label alphabet; when present every
//! label must belong to it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{Graph, GraphMorphism, DEFAULT_LABEL};
use crate::error::{Error, Result};
use crate::text::{self, is_identifier, Line};

pub fn parse_graph(input: &str) -> Result<Graph> {
    parse_graph_lines(&text::lines(input))
}

pub fn parse_graph_lines(lines: &[Line<'_>]) -> Result<Graph> {
    let mut g = Graph::new();
    let mut alphabet: Option<BTreeSet<String>> = None;
    let mut pending_edges = Vec::new();
    for (section, body) in text::sections(lines, &["LABELS", "NODES", "EDGES"])? {
        for line in body {
            match section.as_str() {
                "LABELS" => {
                    alphabet
                        .get_or_insert_with(BTreeSet::new)
                        .extend(line.text.split_whitespace().map(str::to_string));
                }
                "NODES" => {
                    let (id, label) = match line.text.split_once(':') {
                        Some((id, label)) => (id.trim(), label.trim()),
                        None => (line.text, DEFAULT_LABEL),
                    };
                    if !is_identifier(id) || !is_identifier(label) {
                        return Err(Error::parse(line.number, "expected `id : label`"));
                    }
                    g.add_node(id, label)
                        .map_err(|e| Error::parse(line.number, e.to_string()))?;
                }
                _ => pending_edges.push(line),
            }
        }
    }
    for line in pending_edges {
        let mut parts = line.text.splitn(3, ':').map(str::trim);
        let id = parts.next().unwrap_or_default();
        let ends = parts.next();
        let label = parts.next().unwrap_or(DEFAULT_LABEL);
        let Some((src, tgt)) = ends.and_then(|e| e.split_once("->")) else {
            return Err(Error::parse(line.number, "expected `id : src -> tgt : label`"));
        };
        if !is_identifier(id) || !is_identifier(label) {
            return Err(Error::parse(line.number, "bad edge identifier or label"));
        }
        g.add_edge(id, src.trim(), tgt.trim(), label)
            .map_err(|e| Error::parse(line.number, e.to_string()))?;
    }
    if let Some(alphabet) = alphabet {
        let used = g
            .nodes()
            .values()
            .chain(g.edges().values().map(|e| &e.label));
        for label in used {
            if !alphabet.contains(label) {
                return Err(Error::parse(
                    lines.first().map_or(0, |l| l.number),
                    format!("label `{label}` is not in the declared alphabet"),
                ));
            }
        }
    }
    Ok(g)
}

/// Canonical text: nodes and edges in identifier order.
pub fn graph_to_text(g: &Graph) -> String {
    let mut out = String::from("NODES\n");
    for (id, label) in g.nodes() {
        let _ = writeln!(out, "{id} : {label}");
    }
    out.push_str("EDGES\n");
    for (id, e) in g.edges() {
        let _ = writeln!(out, "{id} : {} -> {} : {}", e.source, e.target, e.label);
    }
    out
}

pub fn parse_morphism(input: &str, domain: &Graph, codomain: &Graph) -> Result<GraphMorphism> {
    parse_morphism_lines(&text::lines(input), domain, codomain)
}

pub fn parse_morphism_lines(
    lines: &[Line<'_>],
    domain: &Graph,
    codomain: &Graph,
) -> Result<GraphMorphism> {
    let mut nodes = BTreeMap::new();
    let mut edges = BTreeMap::new();
    for (section, body) in text::sections(lines, &["NODEMAP", "EDGEMAP"])? {
        let target = if section == "NODEMAP" { &mut nodes } else { &mut edges };
        for line in body {
            let Some((a, b)) = line.text.split_once("|->") else {
                return Err(Error::parse(line.number, "expected `x |-> y`"));
            };
            if target.insert(a.trim().to_string(), b.trim().to_string()).is_some() {
                return Err(Error::parse(line.number, format!("`{}` mapped twice", a.trim())));
            }
        }
    }
    GraphMorphism::new(domain.clone(), codomain.clone(), nodes, edges).map_err(|e| {
        Error::parse(lines.first().map_or(0, |l| l.number), e.to_string())
    })
}

pub fn morphism_to_text(m: &GraphMorphism) -> String {
    let mut out = String::from("NODEMAP\n");
    for (a, b) in m.node_map() {
        let _ = writeln!(out, "{a} |-> {b}");
    }
    out.push_str("EDGEMAP\n");
    for (a, b) in m.edge_map() {
        let _ = writeln!(out, "{a} |-> {b}");
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Writes the nodes and edges of `g` into a DOT cluster, prefixing
/// identifiers with `prefix`.
pub(crate) fn write_dot_cluster(out: &mut String, prefix: &str, title: &str, g: &Graph) {
    let _ = writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{prefix}")));
    let _ = writeln!(out, "    label={};", quote(title));
    for (id, label) in g.nodes() {
        let _ = writeln!(
            out,
            "    {} [label={}];",
            quote(&format!("{prefix}:{id}")),
            quote(&format!("{id}:{label}"))
        );
    }
    for (id, e) in g.edges() {
        let _ = writeln!(
            out,
            "    {} -> {} [label={}];",
            quote(&format!("{prefix}:{}", e.source)),
            quote(&format!("{prefix}:{}", e.target)),
            quote(&format!("{id}:{}", e.label))
        );
    }
    out.push_str("  }\n");
}

/// Dotted node-map arrows for a morphism drawn between two clusters.
pub(crate) fn write_dot_morphism(out: &mut String, name: &str, from: &str, to: &str, m: &GraphMorphism) {
    for (a, b) in m.node_map() {
        let _ = writeln!(
            out,
            "  {} -> {} [style=dotted, color=gray, label={}];",
            quote(&format!("{from}:{a}")),
            quote(&format!("{to}:{b}")),
            quote(name)
        );
    }
}

pub fn graph_to_dot(name: &str, g: &Graph) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    for (id, label) in g.nodes() {
        let _ = writeln!(out, "  {} [label={}];", quote(id), quote(&format!("{id}:{label}")));
    }
    for (id, e) in g.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&e.source),
            quote(&e.target),
            quote(&format!("{id}:{}", e.label))
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CYCLE: &str = "# three cycle\nNODES\na\nb\nc\nEDGES\nab : a -> b\nbc : b -> c\nca : c -> a\n";

    #[test]
    fn parses_and_round_trips() {
        let g = parse_graph(CYCLE).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge(&"bc".to_string()).unwrap().target, "c");
        let text = graph_to_text(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert_eq!(graph_to_text(&parse_graph(&text).unwrap()), text);
    }

    #[test]
    fn alphabet_is_enforced() {
        let err = parse_graph("LABELS x\nNODES\na : y\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(parse_graph("LABELS x _\nNODES\na : x\nb\n").is_ok());
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_graph("NODES\na\nEDGES\ne : a -> zz\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
        assert!(matches!(parse_graph("a : b\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn morphism_round_trip() {
        let g = parse_graph(CYCLE).unwrap();
        let m = parse_morphism(
            "NODEMAP\na |-> b\nb |-> c\nc |-> a\nEDGEMAP\nab |-> bc\nbc |-> ca\nca |-> ab\n",
            &g,
            &g,
        )
        .unwrap();
        assert_eq!(parse_morphism(&morphism_to_text(&m), &g, &g).unwrap(), m);
    }

    #[test]
    fn dot_mentions_every_edge() {
        let dot = graph_to_dot("g", &parse_graph(CYCLE).unwrap());
        assert_eq!(dot.matches("->").count(), 3);
        assert!(dot.starts_with("digraph \"g\" {"));
    }
}
