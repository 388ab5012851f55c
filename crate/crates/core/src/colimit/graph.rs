use std::collections::{BTreeMap, BTreeSet};

use super::ComplementResult;
use crate::category::{Arrow, Cospan, Gluing, Pushout, Span, Square};
use crate::error::{Error, Result};
use crate::graph::{is_mono, Graph, GraphMorphism};
use crate::quotient::{name_classes, DisjointSets, Foot, Tagged};

/// Quotient of `left ⊎ right` by the relation generated by pairs of ids.
struct Glue<'a> {
    left: Vec<&'a String>,
    right: Vec<&'a String>,
    sets: DisjointSets,
}

impl<'a> Glue<'a> {
    fn new(left: Vec<&'a String>, right: Vec<&'a String>) -> Self {
        let n = left.len() + right.len();
        Self {
            left,
            right,
            sets: DisjointSets::new(n),
        }
    }

    fn index(&self, foot: Foot, id: &str) -> usize {
        match foot {
            Foot::Left => self.left.binary_search_by(|x| x.as_str().cmp(id)).expect("left id"),
            Foot::Right => {
                self.left.len() + self.right.binary_search_by(|x| x.as_str().cmp(id)).expect("right id")
            }
        }
    }

    fn tagged(&self, i: usize) -> Tagged {
        if i < self.left.len() {
            (Foot::Left, self.left[i].clone())
        } else {
            (Foot::Right, self.right[i - self.left.len()].clone())
        }
    }

    /// Class name for every item, indexed like the disjoint union.
    fn names(&mut self) -> Vec<String> {
        let classes: Vec<Vec<usize>> = self.sets.classes().into_values().collect();
        let tagged: Vec<Vec<Tagged>> = classes
            .iter()
            .map(|c| c.iter().map(|i| self.tagged(*i)).collect())
            .collect();
        let names = name_classes(&tagged, &mut BTreeSet::new());
        let mut out = vec![String::new(); self.sets.len()];
        for (class, name) in classes.iter().zip(names) {
            for i in class {
                out[*i] = name.clone();
            }
        }
        out
    }
}

fn graph_pushout(span: &Span<GraphMorphism>) -> Result<Pushout<GraphMorphism>> {
    let (f, g) = (span.left(), span.right());
    let (a, b) = (f.codomain(), g.codomain());

    let mut nodes = Glue::new(a.nodes().keys().collect(), b.nodes().keys().collect());
    for k in span.apex().nodes().keys() {
        let (i, j) = (nodes.index(Foot::Left, &f.node_map()[k]), nodes.index(Foot::Right, &g.node_map()[k]));
        nodes.sets.union(i, j);
    }
    let mut edges = Glue::new(a.edges().keys().collect(), b.edges().keys().collect());
    for k in span.apex().edges().keys() {
        let (i, j) = (edges.index(Foot::Left, &f.edge_map()[k]), edges.index(Foot::Right, &g.edge_map()[k]));
        edges.sets.union(i, j);
    }

    let node_names = nodes.names();
    let edge_names = edges.names();
    let label_of = |foot: Foot, id: &str| match foot {
        Foot::Left => a.nodes()[id].clone(),
        Foot::Right => b.nodes()[id].clone(),
    };

    let mut vertex = Graph::new();
    let mut node_labels: BTreeMap<String, (String, Tagged)> = BTreeMap::new();
    for (i, name) in node_names.iter().enumerate() {
        let item = nodes.tagged(i);
        let label = label_of(item.0, &item.1);
        match node_labels.get(name) {
            Some((l, other)) if *l != label => {
                return Err(Error::LabelClash(format!(
                    "node `{}` ({l}) glued to `{}` ({label})",
                    other.1, item.1
                )))
            }
            Some(_) => {}
            None => {
                node_labels.insert(name.clone(), (label, item));
            }
        }
    }
    for (name, (label, _)) in &node_labels {
        vertex.add_node(name.clone(), label.clone())?;
    }
    let mut added = BTreeSet::new();
    for (i, name) in edge_names.iter().enumerate() {
        let (foot, id) = edges.tagged(i);
        let (edge, offset) = match foot {
            Foot::Left => (&a.edges()[&id], Foot::Left),
            Foot::Right => (&b.edges()[&id], Foot::Right),
        };
        let src = &node_names[nodes.index(offset, &edge.source)];
        let tgt = &node_names[nodes.index(offset, &edge.target)];
        if added.insert(name.clone()) {
            vertex.add_edge(name.clone(), src.clone(), tgt.clone(), edge.label.clone())?;
        } else {
            let existing = vertex.edge(name).expect("added edge");
            if existing.label != edge.label {
                return Err(Error::LabelClash(format!("edge `{id}` glued across labels")));
            }
        }
    }

    let inject = |foot: Foot, source: &Graph| {
        let node_map = source
            .nodes()
            .keys()
            .map(|n| (n.clone(), node_names[nodes.index(foot, n)].clone()))
            .collect();
        let edge_map = source
            .edges()
            .keys()
            .map(|e| (e.clone(), edge_names[edges.index(foot, e)].clone()))
            .collect();
        GraphMorphism::new(source.clone(), vertex.clone(), node_map, edge_map)
    };
    let cocone = Cospan::new(inject(Foot::Left, a)?, inject(Foot::Right, b)?)?;
    Ok(Pushout {
        span: span.clone(),
        cocone,
    })
}

fn graph_mediate(
    pushout: &Pushout<GraphMorphism>,
    cocone: &Cospan<GraphMorphism>,
) -> Result<Option<GraphMorphism>> {
    let target = cocone.vertex().clone();
    let mut node_map: BTreeMap<String, String> = BTreeMap::new();
    let mut edge_map: BTreeMap<String, String> = BTreeMap::new();
    for (inj, leg) in [
        (pushout.inject_left(), cocone.left()),
        (pushout.inject_right(), cocone.right()),
    ] {
        for (x, v) in inj.node_map() {
            let img = &leg.node_map()[x];
            if node_map.insert(v.clone(), img.clone()).is_some_and(|old| &old != img) {
                return Ok(None);
            }
        }
        for (x, v) in inj.edge_map() {
            let img = &leg.edge_map()[x];
            if edge_map.insert(v.clone(), img.clone()).is_some_and(|old| &old != img) {
                return Ok(None);
            }
        }
    }
    Ok(GraphMorphism::new(pushout.vertex().clone(), target, node_map, edge_map).ok())
}

impl Gluing for GraphMorphism {
    fn pushout(span: &Span<Self>) -> Result<Pushout<Self>> {
        graph_pushout(span)
    }

    fn mediate(pushout: &Pushout<Self>, cocone: &Cospan<Self>) -> Result<Option<Self>> {
        graph_mediate(pushout, cocone)
    }

    fn is_iso(&self) -> bool {
        is_mono(self)
            && self.node_map().len() == self.codomain().node_count()
            && self.edge_map().len() == self.codomain().edge_count()
    }
}

fn fresh(taken: &mut BTreeSet<String>, preferred: String) -> String {
    let mut name = preferred;
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

struct PullbackParts {
    span: Span<GraphMorphism>,
    nodes: BTreeMap<(String, String), String>,
    edges: BTreeMap<(String, String), String>,
}

fn pullback_parts(cospan: &Cospan<GraphMorphism>) -> Result<PullbackParts> {
    let (f, g) = (cospan.left(), cospan.right());
    let (a, b) = (f.domain(), g.domain());
    let mut vertex = Graph::new();
    let mut nodes = BTreeMap::new();
    let mut edges = BTreeMap::new();
    let mut taken = BTreeSet::new();
    for (x, label) in a.nodes() {
        for y in b.nodes().keys() {
            if f.node_map()[x] == g.node_map()[y] {
                let name = fresh(&mut taken, format!("{x}|{y}"));
                vertex.add_node(name.clone(), label.clone())?;
                nodes.insert((x.clone(), y.clone()), name);
            }
        }
    }
    let mut taken = BTreeSet::new();
    for (x, ex) in a.edges() {
        for (y, ey) in b.edges() {
            if f.edge_map()[x] == g.edge_map()[y] {
                let name = fresh(&mut taken, format!("{x}|{y}"));
                let src = &nodes[&(ex.source.clone(), ey.source.clone())];
                let tgt = &nodes[&(ex.target.clone(), ey.target.clone())];
                vertex.add_edge(name.clone(), src.clone(), tgt.clone(), ex.label.clone())?;
                edges.insert((x.clone(), y.clone()), name);
            }
        }
    }
    let project = |first: bool, foot: &Graph| {
        GraphMorphism::new(
            vertex.clone(),
            foot.clone(),
            nodes
                .iter()
                .map(|((x, y), n)| (n.clone(), if first { x.clone() } else { y.clone() }))
                .collect(),
            edges
                .iter()
                .map(|((x, y), e)| (e.clone(), if first { x.clone() } else { y.clone() }))
                .collect(),
        )
    };
    let span = Span::new(project(true, a)?, project(false, b)?)?;
    Ok(PullbackParts { span, nodes, edges })
}

/// Fiber product of a cospan of graphs. Vertex items are named `x|y` after
/// the agreeing pair.
pub fn pullback(cospan: &Cospan<GraphMorphism>) -> Result<Span<GraphMorphism>> {
    Ok(pullback_parts(cospan)?.span)
}

/// Exact pullback test: the comparison map from the square's apex into the
/// computed fiber product is an isomorphism.
pub fn verify_pullback(square: &Square<GraphMorphism>) -> Result<bool> {
    if !square.commutes()? {
        return Err(Error::NonCommuting);
    }
    let parts = pullback_parts(square.cocone())?;
    let (p, q) = (square.span().left(), square.span().right());
    let apex = square.span().apex();
    let node_map = apex
        .nodes()
        .keys()
        .map(|k| {
            let key = (p.node_map()[k].clone(), q.node_map()[k].clone());
            (k.clone(), parts.nodes[&key].clone())
        })
        .collect();
    let edge_map = apex
        .edges()
        .keys()
        .map(|k| {
            let key = (p.edge_map()[k].clone(), q.edge_map()[k].clone());
            (k.clone(), parts.edges[&key].clone())
        })
        .collect();
    let comparison = GraphMorphism::new(apex.clone(), parts.span.apex().clone(), node_map, edge_map)?;
    Ok(comparison.is_iso())
}

/// DPO left square: delete the image of `L \ l(K)` from `G`.
pub fn pushout_complement(
    l: &GraphMorphism,
    m: &GraphMorphism,
) -> Result<ComplementResult<GraphMorphism>> {
    if l.codomain() != m.domain() {
        return Err(Error::EndpointMismatch);
    }
    let (lhs, host) = (m.domain(), m.codomain());
    let kept_nodes = l.node_image();
    let kept_edges = l.edge_image();

    // Identification: two distinct items may share an image only if both are
    // preserved.
    let check = |items: Vec<&String>, map: &BTreeMap<String, String>, kept: &BTreeSet<String>| {
        for (i, x) in items.iter().enumerate() {
            for y in &items[i + 1..] {
                if map[*x] == map[*y] && !(kept.contains(*x) && kept.contains(*y)) {
                    let (deleted, other) = if kept.contains(*x) { (y, x) } else { (x, y) };
                    return Err(Error::IdentificationViolation {
                        deleted: deleted.to_string(),
                        other: other.to_string(),
                    });
                }
            }
        }
        Ok(())
    };
    check(lhs.nodes().keys().collect(), m.node_map(), &kept_nodes)?;
    check(lhs.edges().keys().collect(), m.edge_map(), &kept_edges)?;

    let deleted_nodes: BTreeSet<String> = lhs
        .nodes()
        .keys()
        .filter(|n| !kept_nodes.contains(*n))
        .map(|n| m.node_map()[n].clone())
        .collect();
    let deleted_edges: BTreeSet<String> = lhs
        .edges()
        .keys()
        .filter(|e| !kept_edges.contains(*e))
        .map(|e| m.edge_map()[e].clone())
        .collect();
    for (id, e) in host.edges() {
        if deleted_edges.contains(id) {
            continue;
        }
        for end in [&e.source, &e.target] {
            if deleted_nodes.contains(end) {
                return Err(Error::DanglingViolation {
                    node: end.clone(),
                    edge: id.clone(),
                });
            }
        }
    }

    let context = host.restrict(
        &host.nodes().keys().filter(|n| !deleted_nodes.contains(*n)).cloned().collect(),
        &host.edges().keys().filter(|e| !deleted_edges.contains(*e)).cloned().collect(),
    )?;
    let to_context = l.then(m)?.with_codomain(&context)?;
    let into_host = GraphMorphism::inclusion(&context, host)?;
    let result = ComplementResult {
        to_context,
        into_host,
    };
    if !super::verify_pushout(&result.square(l, m)?)? {
        return Err(Error::GluingConflict(
            "deletion complement does not rebuild the host graph".into(),
        ));
    }
    Ok(result)
}

/// SqPO left square for a mono match: `G` minus the image of `L`, plus one
/// copy of each `K` item, with outside edges copied once per choice of
/// preimages of their endpoints. Edges hanging on deleted nodes disappear.
pub fn final_pullback_complement(
    l: &GraphMorphism,
    m: &GraphMorphism,
) -> Result<ComplementResult<GraphMorphism>> {
    if l.codomain() != m.domain() {
        return Err(Error::EndpointMismatch);
    }
    if !is_mono(m) {
        return Err(Error::UnsupportedMatch(
            "final pullback complements are only built for injective matches".into(),
        ));
    }
    let (interface, host) = (l.domain(), m.codomain());
    let matched_nodes = m.node_image();
    let matched_edges = m.edge_image();
    let lm = l.then(m)?;

    let mut context = Graph::new();
    let mut taken: BTreeSet<String> = host
        .nodes()
        .keys()
        .filter(|n| !matched_nodes.contains(*n))
        .cloned()
        .collect();
    for n in &taken {
        context.add_node(n.clone(), host.nodes()[n].clone())?;
    }
    let mut node_back: BTreeMap<String, String> = taken.iter().map(|n| (n.clone(), n.clone())).collect();
    let mut k_node: BTreeMap<String, String> = BTreeMap::new();
    let mut preimages: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for k in interface.nodes().keys() {
        preimages.entry(lm.node_map()[k].clone()).or_default().push(k.clone());
    }
    for (v, ks) in &preimages {
        for k in ks {
            let preferred = if ks.len() == 1 { v.clone() } else { format!("{v}.{k}") };
            let name = fresh(&mut taken, preferred);
            context.add_node(name.clone(), interface.nodes()[k].clone())?;
            node_back.insert(name.clone(), v.clone());
            k_node.insert(k.clone(), name);
        }
    }
    let choices = |v: &String| -> Vec<String> {
        if matched_nodes.contains(v) {
            preimages.get(v).map_or_else(Vec::new, |ks| ks.iter().map(|k| k_node[k].clone()).collect())
        } else {
            vec![v.clone()]
        }
    };

    let mut taken = BTreeSet::new();
    let mut edge_back: BTreeMap<String, String> = BTreeMap::new();
    let mut k_edge: BTreeMap<String, String> = BTreeMap::new();
    for (id, e) in host.edges() {
        if matched_edges.contains(id) {
            continue;
        }
        let (srcs, tgts) = (choices(&e.source), choices(&e.target));
        let single = srcs.len() == 1 && tgts.len() == 1;
        for s in &srcs {
            for t in &tgts {
                let preferred = if single { id.clone() } else { format!("{id}.{s}.{t}") };
                let name = fresh(&mut taken, preferred);
                context.add_edge(name.clone(), s.clone(), t.clone(), e.label.clone())?;
                edge_back.insert(name, id.clone());
            }
        }
    }
    let mut edge_preimages: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for k in interface.edges().keys() {
        edge_preimages.entry(lm.edge_map()[k].clone()).or_default().push(k.clone());
    }
    for (ge, ks) in &edge_preimages {
        for k in ks {
            let preferred = if ks.len() == 1 { ge.clone() } else { format!("{ge}.{k}") };
            let name = fresh(&mut taken, preferred);
            let ke = &interface.edges()[k];
            context.add_edge(
                name.clone(),
                k_node[&ke.source].clone(),
                k_node[&ke.target].clone(),
                ke.label.clone(),
            )?;
            edge_back.insert(name.clone(), ge.clone());
            k_edge.insert(k.clone(), name);
        }
    }

    let to_context = GraphMorphism::new(interface.clone(), context.clone(), k_node, k_edge)?;
    let into_host = GraphMorphism::new(context, host.clone(), node_back, edge_back)?;
    let result = ComplementResult {
        to_context,
        into_host,
    };
    if !verify_pullback(&result.square(l, m)?)? {
        return Err(Error::GluingConflict(
            "final pullback complement is not a pullback".into(),
        ));
    }
    Ok(result)
}
