//! Rewrite rules as spans of graphs and the DPO / SqPO rewrite steps.
//!
//! A step builds a generalized pushout under the rule span `L <- K -> R`:
//!
//! ```text
//!   L <--l-- K --r--> R
//!   |m_L     |m_K     |m_R
//!   v        v        v
//!   G <-l_1- D --r_1> H
//! ```
//!
//! The right square is always a pushout. The left square is a pushout
//! complement in DPO mode and a final pullback complement in SqPO mode.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::category::{Arrow, Span, Square};
use crate::colimit::{
    final_pullback_complement, pushout, pushout_complement, verify_pullback, verify_pushout,
};
use crate::error::{Error, Result};
use crate::graph::text::{
    graph_to_text, morphism_to_text, parse_graph_lines, parse_morphism_lines, write_dot_cluster,
    write_dot_morphism,
};
use crate::graph::{find_matches, Graph, GraphMorphism, Match, MatchKind};
use crate::text::{self, split_blocks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewriteMode {
    Dpo,
    Sqpo,
}

impl RewriteMode {
    /// Matches enumerated for this mode: any homomorphism for DPO, monos for
    /// SqPO.
    pub fn match_kind(self) -> MatchKind {
        match self {
            RewriteMode::Dpo => MatchKind::Homomorphism,
            RewriteMode::Sqpo => MatchKind::Mono,
        }
    }
}

impl fmt::Display for RewriteMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RewriteMode::Dpo => "dpo",
            RewriteMode::Sqpo => "sqpo",
        })
    }
}

impl FromStr for RewriteMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dpo" => Ok(RewriteMode::Dpo),
            "sqpo" => Ok(RewriteMode::Sqpo),
            other => Err(Error::parse(0, format!("unknown rewrite mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewriteRule {
    name: String,
    span: Span<GraphMorphism>,
}

impl RewriteRule {
    pub fn new(name: impl Into<String>, l: GraphMorphism, r: GraphMorphism) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            span: Span::new(l, r)?,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn l(&self) -> &GraphMorphism {
        self.span.left()
    }

    pub fn r(&self) -> &GraphMorphism {
        self.span.right()
    }

    pub fn lhs(&self) -> &Graph {
        self.l().codomain()
    }

    pub fn interface(&self) -> &Graph {
        self.l().domain()
    }

    pub fn rhs(&self) -> &Graph {
        self.r().codomain()
    }

    pub fn identity(name: impl Into<String>, lhs: &Graph) -> Self {
        let id = GraphMorphism::identity(lhs);
        Self {
            name: name.into(),
            span: Span::new(id.clone(), id).expect("identity span"),
        }
    }
}

/// The full diagram of one rewrite step.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedPushout {
    pub mode: RewriteMode,
    pub rule: RewriteRule,
    pub m_l: GraphMorphism,
    pub m_k: GraphMorphism,
    pub m_r: GraphMorphism,
    pub l1: GraphMorphism,
    pub r1: GraphMorphism,
}

impl GeneralizedPushout {
    pub fn host(&self) -> &Graph {
        self.m_l.codomain()
    }

    pub fn context(&self) -> &Graph {
        self.m_k.codomain()
    }

    pub fn result(&self) -> &Graph {
        self.r1.codomain()
    }

    pub fn left_square(&self) -> Result<Square<GraphMorphism>> {
        Square::from_sides(
            self.rule.l().clone(),
            self.m_k.clone(),
            self.m_l.clone(),
            self.l1.clone(),
        )
    }

    pub fn right_square(&self) -> Result<Square<GraphMorphism>> {
        Square::from_sides(
            self.m_k.clone(),
            self.rule.r().clone(),
            self.r1.clone(),
            self.m_r.clone(),
        )
    }

    /// Re-checks the mode invariants: both squares commute, the right one is
    /// a pushout, and the left one is a pushout (DPO) or a pullback (SqPO).
    pub fn check(&self) -> Result<bool> {
        let left = self.left_square()?;
        let right = self.right_square()?;
        if !left.commutes()? || !right.commutes()? {
            return Ok(false);
        }
        let left_ok = match self.mode {
            RewriteMode::Dpo => verify_pushout(&left)?,
            RewriteMode::Sqpo => verify_pullback(&left)?,
        };
        Ok(left_ok && verify_pushout(&right)?)
    }
}

fn assemble(
    mode: RewriteMode,
    rule: &RewriteRule,
    m: &Match,
    m_k: GraphMorphism,
    l1: GraphMorphism,
) -> Result<GeneralizedPushout> {
    // Context first, so host identifiers survive into the result.
    let right = pushout(&Span::new(m_k.clone(), rule.r().clone())?)?;
    let (r1, m_r) = right.cocone.into_parts();
    Ok(GeneralizedPushout {
        mode,
        rule: rule.clone(),
        m_l: m.clone(),
        m_k,
        m_r,
        l1,
        r1,
    })
}

pub fn dpo_step(rule: &RewriteRule, m: &Match) -> Result<GeneralizedPushout> {
    let complement = pushout_complement(rule.l(), m)?;
    assemble(RewriteMode::Dpo, rule, m, complement.to_context, complement.into_host)
}

pub fn sqpo_step(rule: &RewriteRule, m: &Match) -> Result<GeneralizedPushout> {
    let complement = final_pullback_complement(rule.l(), m)?;
    assemble(RewriteMode::Sqpo, rule, m, complement.to_context, complement.into_host)
}

pub fn step(rule: &RewriteRule, m: &Match, mode: RewriteMode) -> Result<GeneralizedPushout> {
    match mode {
        RewriteMode::Dpo => dpo_step(rule, m),
        RewriteMode::Sqpo => sqpo_step(rule, m),
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub matched: Match,
    pub result: Result<GeneralizedPushout>,
}

/// Applies `rule` at every match in canonical order. Failures are recorded
/// per match and never abort the run.
pub fn apply_all(rule: &RewriteRule, host: &Graph, mode: RewriteMode) -> Vec<StepOutcome> {
    find_matches(rule.lhs(), host, mode.match_kind())
        .into_iter()
        .map(|m| StepOutcome {
            result: step(rule, &m, mode),
            matched: m,
        })
        .collect()
}

const RULE_BLOCKS: [&str; 5] = ["L", "K", "R", "l", "r"];

/// Parses one or more rules:
///
/// ```text
/// RULE name
/// L:  <graph>
/// K:  <graph>
/// R:  <graph>
/// l:  <morphism K -> L>
/// r:  <morphism K -> R>
/// ```
pub fn parse_rules(input: &str) -> Result<Vec<RewriteRule>> {
    let all = text::lines(input);
    let starts: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|(_, l)| l.text.starts_with("RULE "))
        .map(|(i, _)| i)
        .collect();
    if starts.first() != Some(&0) {
        return Err(Error::parse(
            all.first().map_or(1, |l| l.number),
            "expected `RULE <name>`",
        ));
    }
    let mut rules = Vec::new();
    for (n, start) in starts.iter().enumerate() {
        let end = starts.get(n + 1).copied().unwrap_or(all.len());
        let header = all[*start];
        let name = header.text["RULE ".len()..].trim().to_string();
        let (_, blocks) = split_blocks(&all[start + 1..end], &RULE_BLOCKS);
        let find = |key: &str| {
            blocks
                .iter()
                .find(|b| b.name == key)
                .ok_or_else(|| Error::parse(header.number, format!("rule `{name}` lacks block `{key}:`")))
        };
        let lhs = parse_graph_lines(&find("L")?.lines)?;
        let k = parse_graph_lines(&find("K")?.lines)?;
        let rhs = parse_graph_lines(&find("R")?.lines)?;
        let morphism = |key: &str, cod: &Graph| -> Result<GraphMorphism> {
            let block = find(key)?;
            if block.inline == "inclusion" {
                return GraphMorphism::inclusion(&k, cod)
                    .map_err(|e| Error::parse(block.header_line, e.to_string()));
            }
            parse_morphism_lines(&block.lines, &k, cod)
        };
        let l = morphism("l", &lhs)?;
        let r = morphism("r", &rhs)?;
        rules.push(RewriteRule::new(name, l, r)?);
    }
    Ok(rules)
}

pub fn rule_to_text(rule: &RewriteRule) -> String {
    format!(
        "RULE {}\nL:\n{}K:\n{}R:\n{}l:\n{}r:\n{}",
        rule.name,
        graph_to_text(rule.lhs()),
        graph_to_text(rule.interface()),
        graph_to_text(rule.rhs()),
        morphism_to_text(rule.l()),
        morphism_to_text(rule.r()),
    )
}

fn match_json(m: &Match) -> Value {
    json!({ "nodes": m.node_map(), "edges": m.edge_map() })
}

/// One JSON trace record per attempted step.
pub fn outcome_json(rule: &RewriteRule, mode: RewriteMode, outcome: &StepOutcome) -> Value {
    match &outcome.result {
        Ok(gp) => json!({
            "rule": rule.name(),
            "mode": mode.to_string(),
            "match": match_json(&outcome.matched),
            "context": graph_to_text(gp.context()),
            "result": graph_to_text(gp.result()),
            "error": Value::Null,
        }),
        Err(e) => json!({
            "rule": rule.name(),
            "mode": mode.to_string(),
            "match": match_json(&outcome.matched),
            "context": Value::Null,
            "result": Value::Null,
            "error": e.to_string(),
        }),
    }
}

/// DOT rendering of all six graphs of a step with the node maps between
/// them.
pub fn generalized_pushout_to_dot(gp: &GeneralizedPushout) -> String {
    let mut out = format!("digraph \"{}\" {{\n  compound=true;\n", gp.rule.name());
    for (key, title, g) in [
        ("L", "L", gp.rule.lhs()),
        ("K", "K", gp.rule.interface()),
        ("R", "R", gp.rule.rhs()),
        ("G", "G", gp.host()),
        ("D", "D", gp.context()),
        ("H", "H", gp.result()),
    ] {
        write_dot_cluster(&mut out, key, title, g);
    }
    for (name, from, to, m) in [
        ("l", "K", "L", gp.rule.l()),
        ("r", "K", "R", gp.rule.r()),
        ("m_L", "L", "G", &gp.m_l),
        ("m_K", "K", "D", &gp.m_k),
        ("m_R", "R", "H", &gp.m_r),
        ("l_1", "D", "G", &gp.l1),
        ("r_1", "D", "H", &gp.r1),
    ] {
        write_dot_morphism(&mut out, name, from, to, m);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::isomorphic;
    use crate::graph::text::parse_graph;

    const DEL_EDGE: &str = "RULE del_edge
L:
NODES
a
b
EDGES
e : a -> b
K:
NODES
a
b
R:
NODES
a
b
l: inclusion
r: inclusion
";

    const DEL_NODE: &str = "RULE del_node
L:
NODES
n
K:
R:
l: inclusion
r: inclusion
";

    fn cycle3() -> Graph {
        parse_graph("NODES\na\nb\nc\nEDGES\nab : a -> b\nbc : b -> c\nca : c -> a\n").unwrap()
    }

    #[test]
    fn parses_rule_files() {
        let rules = parse_rules(&format!("{DEL_EDGE}\n{DEL_NODE}")).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].name(), "del_edge");
        assert_eq!(rules[1].interface(), &Graph::new());
        let again = parse_rules(&rule_to_text(&rules[0])).unwrap();
        assert_eq!(again[0], rules[0]);
    }

    #[test]
    fn rule_parse_errors_carry_lines() {
        let err = parse_rules("RULE x\nL:\nNODES\na\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        assert!(parse_rules("NODES\n").is_err());
    }

    #[test]
    fn identity_rule_leaves_graph_alone() {
        let lhs = parse_graph("NODES\nx\n").unwrap();
        let rule = RewriteRule::identity("id", &lhs);
        let host = cycle3();
        for mode in [RewriteMode::Dpo, RewriteMode::Sqpo] {
            let outcomes = apply_all(&rule, &host, mode);
            assert_eq!(outcomes.len(), 3);
            for o in outcomes {
                let gp = o.result.unwrap();
                assert_eq!(gp.result(), &host);
                assert!(gp.check().unwrap());
            }
        }
    }

    #[test]
    fn edge_deletion_on_three_cycle() {
        let rule = &parse_rules(DEL_EDGE).unwrap()[0];
        let path = parse_graph("NODES\na\nb\nc\nEDGES\n1 : a -> b\n2 : b -> c\n").unwrap();
        let dpo = apply_all(rule, &cycle3(), RewriteMode::Dpo);
        assert_eq!(dpo.len(), 3);
        let sqpo = apply_all(rule, &cycle3(), RewriteMode::Sqpo);
        for (d, s) in dpo.iter().zip(&sqpo) {
            let d = d.result.as_ref().unwrap();
            let s = s.result.as_ref().unwrap();
            assert!(isomorphic(d.result(), &path));
            assert!(isomorphic(d.result(), s.result()));
            assert!(d.check().unwrap() && s.check().unwrap());
        }
    }

    #[test]
    fn node_deletion_contrast() {
        let rule = &parse_rules(DEL_NODE).unwrap()[0];
        let dpo = apply_all(rule, &cycle3(), RewriteMode::Dpo);
        assert_eq!(dpo.len(), 3);
        assert!(dpo
            .iter()
            .all(|o| matches!(o.result, Err(Error::DanglingViolation { .. }))));

        let host = parse_graph("NODES\nv\nw\nEDGES\ne : v -> w\n").unwrap();
        let m = GraphMorphism::from_pairs(rule.lhs(), &host, [("n", "v")], []).unwrap();
        assert!(matches!(dpo_step(rule, &m), Err(Error::DanglingViolation { .. })));
        let gp = sqpo_step(rule, &m).unwrap();
        assert_eq!(gp.result(), &parse_graph("NODES\nw\n").unwrap());
        assert!(gp.check().unwrap());
    }

    #[test]
    fn sqpo_rejects_non_injective_matches() {
        let lhs = parse_graph("NODES\np\nq\n").unwrap();
        let rule = RewriteRule::identity("two", &lhs);
        let host = parse_graph("NODES\nv\n").unwrap();
        let m = GraphMorphism::from_pairs(&lhs, &host, [("p", "v"), ("q", "v")], []).unwrap();
        assert!(matches!(sqpo_step(&rule, &m), Err(Error::UnsupportedMatch(_))));
        assert!(dpo_step(&rule, &m).is_ok());
    }

    #[test]
    fn runs_are_bit_identical() {
        let rule = &parse_rules(DEL_EDGE).unwrap()[0];
        let render = || -> Vec<String> {
            apply_all(rule, &cycle3(), RewriteMode::Dpo)
                .iter()
                .map(|o| outcome_json(rule, RewriteMode::Dpo, o).to_string())
                .collect()
        };
        assert_eq!(render(), render());
    }

    #[test]
    fn dot_export_has_six_clusters() {
        let rule = &parse_rules(DEL_EDGE).unwrap()[0];
        let gp = apply_all(rule, &cycle3(), RewriteMode::Dpo).remove(0).result.unwrap();
        let dot = generalized_pushout_to_dot(&gp);
        assert_eq!(dot.matches("subgraph").count(), 6);
    }
}
