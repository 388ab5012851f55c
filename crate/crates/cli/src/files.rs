use std::fs;
use std::path::Path;

use pleo::deduction::{parse_rules as parse_deduction_rules, parse_script, DeductionRule, ScriptStep};
use pleo::eqlogic::{EqSpec, Model, SpecMorphism};
use pleo::graph::text::{parse_graph_lines, parse_morphism_lines};
use pleo::graph::{Graph, GraphMorphism};
use pleo::rewriting::{parse_rules as parse_rewrite_rules, RewriteRule};
use pleo::text::{self, split_blocks, Line};
use pleo::{Error, Square};

/// A user-facing failure: bad input, I/O, or an engine error on valid input.
#[derive(Debug)]
pub struct CliError(pub String);

pub type CliResult<T> = Result<T, CliError>;

/// Prefixes parse errors with `path:line`.
pub fn located(path: &Path, e: Error) -> CliError {
    match e {
        Error::Parse { line, message } => CliError(format!("{}:{line}: {message}", path.display())),
        other => CliError(format!("{}: {other}", path.display())),
    }
}

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn spec(path: &Path) -> CliResult<EqSpec> {
    EqSpec::parse(&read(path)?).map_err(|e| located(path, e))
}

pub fn model(path: &Path) -> CliResult<Model> {
    Model::parse(&read(path)?).map_err(|e| located(path, e))
}

pub fn graph(path: &Path) -> CliResult<Graph> {
    pleo::graph::text::parse_graph(&read(path)?).map_err(|e| located(path, e))
}

pub fn rewrite_rules(path: &Path) -> CliResult<Vec<RewriteRule>> {
    parse_rewrite_rules(&read(path)?).map_err(|e| located(path, e))
}

pub fn deduction_rules(path: &Path, depth: usize, assume_pleo: bool) -> CliResult<Vec<DeductionRule>> {
    parse_deduction_rules(&read(path)?, depth, assume_pleo).map_err(|e| located(path, e))
}

pub fn script(path: &Path) -> CliResult<Vec<ScriptStep>> {
    parse_script(&read(path)?).map_err(|e| located(path, e))
}

fn block<'a, 'b>(
    path: &Path,
    blocks: &'b [text::Block<'a>],
    name: &str,
) -> CliResult<&'b text::Block<'a>> {
    blocks
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| CliError(format!("{}: missing `{name}:` block", path.display())))
}

/// `DOMAIN:` and `CODOMAIN:` specification blocks and an optional `MAP:`
/// block (names map to themselves when unlisted).
pub fn spec_morphism(path: &Path) -> CliResult<SpecMorphism> {
    let input = read(path)?;
    let lines = text::lines(&input);
    let (_, blocks) = split_blocks(&lines, &["DOMAIN", "CODOMAIN", "MAP"]);
    let dom = EqSpec::parse_lines(&block(path, &blocks, "DOMAIN")?.lines).map_err(|e| located(path, e))?;
    let cod = EqSpec::parse_lines(&block(path, &blocks, "CODOMAIN")?.lines).map_err(|e| located(path, e))?;
    let map: &[Line<'_>] = match blocks.iter().find(|b| b.name == "MAP") {
        Some(b) => &b.lines,
        None => &[],
    };
    SpecMorphism::parse_lines(&dom, &cod, map).map_err(|e| located(path, e))
}

pub enum AnySquare {
    Graph(Square<GraphMorphism>),
    Spec(Square<SpecMorphism>),
}

const SQUARE_BLOCKS: [&str; 8] = ["K", "A", "B", "Q", "top", "side", "close_top", "close_side"];

/// ```text
/// SQUARE graph|spec
/// K: A: B: Q:                     objects
/// top: K -> A   side: K -> B      span
/// close_top: A -> Q   close_side: B -> Q
/// ```
pub fn square(path: &Path) -> CliResult<AnySquare> {
    let input = read(path)?;
    let lines = text::lines(&input);
    let kind = match lines.first().map(|l| l.text) {
        Some("SQUARE graph") => "graph",
        Some("SQUARE spec") => "spec",
        _ => return Err(CliError(format!("{}:1: expected `SQUARE graph` or `SQUARE spec`", path.display()))),
    };
    let (_, blocks) = split_blocks(&lines[1..], &SQUARE_BLOCKS);
    let legs = [("top", "K", "A"), ("side", "K", "B"), ("close_top", "A", "Q"), ("close_side", "B", "Q")];
    if kind == "graph" {
        let mut objects = std::collections::BTreeMap::new();
        for o in ["K", "A", "B", "Q"] {
            objects.insert(o, parse_graph_lines(&block(path, &blocks, o)?.lines).map_err(|e| located(path, e))?);
        }
        let mut ms = Vec::new();
        for (name, from, to) in legs {
            let b = block(path, &blocks, name)?;
            let m = if b.inline == "inclusion" {
                GraphMorphism::inclusion(&objects[from], &objects[to])
            } else {
                parse_morphism_lines(&b.lines, &objects[from], &objects[to])
            };
            ms.push(m.map_err(|e| located(path, e))?);
        }
        let [a, b, c, d]: [GraphMorphism; 4] = ms.try_into().expect("four legs");
        Square::from_sides(a, b, c, d).map(AnySquare::Graph).map_err(|e| located(path, e))
    } else {
        let mut objects = std::collections::BTreeMap::new();
        for o in ["K", "A", "B", "Q"] {
            objects.insert(o, EqSpec::parse_lines(&block(path, &blocks, o)?.lines).map_err(|e| located(path, e))?);
        }
        let mut ms = Vec::new();
        for (name, from, to) in legs {
            let b = block(path, &blocks, name)?;
            ms.push(SpecMorphism::parse_lines(&objects[from], &objects[to], &b.lines).map_err(|e| located(path, e))?);
        }
        let [a, b, c, d]: [SpecMorphism; 4] = ms.try_into().expect("four legs");
        Square::from_sides(a, b, c, d).map(AnySquare::Spec).map_err(|e| located(path, e))
    }
}
