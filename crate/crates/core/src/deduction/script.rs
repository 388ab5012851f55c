use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use super::instance::{Direction, Instance, ZigZag};
use super::rule::DeductionRule;
use super::step::{classic_step, minimal_witness, pleopushout_step, Witness};
use crate::category::Arrow;
use crate::eqlogic::{is_pleomorphism, EqSpec, SpecMorphism, Term};
use crate::error::{Error, Result};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepMode {
    Classic,
    /// Pleopushout with the identity witness.
    Pleo,
    /// Pleopushout with the witness from [`minimal_witness`].
    PleoMinimal,
}

impl fmt::Display for StepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepMode::Classic => "classic",
            StepMode::Pleo => "pleo",
            StepMode::PleoMinimal => "pleo-minimal",
        })
    }
}

impl FromStr for StepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(StepMode::Classic),
            "pleo" => Ok(StepMode::Pleo),
            "pleo-minimal" => Ok(StepMode::PleoMinimal),
            other => Err(Error::parse(0, format!("unknown mode `{other}`"))),
        }
    }
}

/// `step <rule> [mode=<mode>] bind <op>=<term> ...`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptStep {
    pub line: usize,
    pub rule: String,
    pub mode: Option<StepMode>,
    /// Operation of the hypothesis and the term (or template over `?1..?n`)
    /// it is sent to.
    pub bindings: Vec<(String, String)>,
}

pub fn parse_script(input: &str) -> Result<Vec<ScriptStep>> {
    let mut steps = Vec::new();
    for line in text::lines(input) {
        let err = |m: String| Error::parse(line.number, m);
        let rest = line
            .text
            .strip_prefix("step ")
            .ok_or_else(|| err("expected `step <rule> ...`".into()))?;
        let mut parts = rest.split(" bind ");
        let head = parts.next().unwrap_or_default();
        let mut words = head.split_whitespace();
        let rule = words.next().ok_or_else(|| err("missing rule name".into()))?.to_string();
        let mut mode = None;
        for w in words {
            match w.strip_prefix("mode=") {
                Some(m) => mode = Some(m.parse().map_err(|_| err(format!("unknown mode `{m}`")))?),
                None if w == "bind" => {}
                None => return Err(err(format!("unexpected `{w}`"))),
            }
        }
        let mut bindings = Vec::new();
        for b in parts {
            let (name, term) = b
                .split_once('=')
                .ok_or_else(|| err(format!("expected `name=term`, got `{}`", b.trim())))?;
            bindings.push((name.trim().to_string(), term.trim().to_string()));
        }
        steps.push(ScriptStep {
            line: line.number,
            rule,
            mode,
            bindings,
        });
    }
    Ok(steps)
}

fn set_sort(map: &mut BTreeMap<String, String>, from: &str, to: &str) -> Result<()> {
    match map.get(from) {
        Some(existing) if existing != to => Err(Error::SortMismatch(format!(
            "sort `{from}` would map to both {existing} and {to}"
        ))),
        _ => {
            map.insert(from.to_string(), to.to_string());
            Ok(())
        }
    }
}

/// Builds the instance of `h` given by `bindings` in an extension of
/// `current` that also contains the images of `h`'s terms and equations.
/// Returns the instance morphism (into the extension).
pub fn bind_instance(h: &EqSpec, current: &EqSpec, bindings: &[(String, String)]) -> Result<SpecMorphism> {
    let mut sorts: BTreeMap<String, String> = BTreeMap::new();
    let mut ops: BTreeMap<String, Term> = BTreeMap::new();
    let bound: BTreeMap<&str, &str> = bindings.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    for name in bound.keys() {
        if !h.ops().contains_key(*name) {
            return Err(Error::UnknownSymbol(format!("`{name}` is not an operation of the hypothesis")));
        }
    }
    for (name, decl) in h.ops() {
        if bound.contains_key(name.as_str()) {
            continue;
        }
        let target = current
            .ops()
            .get(name)
            .ok_or_else(|| Error::UnknownSymbol(format!("`{name}` is neither bound nor an operation of the specification")))?;
        if target.arity() != decl.arity() {
            return Err(Error::SortMismatch(format!("`{name}` has a different arity")));
        }
        for (a, b) in decl.args.iter().zip(&target.args) {
            set_sort(&mut sorts, a, b)?;
        }
        set_sort(&mut sorts, &decl.result, &target.result)?;
        ops.insert(name.clone(), Term::simple_template(name.clone(), decl.arity()));
    }
    // bound operations, as soon as their argument sorts are known
    let mut todo: Vec<(&str, &str)> = bound.iter().map(|(a, b)| (*a, *b)).collect();
    let mut fallback = false;
    while !todo.is_empty() {
        let before = todo.len();
        let mut rest = Vec::new();
        for (name, src) in todo {
            let decl = &h.ops()[name];
            let holes: Option<Vec<String>> = decl.args.iter().map(|a| sorts.get(a).cloned()).collect();
            match holes {
                Some(holes) => {
                    let t = current.parse_template(src, &holes)?;
                    let sort = current.sort_with_holes(&t, &holes)?;
                    set_sort(&mut sorts, &decl.result, &sort)?;
                    ops.insert(name.to_string(), t);
                }
                None => rest.push((name, src)),
            }
        }
        todo = rest;
        if todo.len() == before {
            if fallback {
                return Err(Error::SortMismatch("cannot infer the sorts of the bindings".into()));
            }
            fallback = true;
            for s in h.sorts() {
                if !sorts.contains_key(s) {
                    if current.sorts().contains(s) {
                        sorts.insert(s.clone(), s.clone());
                    } else if current.sorts().len() == 1 {
                        sorts.insert(s.clone(), current.sorts().iter().next().expect("one sort").clone());
                    }
                }
            }
        }
    }
    for s in h.sorts() {
        if !sorts.contains_key(s) {
            if current.sorts().contains(s) {
                sorts.insert(s.clone(), s.clone());
            } else if current.sorts().len() == 1 {
                sorts.insert(s.clone(), current.sorts().iter().next().expect("one sort").clone());
            } else {
                return Err(Error::SortMismatch(format!("cannot infer the image of sort `{s}`")));
            }
        }
    }

    let vars = choose_vars(h, current, &sorts, &ops)?;
    let apply = |t: &Term| -> Term {
        match t {
            Term::Var(v) => Term::var(vars[v].clone()),
            _ => t.clone(),
        }
    };
    let map_term = |t: &Term| -> Term { map_with(t, &ops, &apply) };
    let terms: Vec<Term> = h.term_closure().iter().map(map_term).collect();
    let equations: Vec<_> = h.equations().iter().map(|e| e.map(map_term)).collect();
    let extended = current.with_terms(terms)?.with_equations(equations)?;
    SpecMorphism::new(h.clone(), extended, sorts, ops, vars)
}

fn map_with(t: &Term, ops: &BTreeMap<String, Term>, var: &dyn Fn(&Term) -> Term) -> Term {
    match t {
        Term::Var(_) => var(t),
        Term::App(op, args) => {
            let args: Vec<Term> = args.iter().map(|a| map_with(a, ops, var)).collect();
            ops[op].instantiate(&args)
        }
    }
}

/// Picks images for the hypothesis' variables: the first assignment (in
/// name order) under which every equation lands on an equation of
/// `current`, else the first injective one, else the first one.
fn choose_vars(
    h: &EqSpec,
    current: &EqSpec,
    sorts: &BTreeMap<String, String>,
    ops: &BTreeMap<String, Term>,
) -> Result<BTreeMap<String, String>> {
    let names: Vec<&String> = h.vars().keys().collect();
    let pools: Vec<Vec<&String>> = names
        .iter()
        .map(|v| {
            let sort = &sorts[&h.vars()[*v]];
            current.vars().iter().filter(|(_, s)| *s == sort).map(|(w, _)| w).collect()
        })
        .collect();
    if let Some(i) = pools.iter().position(Vec::is_empty) {
        return Err(Error::SortMismatch(format!(
            "no variable of sort {} for `{}`",
            sorts[&h.vars()[names[i]]],
            names[i]
        )));
    }
    let mut first: Option<Vec<usize>> = None;
    let mut injective: Option<Vec<usize>> = None;
    let mut choice = vec![0usize; names.len()];
    loop {
        let assignment: BTreeMap<String, String> = names
            .iter()
            .zip(&choice)
            .zip(&pools)
            .map(|((v, &c), pool)| ((*v).clone(), pool[c].clone()))
            .collect();
        let apply = |t: &Term| match t {
            Term::Var(v) => Term::var(assignment[v].clone()),
            _ => t.clone(),
        };
        let lands = h.equations().iter().all(|e| {
            let image = e.map(|t| map_with(t, ops, &apply));
            image.is_reflexive() || current.equations().contains(&image)
        });
        if lands {
            return Ok(assignment);
        }
        first.get_or_insert_with(|| choice.clone());
        if injective.is_none() && assignment.values().collect::<BTreeSet<_>>().len() == assignment.len() {
            injective = Some(choice.clone());
        }
        let mut i = choice.len();
        let advanced = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < pools[i].len() {
                break true;
            }
            choice[i] = 0;
        };
        if !advanced {
            break;
        }
    }
    let pick = injective.or(first).unwrap_or_default();
    Ok(names
        .iter()
        .zip(&pick)
        .zip(&pools)
        .map(|((v, &c), pool)| ((*v).clone(), pool[c].clone()))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub depth: usize,
    /// Overrides every step's mode.
    pub mode: Option<StepMode>,
    pub assume_pleo: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            depth: 3,
            mode: None,
            assume_pleo: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub line: usize,
    pub rule: String,
    pub mode: StepMode,
    pub record: Value,
    pub result: EqSpec,
}

#[derive(Debug)]
pub struct DerivationRun {
    pub initial: EqSpec,
    pub steps: Vec<StepRecord>,
    pub instance: Option<Instance>,
    /// Script line and error of the step that aborted the run.
    pub error: Option<(usize, Error)>,
}

impl DerivationRun {
    pub fn final_spec(&self) -> &EqSpec {
        self.steps.last().map_or(&self.initial, |s| &s.result)
    }

    pub fn is_complete(&self) -> bool {
        self.error.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "initial": self.initial.to_text(),
            "steps": self.steps.iter().map(|s| s.record.clone()).collect::<Vec<_>>(),
            "final": self.final_spec().to_text(),
            "error": self.error.as_ref().map(|(line, e)| json!({"line": line, "message": e.to_string()})),
        })
    }
}

struct State {
    current: EqSpec,
    evidence: ZigZag,
    anchor: Option<SpecMorphism>,
}

fn run_step(state: &State, rule: &DeductionRule, step: &ScriptStep, mode: StepMode, opts: &RunOptions) -> Result<(State, Value, Instance)> {
    let sigma_h = bind_instance(rule.hypothesis(), &state.current, &step.bindings)?;
    let target = sigma_h.codomain().clone();
    let mut evidence = state.evidence.clone();
    let mut anchor = state.anchor.clone();
    let mut extension = Value::Null;
    if target != state.current {
        let e = SpecMorphism::inclusion(&state.current, &target)?;
        let verdict = is_pleomorphism(&e, opts.depth, None)?;
        extension = json!({"added": target.to_text(), "verdict": verdict});
        evidence.push("extension", e.clone(), Direction::Forward, verdict, false)?;
        anchor = match anchor {
            Some(a) => Some(a.then(&e)?),
            None => None,
        };
    }
    let inst = Instance::new(sigma_h, evidence, anchor)?;
    let (next, mut record) = match mode {
        StepMode::Classic => {
            let (next, trace) = classic_step(rule, &inst, opts.depth, opts.assume_pleo)?;
            (next, trace.to_json())
        }
        StepMode::Pleo | StepMode::PleoMinimal => {
            let witness = if mode == StepMode::Pleo {
                Witness::identity(rule, &inst)?
            } else {
                minimal_witness(rule, &inst, opts.depth)?
                    .ok_or_else(|| Error::WitnessNotPleo("no witness found".into()))?
            };
            let (next, cube) = pleopushout_step(rule, &inst, &witness, opts.depth)?;
            let mut v = cube.to_json();
            v["mode"] = json!(mode.to_string());
            (next, v)
        }
    };
    let conclusion: Vec<String> = rule
        .conclusion()
        .sorted_equations()
        .into_iter()
        .map(|e| next.target().render_equation(&next.morphism().map_equation(e)))
        .collect();
    record["line"] = json!(step.line);
    record["extension"] = extension;
    record["conclusion"] = json!(conclusion);
    record["result"] = json!(next.target().to_text());
    Ok((
        State {
            current: next.target().clone(),
            evidence: next.evidence().clone(),
            anchor: next.anchor().cloned(),
        },
        record,
        next,
    ))
}

/// Runs a script from `initial`. Steps are sequential; the first failing
/// step stops the run and is reported with the trace so far.
pub fn run_derivation(initial: &EqSpec, rules: &[DeductionRule], script: &[ScriptStep], opts: &RunOptions) -> DerivationRun {
    let mut run = DerivationRun {
        initial: initial.clone(),
        steps: Vec::new(),
        instance: None,
        error: None,
    };
    let mut state = State {
        current: initial.clone(),
        evidence: ZigZag::trivial(initial.clone()),
        anchor: Some(SpecMorphism::identity(initial)),
    };
    for step in script {
        let mode = opts.mode.or(step.mode).unwrap_or(StepMode::Classic);
        let Some(rule) = rules.iter().find(|r| r.name() == step.rule) else {
            run.error = Some((step.line, Error::UnknownSymbol(format!("no rule named `{}`", step.rule))));
            return run;
        };
        match run_step(&state, rule, step, mode, opts) {
            Ok((next, record, inst)) => {
                state = next;
                run.instance = Some(inst);
                run.steps.push(StepRecord {
                    line: step.line,
                    rule: step.rule.clone(),
                    mode,
                    record,
                    result: state.current.clone(),
                });
            }
            Err(e) => {
                run.error = Some((step.line, e));
                return run;
            }
        }
    }
    run
}
