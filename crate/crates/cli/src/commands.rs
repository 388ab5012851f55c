use std::fmt::Write as _;
use std::path::Path;

use pleo::colimit::verify_pushout;
use pleo::deduction::{run_derivation, verify_cube, CubeDiagram, DerivationRun, RunOptions, StepMode};
use pleo::eqlogic::{derivable, is_pleomorphism, refute, Derivation, PleoVerdict, RefuteOutcome};
use pleo::graph::text::{graph_to_dot, graph_to_text};
use pleo::rewriting::{apply_all, generalized_pushout_to_dot, outcome_json, RewriteMode, RewriteRule};
use pleo::Error;
use serde_json::{json, Value};

use crate::files::{self, located, AnySquare, CliError, CliResult};
use crate::{Check, Cli, Command, Emit, ExportWhat, RewriteModeArg, StepModeArg};

/// How a command that ran to completion came out.
pub enum Outcome {
    /// Everything requested succeeded or held.
    Success,
    /// The inputs were fine but the answer is negative.
    Negative,
}

impl Outcome {
    pub fn code(&self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative => 2,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::Negative
        }
    }
}

fn rewrite_mode(m: RewriteModeArg) -> RewriteMode {
    match m {
        RewriteModeArg::Dpo => RewriteMode::Dpo,
        RewriteModeArg::Sqpo => RewriteMode::Sqpo,
    }
}

fn step_mode(m: StepModeArg) -> StepMode {
    match m {
        StepModeArg::Classic => StepMode::Classic,
        StepModeArg::Pleo => StepMode::Pleo,
        StepModeArg::PleoMinimal => StepMode::PleoMinimal,
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => files::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Rewrite {
            mode,
            rules,
            graph,
            rule,
            trace,
        } => rewrite(cli, rewrite_mode(*mode), rules, graph, rule.as_deref(), trace.as_deref()),
        Command::Deduce {
            spec,
            rules,
            script,
            mode,
            assume_pleo,
            trace,
        } => deduce(cli, spec, rules, script, mode.map(step_mode), *assume_pleo, trace.as_deref()),
        Command::Verify { check } => verify(cli, check),
        Command::Export { what } => export(cli, what),
    }
}

fn pick_rule(path: &Path, name: Option<&str>) -> CliResult<RewriteRule> {
    let rules = files::rewrite_rules(path)?;
    match name {
        Some(n) => rules
            .into_iter()
            .find(|r| r.name() == n)
            .ok_or_else(|| CliError(format!("{}: no rule named `{n}`", path.display()))),
        None => rules
            .into_iter()
            .next()
            .ok_or_else(|| CliError(format!("{}: no rules", path.display()))),
    }
}

fn rewrite(cli: &Cli, mode: RewriteMode, rules: &Path, graph: &Path, name: Option<&str>, trace: Option<&Path>) -> CliResult<Outcome> {
    let rule = pick_rule(rules, name)?;
    let host = files::graph(graph)?;
    let outcomes = apply_all(&rule, &host, mode);
    let records: Vec<Value> = outcomes.iter().map(|o| outcome_json(&rule, mode, o)).collect();
    let succeeded = outcomes.iter().filter(|o| o.result.is_ok()).count();
    let report = json!({
        "rule": rule.name(),
        "mode": mode.to_string(),
        "matches": outcomes.len(),
        "succeeded": succeeded,
        "steps": records,
    });
    if let Some(path) = trace {
        files::write(path, &json_text(&report))?;
    }
    let text = match cli.emit {
        Emit::Json => json_text(&report),
        Emit::Dot => outcomes
            .iter()
            .filter_map(|o| o.result.as_ref().ok())
            .map(generalized_pushout_to_dot)
            .collect(),
        Emit::Text => {
            let mut out = format!("rule {} ({mode}): {succeeded} of {} matches rewritten\n", rule.name(), outcomes.len());
            for (i, o) in outcomes.iter().enumerate() {
                let nodes: Vec<String> = o.matched.node_map().iter().map(|(a, b)| format!("{a}->{b}")).collect();
                match &o.result {
                    Ok(gp) => {
                        let _ = writeln!(out, "match {} [{}]: ok", i + 1, nodes.join(" "));
                        for line in graph_to_text(gp.result()).lines() {
                            let _ = writeln!(out, "  {line}");
                        }
                    }
                    Err(e) => {
                        let _ = writeln!(out, "match {} [{}]: {e}", i + 1, nodes.join(" "));
                    }
                }
            }
            out
        }
    };
    emit(cli, &text)?;
    // no matches at all is not a failure of any match
    Ok(Outcome::from_bool(succeeded > 0 || outcomes.is_empty()))
}

fn derivation(cli: &Cli, spec: &Path, rules: &Path, script: &Path, mode: Option<StepMode>, assume_pleo: bool) -> CliResult<DerivationRun> {
    let initial = files::spec(spec)?;
    let rules = files::deduction_rules(rules, cli.depth, assume_pleo)?;
    let steps = files::script(script)?;
    let opts = RunOptions {
        depth: cli.depth,
        mode,
        assume_pleo,
    };
    Ok(run_derivation(&initial, &rules, &steps, &opts))
}

fn cube_dots(run: &DerivationRun) -> CliResult<String> {
    let mut out = String::new();
    for (i, step) in run.steps.iter().enumerate() {
        if step.mode == StepMode::Classic {
            continue;
        }
        let cube = CubeDiagram::from_json(&step.record).map_err(|e| CliError(format!("cube of step {}: {e}", i + 1)))?;
        out.push_str(&cube.to_dot(&format!("step {} ({})", i + 1, step.rule)));
    }
    Ok(out)
}

fn deduce(cli: &Cli, spec: &Path, rules: &Path, script: &Path, mode: Option<StepMode>, assume_pleo: bool, trace: Option<&Path>) -> CliResult<Outcome> {
    let run = derivation(cli, spec, rules, script, mode, assume_pleo)?;
    let trace_json = run.to_json();
    if let Some(path) = trace {
        files::write(path, &json_text(&trace_json))?;
    }
    let text = match cli.emit {
        Emit::Text => run.final_spec().to_text(),
        Emit::Json => json_text(&trace_json),
        Emit::Dot => cube_dots(&run)?,
    };
    emit(cli, &text)?;
    if let Some((line, e)) = &run.error {
        eprintln!("{}:{line}: step failed: {e}", script.display());
    }
    Ok(Outcome::from_bool(run.is_complete()))
}

fn verdict_text(v: &PleoVerdict) -> String {
    match v {
        PleoVerdict::Verified { traces } => format!("verified ({} derivations)\n", traces.len()),
        PleoVerdict::Refuted { refutation } => format!("refuted: {}\n", serde_json::to_string(refutation).expect("serializes")),
        PleoVerdict::Unknown { reason, pending } => format!("unknown: {reason} ({} pending)\n", pending.len()),
    }
}

fn verify(cli: &Cli, check: &Check) -> CliResult<Outcome> {
    match check {
        Check::Pleo { morphism, model } => {
            let tau = files::spec_morphism(morphism)?;
            let model = model.as_deref().map(files::model).transpose()?;
            let v = is_pleomorphism(&tau, cli.depth, model.as_ref()).map_err(|e| located(morphism, e))?;
            let text = match cli.emit {
                Emit::Json => json_text(&json!(v)),
                _ => verdict_text(&v),
            };
            emit(cli, &text)?;
            Ok(Outcome::from_bool(v.is_verified()))
        }
        Check::Pushout { square } => {
            let result = match files::square(square)? {
                AnySquare::Graph(sq) => verify_pushout(&sq),
                AnySquare::Spec(sq) => verify_pushout(&sq),
            };
            let (holds, note) = match result {
                Ok(b) => (b, None),
                Err(Error::NonCommuting) => (false, Some("square does not commute")),
                Err(e) => return Err(located(square, e)),
            };
            let text = match cli.emit {
                Emit::Json => json_text(&json!({"pushout": holds, "note": note})),
                _ => format!("{holds}{}\n", note.map(|n| format!(" ({n})")).unwrap_or_default()),
            };
            emit(cli, &text)?;
            Ok(Outcome::from_bool(holds))
        }
        Check::Cube { cube } => {
            let value: Value = serde_json::from_str(&files::read(cube)?).map_err(|e| CliError(format!("{}: {e}", cube.display())))?;
            let diagram = CubeDiagram::from_json(&value).map_err(|e| located(cube, e))?;
            let (faces, verdicts) = verify_cube(&diagram, cli.depth).map_err(|e| located(cube, e))?;
            let ok = faces.iter().all(|f| f.holds) && verdicts.values().all(PleoVerdict::is_verified);
            let text = match cli.emit {
                Emit::Json => json_text(&json!({"faces": faces, "verdicts": verdicts, "ok": ok})),
                Emit::Dot => diagram.to_dot("cube"),
                Emit::Text => {
                    let mut out = String::new();
                    for f in &faces {
                        let req = serde_json::to_value(f.requirement).expect("serializes");
                        let _ = writeln!(out, "face {:<11} {:<8} {}", f.name, req.as_str().unwrap_or_default(), if f.holds { "ok" } else { "FAILS" });
                    }
                    for (name, v) in &verdicts {
                        let _ = write!(out, "pleo {name:<4} {}", verdict_text(v));
                    }
                    out
                }
            };
            emit(cli, &text)?;
            Ok(Outcome::from_bool(ok))
        }
        Check::Derive { spec, goal, model } => {
            let s = files::spec(spec)?;
            let goal = s.parse_equation(goal).map_err(|e| CliError(format!("goal: {e}")))?;
            let d = derivable(&s, &goal, cli.depth).map_err(|e| located(spec, e))?;
            let refuted = match model.as_deref().map(files::model).transpose()? {
                Some(m) => match refute(&s, &goal, &m).map_err(|e| CliError(e.to_string()))? {
                    RefuteOutcome::Refuted(c) => Some(c),
                    RefuteOutcome::Inconclusive => None,
                },
                None => None,
            };
            let text = match cli.emit {
                Emit::Json => json_text(&json!({"derivation": d, "counterexample": refuted})),
                _ => match (&d, &refuted) {
                    (Derivation::Verified(t), _) => format!("verified at depth {} ({} instances)\n", t.depth, t.instances.len()),
                    (_, Some(c)) => format!("refuted: {}\n", serde_json::to_string(c).expect("serializes")),
                    (Derivation::Unknown { reason, .. }, None) => format!("unknown: {reason}\n"),
                },
            };
            emit(cli, &text)?;
            Ok(Outcome::from_bool(d.is_verified()))
        }
    }
}

fn export(cli: &Cli, what: &ExportWhat) -> CliResult<Outcome> {
    match what {
        ExportWhat::Graph { graph } => {
            let g = files::graph(graph)?;
            let name = graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            emit(cli, &graph_to_dot(&name, &g))?;
            Ok(Outcome::Success)
        }
        ExportWhat::Rewrite { mode, rules, graph, rule } => {
            let rule = pick_rule(rules, rule.as_deref())?;
            let host = files::graph(graph)?;
            let outcomes = apply_all(&rule, &host, rewrite_mode(*mode));
            let dot: String = outcomes
                .iter()
                .filter_map(|o| o.result.as_ref().ok())
                .map(generalized_pushout_to_dot)
                .collect();
            emit(cli, &dot)?;
            Ok(Outcome::from_bool(outcomes.iter().any(|o| o.result.is_ok()) || outcomes.is_empty()))
        }
        ExportWhat::Cube {
            spec,
            rules,
            script,
            mode,
            step,
        } => {
            let run = derivation(cli, spec, rules, script, mode.map(step_mode), false)?;
            if let Some((line, e)) = &run.error {
                return Err(CliError(format!("{}:{line}: step failed: {e}", script.display())));
            }
            let index = step.unwrap_or(run.steps.len());
            let record = index
                .checked_sub(1)
                .and_then(|i| run.steps.get(i))
                .ok_or_else(|| CliError(format!("no step {index}")))?;
            if record.mode == StepMode::Classic {
                return Err(CliError(format!("step {index} is a classic step and has no cube")));
            }
            let text = match cli.emit {
                Emit::Dot => CubeDiagram::from_json(&record.record)
                    .map_err(|e| CliError(e.to_string()))?
                    .to_dot(&format!("step {index} ({})", record.rule)),
                _ => json_text(&record.record),
            };
            emit(cli, &text)?;
            Ok(Outcome::Success)
        }
    }
}
