use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::spec::EqSpec;
use super::term::{Equation, Term};
use crate::error::{Error, Result};
use crate::text;

/// A finite algebra: a carrier per sort and a total table per operation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    carriers: BTreeMap<String, Vec<String>>,
    tables: BTreeMap<String, BTreeMap<Vec<String>, String>>,
}

/// An assignment under which an equation fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub equation: Equation,
    pub assignment: BTreeMap<String, String>,
    pub lhs_value: String,
    pub rhs_value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum RefuteOutcome {
    Refuted(Counterexample),
    Inconclusive,
}

impl Model {
    pub fn new(
        carriers: BTreeMap<String, Vec<String>>,
        tables: BTreeMap<String, BTreeMap<Vec<String>, String>>,
    ) -> Self {
        Self { carriers, tables }
    }

    /// Builds the tables by evaluating `f` on every argument tuple.
    pub fn tabulate(
        spec: &EqSpec,
        carriers: BTreeMap<String, Vec<String>>,
        mut f: impl FnMut(&str, &[String]) -> String,
    ) -> Result<Self> {
        let mut tables = BTreeMap::new();
        for (op, decl) in spec.ops() {
            let pools: Vec<&Vec<String>> = decl
                .args
                .iter()
                .map(|s| carriers.get(s).ok_or_else(|| Error::InvalidModel(format!("no carrier for `{s}`"))))
                .collect::<Result<_>>()?;
            let mut table = BTreeMap::new();
            for args in tuples(&pools) {
                let v = f(op, &args);
                table.insert(args, v);
            }
            tables.insert(op.clone(), table);
        }
        let m = Self { carriers, tables };
        m.validate(spec)?;
        Ok(m)
    }

    pub fn carriers(&self) -> &BTreeMap<String, Vec<String>> {
        &self.carriers
    }

    pub fn validate(&self, spec: &EqSpec) -> Result<()> {
        for s in spec.sorts() {
            if self.carriers.get(s).map_or(true, Vec::is_empty) {
                return Err(Error::InvalidModel(format!("sort `{s}` has an empty carrier")));
            }
        }
        for (op, decl) in spec.ops() {
            let table = self
                .tables
                .get(op)
                .ok_or_else(|| Error::InvalidModel(format!("no table for `{op}`")))?;
            let pools: Vec<&Vec<String>> = decl.args.iter().map(|s| &self.carriers[s]).collect();
            let result = &self.carriers[&decl.result];
            for args in tuples(&pools) {
                match table.get(&args) {
                    Some(v) if result.contains(v) => {}
                    Some(v) => {
                        return Err(Error::InvalidModel(format!("`{op}` returns `{v}` outside its carrier")))
                    }
                    None => {
                        return Err(Error::InvalidModel(format!("`{op}` undefined on ({})", args.join(", "))))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: &Term, assignment: &BTreeMap<String, String>) -> Result<String> {
        match t {
            Term::Var(v) => assignment
                .get(v)
                .cloned()
                .ok_or_else(|| Error::InvalidModel(format!("unassigned variable `{v}`"))),
            Term::App(op, args) => {
                let vals = args.iter().map(|a| self.eval(a, assignment)).collect::<Result<Vec<_>>>()?;
                self.tables
                    .get(op)
                    .and_then(|t| t.get(&vals))
                    .cloned()
                    .ok_or_else(|| Error::InvalidModel(format!("`{op}` undefined on ({})", vals.join(", "))))
            }
        }
    }

    /// First assignment (in carrier order) falsifying `e`, if any.
    pub fn counterexample(&self, spec: &EqSpec, e: &Equation) -> Result<Option<Counterexample>> {
        let vars: Vec<String> = e.vars().into_iter().collect();
        let pools: Vec<&Vec<String>> = vars
            .iter()
            .map(|v| {
                let sort = spec.vars().get(v).ok_or_else(|| Error::UnknownSymbol(v.clone()))?;
                self.carriers
                    .get(sort)
                    .ok_or_else(|| Error::InvalidModel(format!("no carrier for `{sort}`")))
            })
            .collect::<Result<_>>()?;
        for values in tuples(&pools) {
            let assignment: BTreeMap<String, String> = vars.iter().cloned().zip(values).collect();
            let (l, r) = (self.eval(e.lhs(), &assignment)?, self.eval(e.rhs(), &assignment)?);
            if l != r {
                return Ok(Some(Counterexample {
                    equation: e.clone(),
                    assignment,
                    lhs_value: l,
                    rhs_value: r,
                }));
            }
        }
        Ok(None)
    }

    pub fn satisfies(&self, spec: &EqSpec) -> Result<bool> {
        for e in spec.equations() {
            if self.counterexample(spec, e)?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("CARRIERS\n");
        for (s, values) in &self.carriers {
            let _ = writeln!(out, "{s} : {}", values.join(" "));
        }
        out.push_str("TABLES\n");
        for (op, table) in &self.tables {
            for (args, v) in table {
                let _ = writeln!(out, "{op}({}) = {v}", args.join(", "));
            }
        }
        out
    }

    /// `CARRIERS` lines `S : a b c`, `TABLES` lines `op(a, b) = c` (a
    /// constant may be written `op = c`).
    pub fn parse(input: &str) -> Result<Model> {
        let mut carriers = BTreeMap::new();
        let mut tables: BTreeMap<String, BTreeMap<Vec<String>, String>> = BTreeMap::new();
        for (section, body) in text::sections(&text::lines(input), &["CARRIERS", "TABLES"])? {
            for line in body {
                let err = |m: &str| Error::parse(line.number, m.to_string());
                if section == "CARRIERS" {
                    let (sort, values) = line.text.split_once(':').ok_or_else(|| err("expected `S : a b`"))?;
                    let values: Vec<String> = values.split_whitespace().map(str::to_string).collect();
                    carriers.insert(sort.trim().to_string(), values);
                    continue;
                }
                let (lhs, value) = line.text.rsplit_once('=').ok_or_else(|| err("expected `op(args) = value`"))?;
                let lhs = lhs.trim();
                let (op, args) = match lhs.split_once('(') {
                    Some((op, rest)) => {
                        let inner = rest.strip_suffix(')').ok_or_else(|| err("missing `)`"))?;
                        let args: Vec<String> = inner
                            .split(',')
                            .map(|a| a.trim().to_string())
                            .filter(|a| !a.is_empty())
                            .collect();
                        (op.trim().to_string(), args)
                    }
                    None => (lhs.to_string(), Vec::new()),
                };
                if tables.entry(op.clone()).or_default().insert(args, value.trim().to_string()).is_some() {
                    return Err(err(&format!("duplicate entry for `{op}`")));
                }
            }
        }
        Ok(Model { carriers, tables })
    }
}

fn tuples(pools: &[&Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for pool in pools {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                pool.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// Tries to falsify `goal` in a model of `spec`.
pub fn refute(spec: &EqSpec, goal: &Equation, model: &Model) -> Result<RefuteOutcome> {
    spec.equation_sort(goal)?;
    model.validate(spec)?;
    for e in spec.equations() {
        if let Some(c) = model.counterexample(spec, e)? {
            return Err(Error::ModelDoesNotSatisfySpec(format!(
                "`{}` fails with {:?}",
                spec.render_equation(e),
                c.assignment
            )));
        }
    }
    Ok(match model.counterexample(spec, goal)? {
        Some(c) => RefuteOutcome::Refuted(c),
        None => RefuteOutcome::Inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: &str = "SORTS N\nOPS\n0 : -> N\ns : N -> N\n_+_ : N N -> N\nVARS\nx y : N\nEQNS\n0 + y == y\ns(x) + y == s(x + y)\n";
    const MOD2: &str = "CARRIERS\nN : 0 1\nTABLES\n0 = 0\ns(0) = 1\ns(1) = 0\n+(0, 0) = 0\n+(0, 1) = 1\n+(1, 0) = 1\n+(1, 1) = 0\n";

    #[test]
    fn mod_two_refutes_zero_is_one() {
        let n = EqSpec::parse(NAT).unwrap();
        let m = Model::parse(MOD2).unwrap();
        let goal = n.parse_equation("0 == s(0)").unwrap();
        assert!(matches!(refute(&n, &goal, &m).unwrap(), RefuteOutcome::Refuted(_)));
        let axiom = n.parse_equation("0 + y == y").unwrap();
        assert_eq!(refute(&n, &axiom, &m).unwrap(), RefuteOutcome::Inconclusive);
        let trivial = n.parse_equation("x == x").unwrap();
        assert_eq!(refute(&n, &trivial, &m).unwrap(), RefuteOutcome::Inconclusive);
        assert_eq!(Model::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn rejects_models_that_break_axioms() {
        let n = EqSpec::parse(NAT).unwrap();
        let bad = Model::tabulate(&n, [("N".to_string(), vec!["0".into(), "1".into()])].into(), |op, args| {
            match op {
                "0" => "1".into(),
                "s" => args[0].clone(),
                _ => "0".into(),
            }
        })
        .unwrap();
        let goal = n.parse_equation("0 == s(0)").unwrap();
        assert!(matches!(refute(&n, &goal, &bad), Err(Error::ModelDoesNotSatisfySpec(_))));
    }

    #[test]
    fn rejects_partial_tables() {
        let n = EqSpec::parse(NAT).unwrap();
        let m = Model::parse("CARRIERS\nN : 0 1\nTABLES\n0 = 0\ns(0) = 1\n").unwrap();
        assert!(matches!(m.validate(&n), Err(Error::InvalidModel(_))));
    }
}
