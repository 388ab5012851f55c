use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use super::spec::EqSpec;
use super::term::{Equation, Term};
use crate::category::Arrow;
use crate::error::{Error, Result};
use crate::text::{self, Line};

/// A morphism of specifications. Sorts go to sorts and variables to
/// variables; an operation of arity `n` goes to a template over holes
/// `?1..?n` — usually `op'(?1, ..., ?n)`, but a derived operation such as
/// `0 + ?1` is allowed, and a constant may be sent to any ground term.
///
/// Every declared term and equation of the domain must land on a term and
/// an equation (or a reflexive pair) of the codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecMorphism {
    domain: Arc<EqSpec>,
    codomain: Arc<EqSpec>,
    sorts: BTreeMap<String, String>,
    ops: BTreeMap<String, Term>,
    vars: BTreeMap<String, String>,
}

impl SpecMorphism {
    pub fn new(
        domain: EqSpec,
        codomain: EqSpec,
        sorts: BTreeMap<String, String>,
        ops: BTreeMap<String, Term>,
        vars: BTreeMap<String, String>,
    ) -> Result<Self> {
        Self::from_arcs(Arc::new(domain), Arc::new(codomain), sorts, ops, vars)
    }

    pub(crate) fn from_arcs(
        domain: Arc<EqSpec>,
        codomain: Arc<EqSpec>,
        sorts: BTreeMap<String, String>,
        ops: BTreeMap<String, Term>,
        vars: BTreeMap<String, String>,
    ) -> Result<Self> {
        let m = Self {
            domain,
            codomain,
            sorts,
            ops,
            vars,
        };
        m.validate()?;
        Ok(m)
    }

    fn bad(&self, msg: String) -> Error {
        Error::MalformedMorphism(msg)
    }

    fn validate_signature(&self) -> Result<()> {
        let (dom, cod) = (&*self.domain, &*self.codomain);
        for s in dom.sorts() {
            match self.sorts.get(s) {
                Some(t) if cod.sorts().contains(t) => {}
                Some(t) => return Err(self.bad(format!("sort `{s}` mapped to unknown sort `{t}`"))),
                None => return Err(self.bad(format!("sort `{s}` is not mapped"))),
            }
        }
        if self.sorts.len() != dom.sorts().len() {
            return Err(self.bad("sort map mentions undeclared sorts".into()));
        }
        for (name, decl) in dom.ops() {
            let template = self
                .ops
                .get(name)
                .ok_or_else(|| self.bad(format!("operation `{name}` is not mapped")))?;
            let holes: Vec<String> = decl.args.iter().map(|a| self.sorts[a].clone()).collect();
            if template.vars().iter().any(|v| Term::var(v.clone()).hole_index().is_none()) {
                return Err(self.bad(format!("image of `{name}` mentions variables")));
            }
            let got = cod
                .sort_with_holes(template, &holes)
                .map_err(|e| self.bad(format!("image of `{name}`: {e}")))?;
            if got != self.sorts[&decl.result] {
                return Err(self.bad(format!(
                    "image of `{name}` has sort {got}, expected {}",
                    self.sorts[&decl.result]
                )));
            }
        }
        if self.ops.len() != dom.ops().len() {
            return Err(self.bad("operation map mentions undeclared operations".into()));
        }
        for (v, sort) in dom.vars() {
            let image = self
                .vars
                .get(v)
                .ok_or_else(|| self.bad(format!("variable `{v}` is not mapped")))?;
            if cod.vars().get(image) != Some(&self.sorts[sort]) {
                return Err(self.bad(format!("variable `{v}` mapped to `{image}` of the wrong sort")));
            }
        }
        if self.vars.len() != dom.vars().len() {
            return Err(self.bad("variable map mentions undeclared variables".into()));
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        self.validate_signature()?;
        let closure = self.codomain.term_closure();
        for t in self.domain.term_closure() {
            let image = self.map_term(&t);
            if !closure.contains(&image) {
                return Err(self.bad(format!(
                    "image `{}` of term `{}` is not a term of the codomain",
                    self.codomain.render(&image),
                    self.domain.render(&t)
                )));
            }
        }
        for e in self.domain.equations() {
            let image = self.map_equation(e);
            if !image.is_reflexive() && !self.codomain.equations().contains(&image) {
                return Err(self.bad(format!(
                    "image `{}` of equation `{}` is not an equation of the codomain",
                    self.codomain.render_equation(&image),
                    self.domain.render_equation(e)
                )));
            }
        }
        Ok(())
    }

    pub fn identity(spec: &EqSpec) -> Self {
        Self::identity_arc(Arc::new(spec.clone()))
    }

    pub(crate) fn identity_arc(spec: Arc<EqSpec>) -> Self {
        let sorts = spec.sorts().iter().map(|s| (s.clone(), s.clone())).collect();
        let ops = spec
            .ops()
            .iter()
            .map(|(o, d)| (o.clone(), Term::simple_template(o.clone(), d.arity())))
            .collect();
        let vars = spec.vars().keys().map(|v| (v.clone(), v.clone())).collect();
        Self {
            domain: spec.clone(),
            codomain: spec,
            sorts,
            ops,
            vars,
        }
    }

    /// The name-preserving inclusion of `domain` into `codomain`.
    pub fn inclusion(domain: &EqSpec, codomain: &EqSpec) -> Result<Self> {
        let id = Self::identity(domain);
        Self::new(domain.clone(), codomain.clone(), id.sorts, id.ops, id.vars)
    }

    pub fn domain_spec(&self) -> &EqSpec {
        &self.domain
    }

    pub fn codomain_spec(&self) -> &EqSpec {
        &self.codomain
    }

    pub(crate) fn codomain_arc(&self) -> &Arc<EqSpec> {
        &self.codomain
    }

    pub fn sort_map(&self) -> &BTreeMap<String, String> {
        &self.sorts
    }

    pub fn op_map(&self) -> &BTreeMap<String, Term> {
        &self.ops
    }

    pub fn var_map(&self) -> &BTreeMap<String, String> {
        &self.vars
    }

    pub fn map_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.vars.get(v) {
                Some(w) => Term::Var(w.clone()),
                None => t.clone(),
            },
            Term::App(op, args) => {
                let args: Vec<Term> = args.iter().map(|a| self.map_term(a)).collect();
                match self.ops.get(op) {
                    Some(template) => template.instantiate(&args),
                    None => Term::App(op.clone(), args),
                }
            }
        }
    }

    pub fn map_equation(&self, e: &Equation) -> Equation {
        e.map(|t| self.map_term(t))
    }

    /// Every operation goes to `op'(?1..?n)`.
    pub fn is_simple(&self) -> bool {
        self.ops.values().all(|t| t.as_simple_template().is_some())
    }

    /// Same maps, different codomain (which must still accept them).
    pub fn with_codomain(&self, codomain: &EqSpec) -> Result<Self> {
        Self::new(
            (*self.domain).clone(),
            codomain.clone(),
            self.sorts.clone(),
            self.ops.clone(),
            self.vars.clone(),
        )
    }

    /// Renders the maps; entries that are the identity on names are omitted.
    pub fn to_text(&self) -> String {
        let mut out = String::from("SORTMAP\n");
        for (a, b) in &self.sorts {
            if a != b {
                let _ = writeln!(out, "{a} |-> {b}");
            }
        }
        out.push_str("OPMAP\n");
        for (op, t) in &self.ops {
            let arity = self.domain.ops()[op].arity();
            if *t != Term::simple_template(op.clone(), arity) {
                let _ = writeln!(out, "{op} |-> {}", self.codomain.render(t));
            }
        }
        out.push_str("VARMAP\n");
        for (a, b) in &self.vars {
            if a != b {
                let _ = writeln!(out, "{a} |-> {b}");
            }
        }
        out
    }

    /// Parses `SORTMAP` / `OPMAP` / `VARMAP` sections of `x |-> y` lines
    /// between two given specifications. Unlisted items keep their names;
    /// an operation image is a term that may use holes `?1..?n`.
    pub fn parse(domain: &EqSpec, codomain: &EqSpec, input: &str) -> Result<Self> {
        Self::parse_lines(domain, codomain, &text::lines(input))
    }

    pub fn parse_lines(domain: &EqSpec, codomain: &EqSpec, lines: &[Line<'_>]) -> Result<Self> {
        let mut sorts: BTreeMap<String, String> = domain.sorts().iter().map(|s| (s.clone(), s.clone())).collect();
        let mut vars: BTreeMap<String, String> = domain.vars().keys().map(|v| (v.clone(), v.clone())).collect();
        let mut op_lines: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (section, body) in text::sections(lines, &["SORTMAP", "OPMAP", "VARMAP"])? {
            for line in body {
                let (from, to) = line
                    .text
                    .split_once("|->")
                    .ok_or_else(|| Error::parse(line.number, "expected `x |-> y`"))?;
                let (from, to) = (from.trim().to_string(), to.trim().to_string());
                let known = match section.as_str() {
                    "SORTMAP" => sorts.insert(from.clone(), to).is_some(),
                    "VARMAP" => vars.insert(from.clone(), to).is_some(),
                    _ => {
                        let from = from
                            .strip_prefix('_')
                            .and_then(|f| f.strip_suffix('_'))
                            .filter(|f| !f.is_empty())
                            .map_or(from.clone(), str::to_string);
                        let known = domain.ops().contains_key(&from);
                        op_lines.insert(from, (line.number, to));
                        known
                    }
                };
                if !known {
                    return Err(Error::parse(line.number, format!("`{from}` is not declared in the domain")));
                }
            }
        }
        let mut ops = BTreeMap::new();
        for (name, decl) in domain.ops() {
            let template = match op_lines.get(name) {
                Some((number, src)) => {
                    let holes: Vec<String> = decl.args.iter().map(|a| sorts[a].clone()).collect();
                    codomain
                        .parse_template(src, &holes)
                        .map_err(|e| Error::parse(*number, e.to_string()))?
                }
                None => Term::simple_template(name.clone(), decl.arity()),
            };
            ops.insert(name.clone(), template);
        }
        Self::new(domain.clone(), codomain.clone(), sorts, ops, vars)
    }
}

impl Arrow for SpecMorphism {
    type Object = EqSpec;

    fn domain(&self) -> &EqSpec {
        &self.domain
    }

    fn codomain(&self) -> &EqSpec {
        &self.codomain
    }

    fn identity(obj: &EqSpec) -> Self {
        SpecMorphism::identity(obj)
    }

    fn then(&self, next: &Self) -> Result<Self> {
        if self.codomain != next.domain {
            return Err(Error::EndpointMismatch);
        }
        let sorts = self.sorts.iter().map(|(a, b)| (a.clone(), next.sorts[b].clone())).collect();
        let ops = self.ops.iter().map(|(o, t)| (o.clone(), next.map_term(t))).collect();
        let vars = self.vars.iter().map(|(a, b)| (a.clone(), next.vars[b].clone())).collect();
        Ok(Self {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            sorts,
            ops,
            vars,
        })
    }
}

/// Names of operations whose image is not a plain renaming.
pub fn derived_ops(m: &SpecMorphism) -> BTreeSet<String> {
    m.op_map()
        .iter()
        .filter(|(_, t)| t.as_simple_template().is_none())
        .map(|(o, _)| o.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: &str = "SORTS N\nOPS\n0 : -> N\ns : N -> N\n_+_ : N N -> N\nVARS\nx y : N\nEQNS\n0 + y == y\ns(x) + y == s(x + y)\n";

    fn nat() -> EqSpec {
        EqSpec::parse(NAT).unwrap()
    }

    #[test]
    fn identity_and_composition() {
        let n = nat();
        let id = SpecMorphism::identity(&n);
        assert_eq!(id.then(&id).unwrap(), id);
        let t = n.parse_term("s(x) + 0").unwrap();
        assert_eq!(id.map_term(&t), t);
    }

    #[test]
    fn derived_operations_map_terms() {
        let dom = EqSpec::parse("SORTS T\nOPS\nu : T -> T\nw : T -> T\na : -> T\nVARS\np : T\nEQNS\nu(p) == w(p)\n").unwrap();
        let m = SpecMorphism::parse(
            &dom,
            &nat(),
            "SORTMAP\nT |-> N\nOPMAP\nu |-> 0 + ?1\nw |-> ?1\na |-> s(0)\nVARMAP\np |-> y\n",
        )
        .unwrap();
        let n = nat();
        let image = m.map_term(&dom.parse_term("u(a)").unwrap());
        assert_eq!(image, n.parse_term("0 + s(0)").unwrap());
        assert_eq!(derived_ops(&m).len(), 3);
        let text = m.to_text();
        assert_eq!(SpecMorphism::parse(&dom, &n, &text).unwrap(), m);
    }

    #[test]
    fn rejects_equations_that_do_not_land() {
        let dom = EqSpec::parse("SORTS T\nOPS\na b : -> T\nEQNS\na == b\n").unwrap();
        let err = SpecMorphism::parse(&dom, &nat(), "SORTMAP\nT |-> N\nOPMAP\na |-> 0\nb |-> s(0)\n").unwrap_err();
        assert!(matches!(err, Error::MalformedMorphism(_)), "{err}");
        // collapsing the equation is fine
        SpecMorphism::parse(&dom, &nat(), "SORTMAP\nT |-> N\nOPMAP\na |-> 0\nb |-> 0\n").unwrap();
    }

    #[test]
    fn rejects_ill_sorted_templates() {
        let dom = EqSpec::parse("SORTS T B\nOPS\nf : T -> B\n").unwrap();
        let cod = EqSpec::parse("SORTS N M\nOPS\ng : N -> N\n").unwrap();
        assert!(SpecMorphism::parse(&dom, &cod, "SORTMAP\nT |-> N\nB |-> M\nOPMAP\nf |-> g(?1)\n").is_err());
        assert!(SpecMorphism::parse(&dom, &cod, "SORTMAP\nT |-> N\nB |-> N\nOPMAP\nf |-> g(?2)\n").is_err());
        SpecMorphism::parse(&dom, &cod, "SORTMAP\nT |-> N\nB |-> N\nOPMAP\nf |-> g(g(?1))\n").unwrap();
    }
}
