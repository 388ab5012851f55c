use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::term::{Equation, Term};
use crate::error::{Error, Result};
use crate::text::{self, Line};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OpDecl {
    pub args: Vec<String>,
    pub result: String,
    pub infix: bool,
}

impl OpDecl {
    pub fn new(args: Vec<String>, result: impl Into<String>) -> Self {
        Self {
            args,
            result: result.into(),
            infix: false,
        }
    }

    pub fn infix(left: impl Into<String>, right: impl Into<String>, result: impl Into<String>) -> Self {
        Self {
            args: vec![left.into(), right.into()],
            result: result.into(),
            infix: true,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

/// A finite equational specification: sorts, operations, variables,
/// declared terms and equations. Equations are universally quantified over
/// the variables they mention; nullary operations act as named points.
///
/// Values are kept in a normal form: reflexive equations are dropped and
/// declared terms already reachable as subterms of equations or of other
/// declared terms are pruned, so structural equality is presentation
/// equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct EqSpec {
    sorts: BTreeSet<String>,
    ops: BTreeMap<String, OpDecl>,
    vars: BTreeMap<String, String>,
    terms: BTreeSet<Term>,
    equations: BTreeSet<Equation>,
}

impl EqSpec {
    pub fn new(
        sorts: BTreeSet<String>,
        ops: BTreeMap<String, OpDecl>,
        vars: BTreeMap<String, String>,
        terms: BTreeSet<Term>,
        equations: BTreeSet<Equation>,
    ) -> Result<Self> {
        let mut spec = Self {
            sorts,
            ops,
            vars,
            terms,
            equations,
        };
        spec.validate()?;
        spec.normalize();
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        for (name, op) in &self.ops {
            if name.is_empty() || name.starts_with('?') {
                return Err(Error::MalformedSpec(format!("bad operation name `{name}`")));
            }
            for s in op.args.iter().chain([&op.result]) {
                if !self.sorts.contains(s) {
                    return Err(Error::MalformedSpec(format!("operation `{name}` uses undeclared sort `{s}`")));
                }
            }
            if op.infix && op.arity() != 2 {
                return Err(Error::MalformedSpec(format!("infix operation `{name}` must be binary")));
            }
        }
        for (name, sort) in &self.vars {
            if name.starts_with('?') {
                return Err(Error::MalformedSpec(format!("bad variable name `{name}`")));
            }
            if !self.sorts.contains(sort) {
                return Err(Error::MalformedSpec(format!("variable `{name}` has undeclared sort `{sort}`")));
            }
            if self.ops.contains_key(name) {
                return Err(Error::MalformedSpec(format!("`{name}` is both a variable and an operation")));
            }
        }
        for t in &self.terms {
            self.sort_of(t)?;
        }
        for e in &self.equations {
            self.equation_sort(e)?;
        }
        Ok(())
    }

    fn normalize(&mut self) {
        self.equations.retain(|e| !e.is_reflexive());
        let mut covered = BTreeSet::new();
        for e in &self.equations {
            e.lhs().subterms(&mut covered);
            e.rhs().subterms(&mut covered);
        }
        let mut declared: Vec<Term> = std::mem::take(&mut self.terms).into_iter().collect();
        declared.sort_by(|a, b| b.size().cmp(&a.size()).then(a.cmp(b)));
        for t in declared {
            if !covered.contains(&t) {
                t.subterms(&mut covered);
                self.terms.insert(t);
            }
        }
    }

    pub fn sorts(&self) -> &BTreeSet<String> {
        &self.sorts
    }

    pub fn ops(&self) -> &BTreeMap<String, OpDecl> {
        &self.ops
    }

    pub fn vars(&self) -> &BTreeMap<String, String> {
        &self.vars
    }

    /// Declared terms not already covered by equations (see type docs).
    pub fn terms(&self) -> &BTreeSet<Term> {
        &self.terms
    }

    pub fn equations(&self) -> &BTreeSet<Equation> {
        &self.equations
    }

    /// Every term the presentation mentions: declared terms, equation sides
    /// and all their subterms.
    pub fn term_closure(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for t in &self.terms {
            t.subterms(&mut out);
        }
        for e in &self.equations {
            e.lhs().subterms(&mut out);
            e.rhs().subterms(&mut out);
        }
        out
    }

    pub fn sort_of(&self, t: &Term) -> Result<String> {
        self.sort_with_holes(t, &[])
    }

    /// Sort of a term that may contain holes `?i` of the given sorts.
    pub fn sort_with_holes(&self, t: &Term, holes: &[String]) -> Result<String> {
        match t {
            Term::Var(v) => {
                if let Some(i) = t.hole_index() {
                    return holes
                        .get(i.wrapping_sub(1))
                        .cloned()
                        .ok_or_else(|| Error::IllSorted(format!("hole `{v}` out of range")));
                }
                self.vars
                    .get(v)
                    .cloned()
                    .ok_or_else(|| Error::UnknownSymbol(v.clone()))
            }
            Term::App(op, args) => {
                let decl = self.ops.get(op).ok_or_else(|| Error::UnknownSymbol(op.clone()))?;
                if decl.arity() != args.len() {
                    return Err(Error::IllSorted(format!(
                        "`{op}` expects {} arguments, got {}",
                        decl.arity(),
                        args.len()
                    )));
                }
                for (a, want) in args.iter().zip(&decl.args) {
                    let got = self.sort_with_holes(a, holes)?;
                    if &got != want {
                        return Err(Error::IllSorted(format!(
                            "argument `{}` of `{op}` has sort {got}, expected {want}",
                            self.render(a)
                        )));
                    }
                }
                Ok(decl.result.clone())
            }
        }
    }

    pub fn equation_sort(&self, e: &Equation) -> Result<String> {
        let (a, b) = (self.sort_of(e.lhs())?, self.sort_of(e.rhs())?);
        if a != b {
            return Err(Error::IllSorted(format!(
                "`{}` has sides of sorts {a} and {b}",
                self.render_equation(e)
            )));
        }
        Ok(a)
    }

    /// Same signature and variables, different terms and equations.
    pub fn with_content(
        &self,
        terms: BTreeSet<Term>,
        equations: BTreeSet<Equation>,
    ) -> Result<EqSpec> {
        EqSpec::new(self.sorts.clone(), self.ops.clone(), self.vars.clone(), terms, equations)
    }

    pub fn with_equations(&self, extra: impl IntoIterator<Item = Equation>) -> Result<EqSpec> {
        let mut eqs = self.equations.clone();
        eqs.extend(extra);
        self.with_content(self.terms.clone(), eqs)
    }

    pub fn with_terms(&self, extra: impl IntoIterator<Item = Term>) -> Result<EqSpec> {
        let mut terms = self.terms.clone();
        terms.extend(extra);
        self.with_content(terms, self.equations.clone())
    }

    pub fn with_vars(&self, extra: impl IntoIterator<Item = (String, String)>) -> Result<EqSpec> {
        let mut vars = self.vars.clone();
        vars.extend(extra);
        EqSpec::new(self.sorts.clone(), self.ops.clone(), vars, self.terms.clone(), self.equations.clone())
    }

    /// Size used to compare presentations: equation count, then term count.
    pub fn presentation_size(&self) -> (usize, usize) {
        (self.equations.len(), self.term_closure().len())
    }

    pub fn symbol_count(&self) -> usize {
        self.sorts.len() + self.ops.len() + self.vars.len() + self.term_closure().len() + self.equations.len()
    }

    // ---- text ----

    pub fn render(&self, t: &Term) -> String {
        let mut out = String::new();
        self.write_term(&mut out, t, false);
        out
    }

    fn write_term(&self, out: &mut String, t: &Term, nested_infix: bool) {
        match t {
            Term::Var(v) => out.push_str(v),
            Term::App(op, args) => {
                let infix = self.ops.get(op).is_some_and(|d| d.infix) && args.len() == 2;
                if infix {
                    if nested_infix {
                        out.push('(');
                    }
                    self.write_term(out, &args[0], true);
                    let _ = write!(out, " {op} ");
                    self.write_term(out, &args[1], true);
                    if nested_infix {
                        out.push(')');
                    }
                } else if args.is_empty() {
                    out.push_str(op);
                } else {
                    out.push_str(op);
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        self.write_term(out, a, false);
                    }
                    out.push(')');
                }
            }
        }
    }

    pub fn render_equation(&self, e: &Equation) -> String {
        format!("{} == {}", self.render(e.lhs()), self.render(e.rhs()))
    }

    /// Equations in canonical (rendered-text) order.
    pub fn sorted_equations(&self) -> Vec<&Equation> {
        let mut eqs: Vec<_> = self.equations.iter().collect();
        eqs.sort_by_cached_key(|e| self.render_equation(e));
        eqs
    }

    /// Canonical text form; every section is sorted.
    pub fn to_text(&self) -> String {
        let mut out = String::from("SORTS\n");
        for s in &self.sorts {
            let _ = writeln!(out, "{s}");
        }
        out.push_str("OPS\n");
        let mut ops: Vec<String> = self
            .ops
            .iter()
            .map(|(name, d)| {
                let shown = if d.infix { format!("_{name}_") } else { name.clone() };
                let args = d.args.iter().map(|a| format!("{a} ")).collect::<String>();
                format!("{shown} : {args}-> {}", d.result)
            })
            .collect();
        ops.sort();
        for line in ops {
            let _ = writeln!(out, "{line}");
        }
        out.push_str("VARS\n");
        for (v, s) in &self.vars {
            let _ = writeln!(out, "{v} : {s}");
        }
        out.push_str("TERMS\n");
        let mut terms: Vec<String> = self.terms.iter().map(|t| self.render(t)).collect();
        terms.sort();
        for t in terms {
            let _ = writeln!(out, "{t}");
        }
        out.push_str("EQNS\n");
        for e in self.sorted_equations() {
            let _ = writeln!(out, "{}", self.render_equation(e));
        }
        out
    }

    pub fn parse(input: &str) -> Result<EqSpec> {
        Self::parse_lines(&text::lines(input))
    }

    pub fn parse_lines(lines: &[Line<'_>]) -> Result<EqSpec> {
        let mut sorts = BTreeSet::new();
        let mut ops = BTreeMap::new();
        let mut vars = BTreeMap::new();
        let mut term_lines = Vec::new();
        let mut eq_lines = Vec::new();
        let first = lines.first().map_or(1, |l| l.number);
        for (section, body) in text::sections(lines, &["SPEC", "SORTS", "OPS", "VARS", "TERMS", "EQNS"])? {
            for line in body {
                let err = |m: &str| Error::parse(line.number, m.to_string());
                match section.as_str() {
                    "SPEC" => {}
                    "SORTS" => sorts.extend(line.text.split_whitespace().map(str::to_string)),
                    "OPS" => {
                        let (names, sig) = line.text.split_once(" : ").ok_or_else(|| err("expected `op : S1 S2 -> S`"))?;
                        let (args, result) = sig.split_once("->").ok_or_else(|| err("expected `->` in signature"))?;
                        let args: Vec<String> = args.split_whitespace().map(str::to_string).collect();
                        let result = result.trim();
                        if result.is_empty() || result.contains(char::is_whitespace) {
                            return Err(err("expected a single result sort"));
                        }
                        for raw in names.split_whitespace() {
                            let (name, infix) = match raw.strip_prefix('_').and_then(|r| r.strip_suffix('_')) {
                                Some(inner) if !inner.is_empty() => (inner.to_string(), true),
                                _ => (raw.to_string(), false),
                            };
                            if name.contains("==") || name.contains(['(', ')', ',']) {
                                return Err(err("operation names may not contain `==`, parentheses or commas"));
                            }
                            let decl = OpDecl {
                                args: args.clone(),
                                result: result.to_string(),
                                infix,
                            };
                            if ops.insert(name.clone(), decl).is_some() {
                                return Err(err(&format!("operation `{name}` declared twice")));
                            }
                        }
                    }
                    "VARS" => {
                        let (names, sort) = line.text.split_once(':').ok_or_else(|| err("expected `x y : S`"))?;
                        for v in names.split_whitespace() {
                            if vars.insert(v.to_string(), sort.trim().to_string()).is_some() {
                                return Err(err(&format!("variable `{v}` declared twice")));
                            }
                        }
                    }
                    "TERMS" => term_lines.push(line),
                    _ => eq_lines.push(line),
                }
            }
        }
        let signature = EqSpec::new(sorts, ops, vars, BTreeSet::new(), BTreeSet::new())
            .map_err(|e| Error::parse(first, e.to_string()))?;
        let mut terms = BTreeSet::new();
        for line in term_lines {
            let t = signature.parse_term(line.text).map_err(|e| Error::parse(line.number, e.to_string()))?;
            terms.insert(t);
        }
        let mut equations = BTreeSet::new();
        for line in eq_lines {
            let e = signature
                .parse_equation(line.text)
                .map_err(|e| Error::parse(line.number, e.to_string()))?;
            equations.insert(e);
        }
        signature
            .with_content(terms, equations)
            .map_err(|e| Error::parse(first, e.to_string()))
    }

    pub fn parse_term(&self, input: &str) -> Result<Term> {
        let t = TermParser::new(self, input, false)?.parse_all()?;
        self.sort_of(&t)?;
        Ok(t)
    }

    /// Parses a template whose holes `?i` have the given sorts.
    pub fn parse_template(&self, input: &str, holes: &[String]) -> Result<Term> {
        let t = TermParser::new(self, input, true)?.parse_all()?;
        self.sort_with_holes(&t, holes)?;
        Ok(t)
    }

    pub fn parse_equation(&self, input: &str) -> Result<Equation> {
        let (a, b) = input
            .split_once("==")
            .ok_or_else(|| Error::MalformedSpec(format!("expected `lhs == rhs`, got `{input}`")))?;
        let e = Equation::new(self.parse_term(a)?, self.parse_term(b)?);
        self.equation_sort(&e)?;
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Symbol(String),
    Hole(usize),
    Open,
    Close,
    Comma,
}

fn is_symbol_char(c: char) -> bool {
    "+-*/<>=!&|^~@$%:;".contains(c)
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push(Token::Open);
            i += 1;
        } else if c == ')' {
            out.push(Token::Close);
            i += 1;
        } else if c == ',' {
            out.push(Token::Comma);
            i += 1;
        } else if c == '?' {
            let start = i + 1;
            i = start;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let n: usize = chars[start..i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::MalformedSpec(format!("bad hole in `{input}`")))?;
            out.push(Token::Hole(n));
        } else if is_symbol_char(c) {
            let start = i;
            while i < chars.len() && is_symbol_char(chars[i]) {
                i += 1;
            }
            out.push(Token::Symbol(chars[start..i].iter().collect()));
        } else if c.is_alphanumeric() || c == '_' || c == '\'' || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || "_'.".contains(chars[i])) {
                i += 1;
            }
            out.push(Token::Word(chars[start..i].iter().collect()));
        } else {
            return Err(Error::MalformedSpec(format!("unexpected `{c}` in `{input}`")));
        }
    }
    Ok(out)
}

struct TermParser<'a> {
    spec: &'a EqSpec,
    tokens: Vec<Token>,
    pos: usize,
    holes: bool,
    source: &'a str,
}

impl<'a> TermParser<'a> {
    fn new(spec: &'a EqSpec, source: &'a str, holes: bool) -> Result<Self> {
        Ok(Self {
            spec,
            tokens: tokenize(source)?,
            pos: 0,
            holes,
            source,
        })
    }

    fn fail<T>(&self, what: &str) -> Result<T> {
        Err(Error::MalformedSpec(format!("{what} in `{}`", self.source.trim())))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn parse_all(mut self) -> Result<Term> {
        let t = self.expr()?;
        if self.pos != self.tokens.len() {
            return self.fail("trailing input");
        }
        Ok(t)
    }

    fn expr(&mut self) -> Result<Term> {
        let mut left = self.primary()?;
        while let Some(Token::Symbol(op)) = self.peek().cloned() {
            if !self.spec.ops.get(&op).is_some_and(|d| d.infix) {
                return Err(Error::UnknownSymbol(op));
            }
            self.pos += 1;
            let right = self.primary()?;
            left = Term::App(op, vec![left, right]);
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.next() {
            Some(Token::Open) => {
                let t = self.expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(t),
                    _ => self.fail("missing `)`"),
                }
            }
            Some(Token::Hole(n)) if self.holes => Ok(Term::hole(n)),
            Some(Token::Hole(_)) => self.fail("template hole outside a template"),
            Some(Token::Word(name)) | Some(Token::Symbol(name)) => {
                if self.peek() == Some(&Token::Open) {
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    loop {
                        match self.next() {
                            Some(Token::Comma) => args.push(self.expr()?),
                            Some(Token::Close) => break,
                            _ => return self.fail("expected `,` or `)`"),
                        }
                    }
                    if !self.spec.ops.contains_key(&name) {
                        return Err(Error::UnknownSymbol(name));
                    }
                    Ok(Term::App(name, args))
                } else if self.spec.vars.contains_key(&name) {
                    Ok(Term::Var(name))
                } else if self.spec.ops.get(&name).is_some_and(|d| d.arity() == 0) {
                    Ok(Term::App(name, Vec::new()))
                } else {
                    Err(Error::UnknownSymbol(name))
                }
            }
            _ => self.fail("expected a term"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: &str = "SORTS N
OPS
0 : -> N
s : N -> N
_+_ : N N -> N
VARS
x y : N
EQNS
0 + y == y
s(x) + y == s(x + y)
";

    #[test]
    fn parses_and_prints_naturals() {
        let spec = EqSpec::parse(NAT).unwrap();
        assert_eq!(spec.ops().len(), 3);
        assert!(spec.ops()["+"].infix);
        assert_eq!(spec.equations().len(), 2);
        let text = spec.to_text();
        assert!(text.contains("_+_ : N N -> N"));
        assert!(text.contains("s(x) + y == s(x + y)"));
        assert_eq!(EqSpec::parse(&text).unwrap(), spec);
        assert_eq!(EqSpec::parse(&text).unwrap().to_text(), text);
    }

    #[test]
    fn infix_is_left_associative_and_parenthesized() {
        let spec = EqSpec::parse(NAT).unwrap();
        let t = spec.parse_term("x + y + 0").unwrap();
        assert_eq!(spec.render(&t), "(x + y) + 0");
        let u = spec.parse_term("x + (y + 0)").unwrap();
        assert_ne!(t, u);
        assert_eq!(spec.parse_term(&spec.render(&u)).unwrap(), u);
        assert_eq!(spec.parse_term("+(x, y)").unwrap(), spec.parse_term("x + y").unwrap());
    }

    #[test]
    fn rejects_ill_sorted_and_unknown() {
        let spec = EqSpec::parse("SORTS A B\nOPS\nf : A -> B\na : -> A\nb : -> B\n").unwrap();
        assert!(matches!(spec.parse_term("f(b)"), Err(Error::IllSorted(_))));
        assert!(matches!(spec.parse_term("g(a)"), Err(Error::UnknownSymbol(_))));
        assert!(matches!(spec.parse_equation("f(a) == a"), Err(Error::IllSorted(_))));
        assert!(EqSpec::parse("SORTS A\nOPS\nf : C -> A\n").is_err());
        let err = EqSpec::parse("SORTS N\nOPS\n0 : -> N\nEQNS\n0 == q\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
    }

    #[test]
    fn normal_form_drops_redundant_content() {
        let spec = EqSpec::parse(NAT).unwrap();
        let extra = spec
            .with_terms([spec.parse_term("s(x)").unwrap(), spec.parse_term("s(s(0))").unwrap()])
            .unwrap()
            .with_equations([Equation::new(Term::constant("0"), Term::constant("0"))])
            .unwrap();
        assert_eq!(extra.equations().len(), 2);
        assert_eq!(extra.terms().len(), 1);
        assert!(extra.term_closure().contains(&spec.parse_term("s(0)").unwrap()));
    }

    #[test]
    fn templates_parse_with_holes() {
        let spec = EqSpec::parse(NAT).unwrap();
        let t = spec.parse_template("0 + ?1", &["N".into()]).unwrap();
        assert_eq!(t, Term::app("+", vec![Term::constant("0"), Term::hole(1)]));
        assert!(spec.parse_term("0 + ?1").is_err());
    }
}
