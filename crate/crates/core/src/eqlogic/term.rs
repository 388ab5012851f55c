use std::collections::{BTreeMap, BTreeSet};

use std::fmt;

use serde::{Serialize, Serializer};

/// A first-order term. Variables whose name starts with `?` are template
/// holes (`?1`, `?2`, ...) used by specification morphisms that send an
/// operation to a derived operation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(op.into(), args)
    }

    pub fn constant(op: impl Into<String>) -> Self {
        Term::App(op.into(), Vec::new())
    }

    pub fn hole(index: usize) -> Self {
        Term::Var(format!("?{index}"))
    }

    /// `op(?1, ..., ?n)`
    pub fn simple_template(op: impl Into<String>, arity: usize) -> Self {
        Term::App(op.into(), (1..=arity).map(Term::hole).collect())
    }

    pub fn hole_index(&self) -> Option<usize> {
        match self {
            Term::Var(v) => v.strip_prefix('?').and_then(|n| n.parse().ok()),
            Term::App(..) => None,
        }
    }

    /// If this is `op(?1, ..., ?n)`, the operation name.
    pub fn as_simple_template(&self) -> Option<&str> {
        match self {
            Term::App(op, args)
                if args
                    .iter()
                    .enumerate()
                    .all(|(i, a)| a.hole_index() == Some(i + 1)) =>
            {
                Some(op)
            }
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn ops(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_ops(&mut out);
        out
    }

    fn collect_ops(&self, out: &mut BTreeSet<String>) {
        if let Term::App(op, args) = self {
            out.insert(op.clone());
            args.iter().for_each(|a| a.collect_ops(out));
        }
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    /// All subterms, including the term itself.
    pub fn subterms(&self, out: &mut BTreeSet<Term>) {
        if out.insert(self.clone()) {
            if let Term::App(_, args) = self {
                args.iter().for_each(|a| a.subterms(out));
            }
        }
    }

    pub fn substitute(&self, subst: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(op, args) => {
                Term::App(op.clone(), args.iter().map(|a| a.substitute(subst)).collect())
            }
        }
    }

    /// Replaces holes `?i` by `args[i - 1]`.
    pub fn instantiate(&self, args: &[Term]) -> Term {
        match self {
            Term::Var(_) => match self.hole_index() {
                Some(i) if i >= 1 && i <= args.len() => args[i - 1].clone(),
                _ => self.clone(),
            },
            Term::App(op, sub) => Term::App(op.clone(), sub.iter().map(|a| a.instantiate(args)).collect()),
        }
    }
}

/// An unordered pair of terms. The larger side (by size, then structure)
/// is stored first, so `a == b` and `b == a` are the same value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Equation {
    lhs: Term,
    rhs: Term,
}

impl Equation {
    pub fn new(a: Term, b: Term) -> Self {
        let key = |t: &Term| (std::cmp::Reverse(t.size()), t.clone());
        if key(&a) <= key(&b) {
            Self { lhs: a, rhs: b }
        } else {
            Self { lhs: b, rhs: a }
        }
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn sides(&self) -> [&Term; 2] {
        [&self.lhs, &self.rhs]
    }

    pub fn is_reflexive(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    pub fn map(&self, f: impl Fn(&Term) -> Term) -> Equation {
        Equation::new(f(&self.lhs), f(&self.rhs))
    }

    pub fn substitute(&self, subst: &BTreeMap<String, Term>) -> Equation {
        self.map(|t| t.substitute(subst))
    }
}

/// Prefix form, `+(s(x), 0)`; specifications render infix operations
/// properly.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(op, args) if args.is_empty() => f.write_str(op),
            Term::App(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} == {}", self.lhs, self.rhs)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Equation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
