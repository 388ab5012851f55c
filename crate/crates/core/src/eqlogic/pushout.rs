//! Pushouts of specifications: sorts, operations and variables are glued by
//! union-find; an operation sent to a derived template on one side is
//! eliminated in favour of that template.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::morphism::SpecMorphism;
use super::spec::{EqSpec, OpDecl};
use super::term::Term;
use crate::category::{Arrow, Cospan, Gluing, Pushout, Span};
use crate::error::{Error, Result};
use crate::quotient::{name_classes, DisjointSets, Foot, Tagged};

/// Items of a disjoint union `A + B`, indexed for union-find.
struct Items {
    tagged: Vec<Tagged>,
    index: BTreeMap<Tagged, usize>,
    sets: DisjointSets,
}

impl Items {
    fn new<'a>(left: impl Iterator<Item = &'a String>, right: impl Iterator<Item = &'a String>) -> Self {
        let tagged: Vec<Tagged> = left
            .map(|n| (Foot::Left, n.clone()))
            .chain(right.map(|n| (Foot::Right, n.clone())))
            .collect();
        let index = tagged.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let sets = DisjointSets::new(tagged.len());
        Self { tagged, index, sets }
    }

    fn id(&self, foot: Foot, name: &str) -> usize {
        self.index[&(foot, name.to_string())]
    }

    fn root(&mut self, foot: Foot, name: &str) -> usize {
        let i = self.id(foot, name);
        self.sets.find(i)
    }

    fn union(&mut self, a: (Foot, &str), b: (Foot, &str)) {
        let (x, y) = (self.id(a.0, a.1), self.id(b.0, b.1));
        self.sets.union(x, y);
    }

    /// Classes keyed by root, members tagged.
    fn classes(&mut self) -> BTreeMap<usize, Vec<Tagged>> {
        self.sets
            .classes()
            .into_iter()
            .map(|(root, members)| (root, members.into_iter().map(|i| self.tagged[i].clone()).collect()))
            .collect()
    }
}

struct Builder<'a> {
    feet: [&'a EqSpec; 2],
    ops: Items,
    sort_names: BTreeMap<Tagged, String>,
    /// Root of an operation class -> templates (in the foot's language) it
    /// is defined by.
    bindings: BTreeMap<usize, Vec<(Foot, Term)>>,
    names: BTreeMap<usize, String>,
    var_names: BTreeMap<Tagged, String>,
    resolved: BTreeMap<usize, Term>,
    visiting: BTreeSet<usize>,
}

fn foot_index(foot: Foot) -> usize {
    match foot {
        Foot::Left => 0,
        Foot::Right => 1,
    }
}

impl Builder<'_> {
    fn resolve(&mut self, root: usize) -> Result<Option<Term>> {
        if let Some(t) = self.resolved.get(&root) {
            return Ok(Some(t.clone()));
        }
        let Some(defs) = self.bindings.get(&root).cloned() else {
            return Ok(None);
        };
        if !self.visiting.insert(root) {
            return Err(Error::GluingConflict("cyclic operation definitions".into()));
        }
        let mut result: Option<Term> = None;
        for (foot, template) in defs {
            let t = self.translate(foot, &template)?;
            match &result {
                None => result = Some(t),
                Some(prev) if *prev == t => {}
                Some(_) => {
                    return Err(Error::GluingConflict(
                        "an operation is identified with two different derived terms".into(),
                    ))
                }
            }
        }
        self.visiting.remove(&root);
        let t = result.expect("bindings are non-empty");
        self.resolved.insert(root, t.clone());
        Ok(Some(t))
    }

    /// Translates a term (possibly with holes) of one foot into the vertex.
    fn translate(&mut self, foot: Foot, t: &Term) -> Result<Term> {
        match t {
            Term::Var(v) => {
                if t.hole_index().is_some() {
                    return Ok(t.clone());
                }
                Ok(Term::Var(self.var_names[&(foot, v.clone())].clone()))
            }
            Term::App(op, args) => {
                let args = args.iter().map(|a| self.translate(foot, a)).collect::<Result<Vec<_>>>()?;
                let root = self.ops.root(foot, op);
                match self.resolve(root)? {
                    Some(template) => Ok(template.instantiate(&args)),
                    None => Ok(Term::App(self.names[&root].clone(), args)),
                }
            }
        }
    }
}

pub(crate) fn spec_pushout(span: &Span<SpecMorphism>) -> Result<Pushout<SpecMorphism>> {
    let (f, g) = (span.left(), span.right());
    let (a, b) = (f.codomain(), g.codomain());
    let k = span.apex();

    // sorts
    let mut sorts = Items::new(a.sorts().iter(), b.sorts().iter());
    for s in k.sorts() {
        sorts.union((Foot::Left, &f.sort_map()[s]), (Foot::Right, &g.sort_map()[s]));
    }
    let sort_classes: Vec<Vec<Tagged>> = sorts.classes().into_values().collect();
    let sort_class_names = name_classes(&sort_classes, &mut BTreeSet::new());
    let mut sort_names = BTreeMap::new();
    for (class, name) in sort_classes.iter().zip(&sort_class_names) {
        for member in class {
            sort_names.insert(member.clone(), name.clone());
        }
    }

    // operations
    let mut ops = Items::new(a.ops().keys(), b.ops().keys());
    let mut pending: Vec<(Foot, String, Foot, Term)> = Vec::new();
    let mut constraints: Vec<(Term, Term)> = Vec::new();
    for o in k.ops().keys() {
        let (tf, tg) = (&f.op_map()[o], &g.op_map()[o]);
        match (tf.as_simple_template(), tg.as_simple_template()) {
            (Some(x), Some(y)) => ops.union((Foot::Left, x), (Foot::Right, y)),
            (Some(x), None) => pending.push((Foot::Left, x.to_string(), Foot::Right, tg.clone())),
            (None, Some(y)) => pending.push((Foot::Right, y.to_string(), Foot::Left, tf.clone())),
            (None, None) => constraints.push((tf.clone(), tg.clone())),
        }
    }
    let mut bindings: BTreeMap<usize, Vec<(Foot, Term)>> = BTreeMap::new();
    for (foot, name, def_foot, template) in pending {
        let root = ops.root(foot, &name);
        bindings.entry(root).or_default().push((def_foot, template));
    }

    // variables
    let mut vars = Items::new(a.vars().keys(), b.vars().keys());
    for v in k.vars().keys() {
        vars.union((Foot::Left, &f.var_map()[v]), (Foot::Right, &g.var_map()[v]));
    }

    // names: unbound operation classes and variable classes share a namespace
    let op_classes = ops.classes();
    let var_classes = vars.classes();
    let mut named: Vec<Vec<Tagged>> = Vec::new();
    let mut owners: Vec<(bool, usize)> = Vec::new();
    for (root, members) in &op_classes {
        if !bindings.contains_key(root) {
            named.push(members.clone());
            owners.push((true, *root));
        }
    }
    for (root, members) in &var_classes {
        named.push(members.clone());
        owners.push((false, *root));
    }
    let mut taken = BTreeSet::new();
    let class_names = name_classes(&named, &mut taken);
    let feet = [a, b];
    let mut vertex_ops = BTreeMap::new();
    let mut vertex_vars = BTreeMap::new();
    let mut names = BTreeMap::new();
    let mut var_names = BTreeMap::new();
    for ((is_op, root), name) in owners.iter().zip(class_names) {
        if *is_op {
            let members = &op_classes[root];
            let decl_of = |(foot, op): &Tagged| {
                let d = &feet[foot_index(*foot)].ops()[op];
                let args: Vec<String> = d.args.iter().map(|s| sort_names[&(*foot, s.clone())].clone()).collect();
                OpDecl {
                    args,
                    result: sort_names[&(*foot, d.result.clone())].clone(),
                    infix: d.infix,
                }
            };
            let rep = members.iter().min().expect("non-empty class");
            let decl = decl_of(rep);
            for m in members {
                let other = decl_of(m);
                if other.args != decl.args || other.result != decl.result {
                    return Err(Error::LabelClash(format!(
                        "operations `{}` and `{}` are glued but have different types",
                        rep.1, m.1
                    )));
                }
            }
            vertex_ops.insert(name.clone(), decl);
            names.insert(*root, name);
        } else {
            let members = &var_classes[root];
            let sort_of = |(foot, v): &Tagged| sort_names[&(*foot, feet[foot_index(*foot)].vars()[v].clone())].clone();
            let sort = sort_of(&members[0]);
            if members.iter().any(|m| sort_of(m) != sort) {
                return Err(Error::LabelClash(format!("variable `{}` glued across sorts", members[0].1)));
            }
            for m in members {
                var_names.insert(m.clone(), name.clone());
            }
            vertex_vars.insert(name, sort);
        }
    }

    let mut builder = Builder {
        feet,
        ops,
        sort_names,
        bindings,
        names,
        var_names,
        resolved: BTreeMap::new(),
        visiting: BTreeSet::new(),
    };
    for (tf, tg) in constraints {
        if builder.translate(Foot::Left, &tf)? != builder.translate(Foot::Right, &tg)? {
            return Err(Error::GluingConflict(
                "an interface operation has two different derived images".into(),
            ));
        }
    }

    let mut terms = BTreeSet::new();
    let mut equations = BTreeSet::new();
    for foot in [Foot::Left, Foot::Right] {
        let spec = builder.feet[foot_index(foot)];
        for t in spec.term_closure() {
            terms.insert(builder.translate(foot, &t)?);
        }
        for e in spec.equations() {
            let l = builder.translate(foot, e.lhs())?;
            let r = builder.translate(foot, e.rhs())?;
            equations.insert(super::term::Equation::new(l, r));
        }
    }
    let vertex_sorts: BTreeSet<String> = sort_class_names_set(&builder.sort_names);
    let vertex = Arc::new(EqSpec::new(vertex_sorts, vertex_ops, vertex_vars, terms, equations)?);

    let mut injections = Vec::new();
    for foot in [Foot::Left, Foot::Right] {
        let spec = builder.feet[foot_index(foot)];
        let sorts_map = spec
            .sorts()
            .iter()
            .map(|s| (s.clone(), builder.sort_names[&(foot, s.clone())].clone()))
            .collect();
        let mut ops_map = BTreeMap::new();
        for (o, d) in spec.ops() {
            let template = builder.translate(foot, &Term::simple_template(o.clone(), d.arity()))?;
            ops_map.insert(o.clone(), template);
        }
        let vars_map = spec
            .vars()
            .keys()
            .map(|v| (v.clone(), builder.var_names[&(foot, v.clone())].clone()))
            .collect();
        let source = if foot == Foot::Left { f.codomain_arc() } else { g.codomain_arc() };
        injections.push(SpecMorphism::from_arcs(source.clone(), vertex.clone(), sorts_map, ops_map, vars_map)?);
    }
    let right = injections.pop().expect("two injections");
    let left = injections.pop().expect("two injections");
    let cocone = Cospan::new(left, right)?;
    Ok(Pushout {
        span: span.clone(),
        cocone,
    })
}

fn sort_class_names_set(names: &BTreeMap<Tagged, String>) -> BTreeSet<String> {
    names.values().cloned().collect()
}

fn merge<V: PartialEq + Clone>(map: &mut BTreeMap<String, V>, key: &str, value: &V) -> bool {
    match map.get(key) {
        Some(existing) => existing == value,
        None => {
            map.insert(key.to_string(), value.clone());
            true
        }
    }
}

pub(crate) fn spec_mediate(
    pushout: &Pushout<SpecMorphism>,
    cocone: &Cospan<SpecMorphism>,
) -> Result<Option<SpecMorphism>> {
    let (inj_a, inj_b) = (pushout.inject_left(), pushout.inject_right());
    let (p, q) = (cocone.left(), cocone.right());
    if p.domain() != inj_a.domain() || q.domain() != inj_b.domain() {
        return Err(Error::CospanMismatch);
    }
    let mut sorts = BTreeMap::new();
    let mut ops = BTreeMap::new();
    let mut vars = BTreeMap::new();
    for (inj, leg) in [(inj_a, p), (inj_b, q)] {
        for (s, image) in inj.sort_map() {
            if !merge(&mut sorts, image, &leg.sort_map()[s]) {
                return Ok(None);
            }
        }
        for (o, template) in inj.op_map() {
            if let Some(name) = template.as_simple_template() {
                if !merge(&mut ops, name, &leg.op_map()[o]) {
                    return Ok(None);
                }
            }
        }
        for (v, image) in inj.var_map() {
            if !merge(&mut vars, image, &leg.var_map()[v]) {
                return Ok(None);
            }
        }
    }
    let Ok(u) = SpecMorphism::from_arcs(
        pushout.cocone.left().codomain_arc().clone(),
        p.codomain_arc().clone(),
        sorts,
        ops,
        vars,
    ) else {
        return Ok(None);
    };
    if inj_a.then(&u)? != *p || inj_b.then(&u)? != *q {
        return Ok(None);
    }
    Ok(Some(u))
}

pub(crate) fn spec_is_iso(m: &SpecMorphism) -> bool {
    let (dom, cod) = (m.domain(), m.codomain());
    let injective = |images: Vec<&String>, target: usize| {
        let set: BTreeSet<_> = images.iter().collect();
        set.len() == images.len() && set.len() == target
    };
    if !m.is_simple()
        || !injective(m.sort_map().values().collect(), cod.sorts().len())
        || !injective(m.var_map().values().collect(), cod.vars().len())
    {
        return false;
    }
    let op_names: Vec<&String> = m.op_map().values().filter_map(|t| match t {
        Term::App(name, _) => Some(name),
        Term::Var(_) => None,
    }).collect();
    if !injective(op_names, cod.ops().len()) {
        return false;
    }
    let closure: BTreeSet<Term> = dom.term_closure().iter().map(|t| m.map_term(t)).collect();
    let equations: BTreeSet<_> = dom.equations().iter().map(|e| m.map_equation(e)).collect();
    closure == cod.term_closure() && &equations == cod.equations()
}

impl Gluing for SpecMorphism {
    fn pushout(span: &Span<Self>) -> Result<Pushout<Self>> {
        spec_pushout(span)
    }

    fn mediate(pushout: &Pushout<Self>, cocone: &Cospan<Self>) -> Result<Option<Self>> {
        spec_mediate(pushout, cocone)
    }

    fn is_iso(&self) -> bool {
        spec_is_iso(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colimit::{pushout, verify_pushout};

    fn spec(s: &str) -> EqSpec {
        EqSpec::parse(s).unwrap()
    }

    fn incl(a: &EqSpec, b: &EqSpec) -> SpecMorphism {
        SpecMorphism::inclusion(a, b).unwrap()
    }

    const K: &str = "SORTS T\nOPS\nx z : -> T\nTERMS\nx\nz\n";
    const H: &str = "SORTS T\nOPS\nx y z : -> T\nEQNS\nx == y\ny == z\n";
    const C: &str = "SORTS T\nOPS\nx z : -> T\nEQNS\nx == z\n";

    #[test]
    fn transitivity_vertex() {
        let (k, h, c) = (spec(K), spec(H), spec(C));
        let po = pushout(&Span::new(incl(&k, &h), incl(&k, &c)).unwrap()).unwrap();
        let expected = spec("SORTS T\nOPS\nx y z : -> T\nEQNS\nx == y\ny == z\nx == z\n");
        assert_eq!(po.vertex(), &expected);
        assert!(verify_pushout(&po.square()).unwrap());
    }

    #[test]
    fn identity_span() {
        let h = spec(H);
        let po = pushout(&Span::<SpecMorphism>::identity(&h)).unwrap();
        assert_eq!(po.vertex(), &h);
        assert!(po.inject_left().is_iso());
    }

    #[test]
    fn unshared_names_are_qualified_only_on_clash() {
        let k = spec("SORTS T\n");
        let a = spec("SORTS T\nOPS\nc : -> T\n");
        let po = pushout(&Span::new(incl(&k, &a), incl(&k, &a)).unwrap()).unwrap();
        let ops: Vec<_> = po.vertex().ops().keys().cloned().collect();
        assert_eq!(ops, vec!["c".to_string(), "r.c".to_string()]);
    }

    #[test]
    fn derived_images_eliminate_operations() {
        let nat = spec("SORTS N\nOPS\n0 : -> N\ns : N -> N\n_+_ : N N -> N\nVARS\nx y : N\nEQNS\n0 + y == y\n");
        let k = spec("SORTS T\nOPS\nu : T -> T\na : -> T\nTERMS\nu(a)\n");
        let c = spec("SORTS T\nOPS\nu : T -> T\na : -> T\nb : -> T\nEQNS\nu(a) == b\n");
        let inst = SpecMorphism::parse(&k, &nat, "SORTMAP\nT |-> N\nOPMAP\nu |-> 0 + ?1\na |-> s(0)\n");
        // `0 + s(0)` is not yet a term of nat
        assert!(inst.is_err());
        let nat = nat.with_terms([nat.parse_term("0 + s(0)").unwrap()]).unwrap();
        let inst = SpecMorphism::parse(&k, &nat, "SORTMAP\nT |-> N\nOPMAP\nu |-> 0 + ?1\na |-> s(0)\n").unwrap();
        let po = pushout(&Span::new(inst, incl(&k, &c)).unwrap()).unwrap();
        let v = po.vertex();
        assert_eq!(v.ops().len(), 4);
        assert!(v.ops().contains_key("b"));
        assert!(v.equations().contains(&v.parse_equation("0 + s(0) == b").unwrap()));
        assert!(verify_pushout(&po.square()).unwrap());
    }

    #[test]
    fn conflicting_definitions_are_rejected() {
        let k = spec("SORTS T\nOPS\na b : -> T\nTERMS\na\nb\n");
        let nat = spec("SORTS N\nOPS\n0 : -> N\ns : N -> N\nTERMS\ns(0)\n");
        let left = SpecMorphism::parse(&k, &nat, "SORTMAP\nT |-> N\nOPMAP\na |-> 0\nb |-> s(0)\n").unwrap();
        let glued = spec("SORTS T\nOPS\nc : -> T\nTERMS\nc\n");
        let right = SpecMorphism::parse(&k, &glued, "OPMAP\na |-> c\nb |-> c\n").unwrap();
        let err = pushout(&Span::new(left, right).unwrap()).unwrap_err();
        assert!(matches!(err, Error::GluingConflict(_)), "{err}");
    }

    #[test]
    fn extra_equation_breaks_pushout() {
        let (k, h, c) = (spec(K), spec(H), spec(C));
        let po = pushout(&Span::new(incl(&k, &h), incl(&k, &c)).unwrap()).unwrap();
        let bigger = po.vertex().with_equations([po.vertex().parse_equation("x == x").unwrap()]).unwrap();
        assert_eq!(&bigger, po.vertex());
        let extra = po.vertex().with_terms([Term::constant("y")]).unwrap();
        assert_eq!(&extra, po.vertex());
        let wider = EqSpec::new(
            ["T".to_string(), "U".to_string()].into(),
            po.vertex().ops().clone(),
            Default::default(),
            po.vertex().terms().clone(),
            po.vertex().equations().clone(),
        )
        .unwrap();
        let square = crate::Square::from_sides(
            incl(&k, &h),
            incl(&k, &c),
            incl(&h, &wider),
            incl(&c, &wider),
        )
        .unwrap();
        assert!(!verify_pushout(&square).unwrap());
    }
}
