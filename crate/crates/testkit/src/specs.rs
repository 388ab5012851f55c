use std::collections::{BTreeMap, BTreeSet};

use pleo::eqlogic::{is_pleomorphism, EqSpec, Equation, Model, OpDecl, SpecMorphism, Term};
use pleo::{Arrow, Cospan, Pushout};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::Rng;

pub fn nat() -> EqSpec {
    EqSpec::parse(pleo::fixtures::NAT).unwrap()
}

/// Value of a ground `0/s/+` term in the naturals.
pub fn nat_value(t: &Term) -> u64 {
    match t {
        Term::App(op, args) => match (op.as_str(), args.as_slice()) {
            ("0", []) => 0,
            ("s", [a]) => nat_value(a) + 1,
            ("+", [a, b]) => nat_value(a) + nat_value(b),
            _ => panic!("not a numeral term: {t:?}"),
        },
        Term::Var(_) => panic!("not ground: {t:?}"),
    }
}

/// Every ground `0/s/+` term with at most `max_size` symbols.
pub fn ground_terms(max_size: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1].push(Term::constant("0"));
    }
    for size in 2..=max_size {
        let mut out = Vec::new();
        for t in &by_size[size - 1] {
            out.push(Term::app("s", vec![t.clone()]));
        }
        for left in 1..size - 1 {
            let right = size - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    out.push(Term::app("+", vec![a.clone(), b.clone()]));
                }
            }
        }
        by_size[size] = out;
    }
    by_size.into_iter().flatten().collect()
}

/// The integers modulo `n` as a model of `NAT`.
pub fn modular(n: u64) -> Model {
    let carrier: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let nat = nat();
    Model::tabulate(&nat, BTreeMap::from([("N".to_string(), carrier)]), |op, args| {
        let v: Vec<u64> = args.iter().map(|a| a.parse().unwrap()).collect();
        match op {
            "0" => 0,
            "s" => (v[0] + 1) % n,
            "+" => (v[0] + v[1]) % n,
            _ => unreachable!(),
        }
        .to_string()
    })
    .unwrap()
}

/// Random `(spec, goal, model)`: `NAT` plus a few ground equations that hold
/// in the model, and an arbitrary ground goal.
pub fn random_triple(rng: &mut Rng, pool: &[Term]) -> (EqSpec, Equation, Model, u64) {
    let n = *[2u64, 3].choose(rng).unwrap();
    let model = modular(n);
    let extra = rng.gen_range(0..=2);
    let mut eqs = Vec::new();
    while eqs.len() < extra {
        let (a, b) = (pool.choose(rng).unwrap(), pool.choose(rng).unwrap());
        if nat_value(a) % n == nat_value(b) % n && a != b {
            eqs.push(Equation::new(a.clone(), b.clone()));
        }
    }
    let spec = nat().with_equations(eqs).unwrap();
    let goal = Equation::new(pool.choose(rng).unwrap().clone(), pool.choose(rng).unwrap().clone());
    (spec, goal, model, n)
}

/// `A` and `B` glued along `K` when both legs are inclusions and nothing
/// outside `K` shares a name: the plain union.
pub fn union(a: &EqSpec, b: &EqSpec) -> EqSpec {
    let mut ops: BTreeMap<String, OpDecl> = a.ops().clone();
    ops.extend(b.ops().clone());
    let mut vars = a.vars().clone();
    vars.extend(b.vars().clone());
    EqSpec::new(
        a.sorts().union(b.sorts()).cloned().collect(),
        ops,
        vars,
        a.term_closure().union(&b.term_closure()).cloned().collect(),
        a.equations().union(b.equations()).cloned().collect(),
    )
    .unwrap()
}

/// Small specs over one sort `T` for pushout enumeration: a base `K` and
/// extensions with fresh constants, unary operations and equations.
pub fn random_inclusion_span(rng: &mut Rng) -> (EqSpec, EqSpec, EqSpec) {
    let base_ops = ["c", "f"];
    let k_ops: Vec<&str> = base_ops.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
    let k = small_spec(&k_ops, &[], rng);
    let grow = |prefix: &str, rng: &mut Rng| {
        let mut ops = k_ops.clone();
        let extra = [format!("{prefix}1"), format!("{prefix}2")];
        let chosen: Vec<String> = extra.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
        let leaked: Vec<&str> = chosen.iter().map(String::as_str).collect();
        ops.extend(leaked.iter().copied());
        let eqs = random_equations(&ops, rng);
        let mut spec = small_spec(&ops, &eqs, rng);
        spec = spec.with_equations(k.equations().iter().cloned()).unwrap();
        spec
    };
    let a = grow("a", rng);
    let b = grow("b", rng);
    (k, a, b)
}

fn decl(name: &str) -> OpDecl {
    // names starting with `f` (or ending in `2`) are unary
    if name.starts_with('f') || name.ends_with('2') {
        OpDecl::new(vec!["T".into()], "T")
    } else {
        OpDecl::new(vec![], "T")
    }
}

fn constants<'a>(ops: &[&'a str]) -> Vec<&'a str> {
    ops.iter().copied().filter(|o| decl(o).arity() == 0).collect()
}

fn random_equations(ops: &[&str], rng: &mut Rng) -> Vec<Equation> {
    let consts = constants(ops);
    let unary: Vec<&str> = ops.iter().copied().filter(|o| decl(o).arity() == 1).collect();
    let mut out = Vec::new();
    if consts.is_empty() {
        return out;
    }
    let term = |rng: &mut Rng| {
        let c = Term::constant(*consts.choose(rng).unwrap());
        match unary.choose(rng) {
            Some(f) if rng.gen_bool(0.5) => Term::app(*f, vec![c]),
            _ => c,
        }
    };
    for _ in 0..rng.gen_range(0..=1) {
        let (a, b) = (term(rng), term(rng));
        if a != b {
            out.push(Equation::new(a, b));
        }
    }
    out
}

fn small_spec(ops: &[&str], eqs: &[Equation], _rng: &mut Rng) -> EqSpec {
    let consts = constants(ops);
    let terms: BTreeSet<Term> = consts.iter().map(|c| Term::constant(*c)).collect();
    EqSpec::new(
        BTreeSet::from(["T".to_string()]),
        ops.iter().map(|o| (o.to_string(), decl(o))).collect(),
        BTreeMap::new(),
        terms,
        eqs.iter().cloned().collect(),
    )
    .unwrap()
}

/// Candidate morphisms `dom -> cod` for exhaustive searches: sorts by any
/// function, operations to operations of the same shape or (constants) to
/// any term of the codomain's closure, variables to variables. Only the
/// valid ones are returned.
pub fn candidate_morphisms(dom: &EqSpec, cod: &EqSpec) -> Vec<SpecMorphism> {
    let closure: Vec<Term> = cod.term_closure().into_iter().filter(Term::is_ground).collect();
    let mut out = Vec::new();
    let dom_sorts: Vec<&String> = dom.sorts().iter().collect();
    let cod_sorts: Vec<&String> = cod.sorts().iter().collect();
    for sort_choice in product(dom_sorts.len(), cod_sorts.len()) {
        let sorts: BTreeMap<String, String> =
            dom_sorts.iter().zip(&sort_choice).map(|(a, &i)| ((*a).clone(), cod_sorts[i].clone())).collect();
        let mut op_pools: Vec<(String, Vec<Term>)> = Vec::new();
        for (name, d) in dom.ops() {
            let want_args: Vec<&String> = d.args.iter().map(|a| &sorts[a]).collect();
            let mut pool: Vec<Term> = cod
                .ops()
                .iter()
                .filter(|(_, e)| e.result == sorts[&d.result] && e.args.iter().collect::<Vec<_>>() == want_args)
                .map(|(o, e)| Term::simple_template(o.clone(), e.arity()))
                .collect();
            if d.arity() == 0 {
                for t in &closure {
                    if cod.sort_of(t).ok().as_ref() == Some(&sorts[&d.result]) && !pool.contains(t) {
                        pool.push(t.clone());
                    }
                }
            }
            op_pools.push((name.clone(), pool));
        }
        let var_pools: Vec<(String, Vec<String>)> = dom
            .vars()
            .iter()
            .map(|(v, s)| {
                (v.clone(), cod.vars().iter().filter(|(_, t)| **t == sorts[s]).map(|(w, _)| w.clone()).collect())
            })
            .collect();
        let op_sizes: Vec<usize> = op_pools.iter().map(|(_, p)| p.len()).collect();
        let var_sizes: Vec<usize> = var_pools.iter().map(|(_, p)| p.len()).collect();
        for op_choice in mixed_product(&op_sizes) {
            let ops: BTreeMap<String, Term> =
                op_pools.iter().zip(&op_choice).map(|((n, p), &i)| (n.clone(), p[i].clone())).collect();
            for var_choice in mixed_product(&var_sizes) {
                let vars: BTreeMap<String, String> =
                    var_pools.iter().zip(&var_choice).map(|((n, p), &i)| (n.clone(), p[i].clone())).collect();
                if let Ok(m) = SpecMorphism::new(dom.clone(), cod.clone(), sorts.clone(), ops.clone(), vars) {
                    out.push(m);
                }
            }
        }
    }
    out
}

fn product(len: usize, base: usize) -> Vec<Vec<usize>> {
    mixed_product(&vec![base; len])
}

fn mixed_product(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Every morphism out of the pushout vertex (among the candidates) that
/// commutes with both legs of `cocone`.
pub fn brute_mediators(po: &Pushout<SpecMorphism>, cocone: &Cospan<SpecMorphism>) -> Vec<SpecMorphism> {
    candidate_morphisms(po.vertex(), cocone.vertex())
        .into_iter()
        .filter(|m| {
            po.inject_left().then(m).ok().as_ref() == Some(cocone.left())
                && po.inject_right().then(m).ok().as_ref() == Some(cocone.right())
        })
        .collect()
}

/// The smallest number of `target`'s equations outside `required` that,
/// added to the signature, `terms` and `required`, give a kernel whose
/// inclusion verifies. Tries subsets by increasing size.
pub fn exhaustive_min_kernel(
    target: &EqSpec,
    terms: &BTreeSet<Term>,
    required: &BTreeSet<Equation>,
    depth: usize,
) -> Option<(usize, Vec<BTreeSet<Equation>>)> {
    let optional: Vec<&Equation> = target.equations().iter().filter(|e| !required.contains(e)).collect();
    assert!(optional.len() <= 8, "exhaustive search is capped at eight equations");
    for size in 0..=optional.len() {
        let mut winners = Vec::new();
        for mask in 0u32..(1 << optional.len()) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let mut eqs = required.clone();
            eqs.extend((0..optional.len()).filter(|i| mask & (1 << i) != 0).map(|i| optional[i].clone()));
            let Ok(kernel) = target.with_content(terms.clone(), eqs.clone()) else { continue };
            let Ok(incl) = SpecMorphism::inclusion(&kernel, target) else { continue };
            if is_pleomorphism(&incl, depth, None).unwrap().is_verified() {
                winners.push(eqs);
            }
        }
        if !winners.is_empty() {
            return Some((size, winners));
        }
    }
    None
}
