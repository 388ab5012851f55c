//! Bounded derivability: ground congruence closure over the presentation's
//! terms, fed with axiom instances in rounds. Variables are rigid
//! constants, so a goal with variables is proved for arbitrary values.
//!
//! Round 0 adds every axiom as stated. Round `r > 0` substitutes, for each
//! axiom variable, the representative (smallest member) of every class of
//! the right sort, as the classes stood at the start of the round. Running
//! to depth `d` is a prefix of running to depth `d + 1`, so verdicts are
//! monotone in depth.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::spec::EqSpec;
use super::term::{Equation, Term};
use crate::error::Result;

/// Closure size beyond which a run gives up with [`Derivation::Unknown`].
pub const TERM_LIMIT: usize = 20_000;
/// Instances tried per run beyond which the run gives up.
pub const INSTANCE_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomInstance {
    pub axiom: Equation,
    pub substitution: BTreeMap<String, Term>,
    pub instance: Equation,
}

/// A proof: the axiom instances which, closed under reflexivity, symmetry,
/// transitivity and congruence, put both sides of `goal` in one class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationTrace {
    pub goal: Equation,
    /// Round in which the goal was first proved.
    pub depth: usize,
    pub instances: Vec<AxiomInstance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Derivation {
    Verified(DerivationTrace),
    Unknown { goal: Equation, reason: String },
}

impl Derivation {
    pub fn is_verified(&self) -> bool {
        matches!(self, Derivation::Verified(_))
    }

    pub fn goal(&self) -> &Equation {
        match self {
            Derivation::Verified(t) => &t.goal,
            Derivation::Unknown { goal, .. } => goal,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Head {
    Var(String),
    Op(String),
}

/// Hash-consed congruence closure with use lists.
struct Egraph {
    keys: Vec<(Head, Vec<usize>)>,
    terms: Vec<Term>,
    sorts: Vec<String>,
    parent: Vec<usize>,
    uses: Vec<Vec<usize>>,
    memo: HashMap<(Head, Vec<usize>), usize>,
    pending: Vec<usize>,
}

impl Egraph {
    fn new() -> Self {
        Self {
            keys: Vec::new(),
            terms: Vec::new(),
            sorts: Vec::new(),
            parent: Vec::new(),
            uses: Vec::new(),
            memo: HashMap::new(),
            pending: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn add(&mut self, spec: &EqSpec, t: &Term) -> usize {
        let (head, args, sort) = match t {
            Term::Var(v) => (Head::Var(v.clone()), Vec::new(), spec.vars().get(v).cloned()),
            Term::App(op, args) => {
                let ids: Vec<usize> = args.iter().map(|a| self.add(spec, a)).collect();
                (Head::Op(op.clone()), ids, spec.ops().get(op).map(|d| d.result.clone()))
            }
        };
        let args: Vec<usize> = args.into_iter().map(|a| self.find(a)).collect();
        let key = (head, args);
        if let Some(&id) = self.memo.get(&key) {
            return self.find(id);
        }
        let id = self.keys.len();
        for &a in &key.1 {
            self.uses[a].push(id);
        }
        self.keys.push(key.clone());
        self.terms.push(t.clone());
        self.sorts.push(sort.unwrap_or_default());
        self.parent.push(id);
        self.uses.push(Vec::new());
        self.memo.insert(key, id);
        id
    }

    /// Merges two classes and restores congruence. Returns whether they
    /// were distinct.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.uses[ra].len() < self.uses[rb].len() {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        let moved = std::mem::take(&mut self.uses[rb]);
        self.pending.extend(moved.iter().copied());
        self.uses[ra].extend(moved);
        while let Some(node) = self.pending.pop() {
            let (head, args) = self.keys[node].clone();
            let key = (head, args.into_iter().map(|a| self.find(a)).collect::<Vec<_>>());
            match self.memo.get(&key).copied() {
                Some(other) => {
                    let (x, y) = (self.find(other), self.find(node));
                    if x != y {
                        self.union(x, y);
                    }
                }
                None => {
                    self.memo.insert(key, node);
                }
            }
        }
        true
    }

    /// Smallest member of every class, grouped by sort, in term order.
    fn representatives(&mut self) -> BTreeMap<String, Vec<Term>> {
        let mut best: BTreeMap<usize, usize> = BTreeMap::new();
        for id in 0..self.len() {
            let root = self.find(id);
            let key = |i: usize| (self.terms[i].size(), &self.terms[i]);
            match best.get(&root) {
                Some(&cur) if key(cur) <= key(id) => {}
                _ => {
                    best.insert(root, id);
                }
            }
        }
        let mut out: BTreeMap<String, Vec<Term>> = BTreeMap::new();
        for id in best.into_values() {
            out.entry(self.sorts[id].clone()).or_default().push(self.terms[id].clone());
        }
        for reps in out.values_mut() {
            reps.sort_by(|a, b| a.size().cmp(&b.size()).then(a.cmp(b)));
        }
        out
    }
}

fn axioms(spec: &EqSpec) -> Vec<(Equation, Vec<(String, String)>)> {
    spec.sorted_equations()
        .into_iter()
        .map(|e| {
            let vars = e.vars().into_iter().map(|v| (v.clone(), spec.vars()[&v].clone())).collect();
            (e.clone(), vars)
        })
        .collect()
}

fn seed(spec: &EqSpec, goals: &[Equation]) -> Egraph {
    let mut g = Egraph::new();
    for t in spec.term_closure() {
        g.add(spec, &t);
    }
    for e in goals {
        g.add(spec, e.lhs());
        g.add(spec, e.rhs());
    }
    g
}

fn holds(g: &mut Egraph, spec: &EqSpec, goal: &Equation) -> bool {
    let (a, b) = (g.add(spec, goal.lhs()), g.add(spec, goal.rhs()));
    g.find(a) == g.find(b)
}

/// Adds an instance; returns whether it merged anything.
fn assert_instance(g: &mut Egraph, spec: &EqSpec, e: &Equation) -> bool {
    let (a, b) = (g.add(spec, e.lhs()), g.add(spec, e.rhs()));
    g.union(a, b)
}

struct Run {
    proofs: Vec<Option<(usize, usize)>>,
    instances: Vec<AxiomInstance>,
    stopped: Option<String>,
}

fn run(spec: &EqSpec, goals: &[Equation], depth: usize) -> Run {
    let axioms = axioms(spec);
    let mut g = seed(spec, goals);
    let mut out = Run {
        proofs: vec![None; goals.len()],
        instances: Vec::new(),
        stopped: None,
    };
    let mut tried = 0usize;
    let check = |g: &mut Egraph, out: &mut Run, round: usize| {
        for (i, goal) in goals.iter().enumerate() {
            if out.proofs[i].is_none() && holds(g, spec, goal) {
                out.proofs[i] = Some((round, out.instances.len()));
            }
        }
        out.proofs.iter().all(Option::is_some)
    };
    if check(&mut g, &mut out, 0) {
        return out;
    }
    for round in 0..=depth {
        let reps = g.representatives();
        for (axiom, vars) in &axioms {
            let pools: Vec<&[Term]> = vars
                .iter()
                .map(|(_, sort)| reps.get(sort).map_or(&[][..], Vec::as_slice))
                .collect();
            if round > 0 && (vars.is_empty() || pools.iter().any(|p| p.is_empty())) {
                continue;
            }
            let mut choice = vec![0usize; vars.len()];
            loop {
                let substitution: BTreeMap<String, Term> = if round == 0 {
                    vars.iter().map(|(v, _)| (v.clone(), Term::var(v.clone()))).collect()
                } else {
                    vars.iter()
                        .zip(&choice)
                        .zip(&pools)
                        .map(|(((v, _), &c), pool)| (v.clone(), pool[c].clone()))
                        .collect()
                };
                let instance = axiom.substitute(&substitution);
                tried += 1;
                if assert_instance(&mut g, spec, &instance) {
                    out.instances.push(AxiomInstance {
                        axiom: axiom.clone(),
                        substitution,
                        instance,
                    });
                    if check(&mut g, &mut out, round) {
                        return out;
                    }
                }
                if g.len() > TERM_LIMIT {
                    out.stopped = Some(format!("closure exceeded {TERM_LIMIT} terms in round {round}"));
                    return out;
                }
                if tried > INSTANCE_LIMIT {
                    out.stopped = Some(format!("more than {INSTANCE_LIMIT} instances tried in round {round}"));
                    return out;
                }
                if round == 0 || !advance(&mut choice, &pools) {
                    break;
                }
            }
        }
    }
    out
}

fn advance(choice: &mut [usize], pools: &[&[Term]]) -> bool {
    for i in (0..choice.len()).rev() {
        choice[i] += 1;
        if choice[i] < pools[i].len() {
            return true;
        }
        choice[i] = 0;
    }
    false
}

/// Checks that `instances` are instances of `spec`'s axioms and that they
/// prove `goal`.
pub fn replay_instances(spec: &EqSpec, goal: &Equation, instances: &[AxiomInstance]) -> bool {
    let mut g = seed(spec, std::slice::from_ref(goal));
    for inst in instances {
        if !spec.equations().contains(&inst.axiom) || inst.axiom.substitute(&inst.substitution) != inst.instance {
            return false;
        }
        assert_instance(&mut g, spec, &inst.instance);
    }
    holds(&mut g, spec, goal)
}

pub fn replay(spec: &EqSpec, trace: &DerivationTrace) -> bool {
    replay_instances(spec, &trace.goal, &trace.instances)
}

const GREEDY_LIMIT: usize = 48;

fn minimize(spec: &EqSpec, goal: &Equation, mut instances: Vec<AxiomInstance>) -> Vec<AxiomInstance> {
    if instances.len() > GREEDY_LIMIT {
        return instances;
    }
    let mut i = instances.len();
    while i > 0 {
        i -= 1;
        let removed = instances.remove(i);
        if !replay_instances(spec, goal, &instances) {
            instances.insert(i, removed);
        }
    }
    instances
}

/// Decides each goal within `depth` rounds, sharing one closure.
pub fn derivable_all(spec: &EqSpec, goals: &[Equation], depth: usize) -> Result<Vec<Derivation>> {
    for g in goals {
        spec.equation_sort(g)?;
    }
    let r = run(spec, goals, depth);
    Ok(goals
        .iter()
        .zip(r.proofs)
        .map(|(goal, proof)| match proof {
            Some((round, used)) => Derivation::Verified(DerivationTrace {
                goal: goal.clone(),
                depth: round,
                instances: minimize(spec, goal, r.instances[..used].to_vec()),
            }),
            None => Derivation::Unknown {
                goal: goal.clone(),
                reason: r
                    .stopped
                    .clone()
                    .unwrap_or_else(|| format!("not derivable within depth {depth}")),
            },
        })
        .collect())
}

pub fn derivable(spec: &EqSpec, goal: &Equation, depth: usize) -> Result<Derivation> {
    Ok(derivable_all(spec, std::slice::from_ref(goal), depth)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: &str = "SORTS N\nOPS\n0 : -> N\ns : N -> N\n_+_ : N N -> N\nVARS\nx y : N\nEQNS\n0 + y == y\ns(x) + y == s(x + y)\n";

    fn nat() -> EqSpec {
        EqSpec::parse(NAT).unwrap()
    }

    #[test]
    fn reflexivity_at_depth_zero() {
        let n = nat();
        let goal = n.parse_equation("s(0) == s(0)").unwrap();
        let d = derivable(&n, &goal, 0).unwrap();
        assert!(d.is_verified());
        let Derivation::Verified(t) = d else { unreachable!() };
        assert!(t.instances.is_empty());
    }

    #[test]
    fn one_plus_one() {
        let n = nat();
        let lemma = n.parse_equation("s(0) + s(0) == s(0 + s(0))").unwrap();
        let Derivation::Verified(t) = derivable(&n, &lemma, 1).unwrap() else {
            panic!("lemma not derived")
        };
        assert_eq!(t.instances.len(), 1);
        assert!(replay(&n, &t));

        let goal = n.parse_equation("s(0) + s(0) == s(s(0))").unwrap();
        let Derivation::Verified(t) = derivable(&n, &goal, 2).unwrap() else {
            panic!("goal not derived")
        };
        assert_eq!(t.instances.len(), 2);
        assert!(replay(&n, &t));
        assert!(!replay_instances(&n, &goal, &t.instances[..1]));
    }

    #[test]
    fn axioms_hold_with_rigid_variables() {
        let n = nat();
        let goal = n.parse_equation("s(x) + y == s(x + y)").unwrap();
        assert!(derivable(&n, &goal, 0).unwrap().is_verified());
        let open = n.parse_equation("x + 0 == x").unwrap();
        assert!(!derivable(&n, &open, 2).unwrap().is_verified());
    }

    #[test]
    fn underivable_goal_is_unknown() {
        let n = nat();
        let goal = n.parse_equation("0 == s(0)").unwrap();
        for depth in 0..3 {
            assert!(!derivable(&n, &goal, depth).unwrap().is_verified());
        }
    }

    #[test]
    fn forged_traces_do_not_replay() {
        let n = nat();
        let goal = n.parse_equation("s(0) + s(0) == s(s(0))").unwrap();
        let Derivation::Verified(mut t) = derivable(&n, &goal, 2).unwrap() else {
            panic!()
        };
        t.instances[0].instance = n.parse_equation("s(0) + s(0) == s(s(0))").unwrap();
        assert!(!replay(&n, &t));
    }
}

