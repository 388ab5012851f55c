//! Union-find over the disjoint union of two feet, and deterministic naming
//! of the resulting classes.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.parent.len()
    }

    pub(crate) fn find(&mut self, mut item: usize) -> usize {
        let mut root = item;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[item] != root {
            let next = self.parent[item];
            self.parent[item] = root;
            item = next;
        }
        root
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] = self.rank[a].saturating_add(1);
        }
        true
    }

    /// Classes keyed by root, members in increasing index order.
    pub(crate) fn classes(&mut self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.len() {
            let r = self.find(i);
            out.entry(r).or_default().push(i);
        }
        out
    }
}

/// Which foot of a span an item comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Foot {
    Left,
    Right,
}

impl Foot {
    fn tag(self) -> &'static str {
        match self {
            Foot::Left => "l",
            Foot::Right => "r",
        }
    }
}

/// Item of a disjoint union: foot plus the item's name inside that foot.
pub(crate) type Tagged = (Foot, String);

/// Names each class after its least member (left foot first, then by name).
/// A bare name is kept when still free; otherwise the foot-qualified name is
/// used, with primes appended until it is unique.
pub(crate) fn name_classes(classes: &[Vec<Tagged>], taken: &mut BTreeSet<String>) -> Vec<String> {
    let mut order: Vec<usize> = (0..classes.len()).collect();
    let reps: Vec<Tagged> = classes
        .iter()
        .map(|c| c.iter().min().cloned().expect("empty class"))
        .collect();
    order.sort_by(|a, b| reps[*a].cmp(&reps[*b]));
    let mut names = vec![String::new(); classes.len()];
    for idx in order {
        let (foot, bare) = &reps[idx];
        let mut candidate = bare.clone();
        if taken.contains(&candidate) {
            candidate = format!("{}.{}", foot.tag(), bare);
            while taken.contains(&candidate) {
                candidate.push('\'');
            }
        }
        taken.insert(candidate.clone());
        names[idx] = candidate;
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_merges_transitively() {
        let mut ds = DisjointSets::new(5);
        ds.union(0, 1);
        ds.union(3, 4);
        ds.union(1, 4);
        assert_eq!(ds.find(0), ds.find(3));
        assert_ne!(ds.find(0), ds.find(2));
        assert_eq!(ds.classes().len(), 2);
    }

    #[test]
    fn naming_prefers_left_bare_names() {
        let classes = vec![
            vec![(Foot::Right, "a".to_string())],
            vec![(Foot::Left, "a".to_string())],
            vec![(Foot::Left, "b".to_string()), (Foot::Right, "c".to_string())],
        ];
        let names = name_classes(&classes, &mut BTreeSet::new());
        assert_eq!(names, vec!["r.a", "a", "b"]);
    }
}
