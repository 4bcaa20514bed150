//! Brute-force reference implementations for cross-checking.
//!
//! Everything here is deliberately independent of the rest of the crate: its
//! own tree representation (a parent table over integer indices), breadth
//! first search distances, direct norm maximisation over explicit value
//! tables, and integer-label iteration. Tests bridge between the two worlds
//! and compare results; no type or helper is shared in either direction.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::VecDeque;

/// A finite rooted tree as a parent table. Index 0 is the root; every other
/// index points to a strictly smaller parent index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTree {
    parents: Vec<usize>,
}

impl FiniteTree {
    /// Validates and wraps a parent table; `parents[0]` must be 0 and every
    /// later entry strictly smaller than its index.
    pub fn from_parents(parents: Vec<usize>) -> Option<FiniteTree> {
        if parents.is_empty() || parents[0] != 0 {
            return None;
        }
        for (i, p) in parents.iter().enumerate().skip(1) {
            if *p >= i {
                return None;
            }
        }
        Some(FiniteTree { parents })
    }

    pub fn single() -> FiniteTree {
        FiniteTree { parents: vec![0] }
    }

    pub fn vertex_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0 && v < self.parents.len()).then(|| self.parents[v])
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (1..self.parents.len())
            .filter(|&c| self.parents[c] == v)
            .collect()
    }

    pub fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while v != 0 {
            v = self.parents[v];
            d += 1;
        }
        d
    }

    /// Graph distance by breadth first search over the undirected edges.
    pub fn bfs_distance(&self, u: usize, v: usize) -> usize {
        if u == v {
            return 0;
        }
        let n = self.parents.len();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 1..n {
            adjacency[i].push(self.parents[i]);
            adjacency[self.parents[i]].push(i);
        }
        let mut dist = vec![usize::MAX; n];
        dist[u] = 0;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &y in &adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    if y == v {
                        return dist[y];
                    }
                    queue.push_back(y);
                }
            }
        }
        unreachable!("trees are connected");
    }
}

/// All rooted trees on exactly `n` labelled vertices in parent-table form:
/// vertex `i` picks any parent below it, `(n-1)!` trees in all. Lazy, so
/// large counts stream instead of materialising.
pub fn enumerate_trees(n: usize) -> impl Iterator<Item = FiniteTree> {
    assert!((1..=12).contains(&n), "enumeration is meant for tiny trees");
    let mut choice: Vec<usize> = vec![0; n];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let tree = FiniteTree {
            parents: choice.clone(),
        };
        // Odometer over parent choices: digit i counts 0..i.
        let mut i = n.saturating_sub(1);
        loop {
            if i == 0 {
                done = true;
                break;
            }
            if choice[i] + 1 < i {
                choice[i] += 1;
                break;
            }
            choice[i] = 0;
            i -= 1;
        }
        Some(tree)
    })
}

/// Every tree with between 1 and `max` vertices.
pub fn enumerate_small_trees(max: usize) -> impl Iterator<Item = FiniteTree> {
    (1..=max).flat_map(enumerate_trees)
}

/// The squared Lipschitz norm of an explicit value table: the largest of
/// the squared root value and the squared moduli of the edge increments.
/// Exact rational arithmetic throughout; squares avoid any square root.
pub fn brute_lip_norm_sq(tree: &FiniteTree, values: &[(BigRational, BigRational)]) -> BigRational {
    assert_eq!(values.len(), tree.vertex_count());
    let norm_sq = |re: &BigRational, im: &BigRational| re * re + im * im;
    let mut best = norm_sq(&values[0].0, &values[0].1);
    for v in 1..tree.vertex_count() {
        let p = tree.parents[v];
        let dre = &values[v].0 - &values[p].0;
        let dim = &values[v].1 - &values[p].1;
        let candidate = norm_sq(&dre, &dim);
        if candidate > best {
            best = candidate;
        }
    }
    best
}

/// Last step at which an iterate of `m -> a*m + b` (optionally fixing 0)
/// still maps some label in `0..=window` back into `0..=window`, scanning
/// `1..=horizon` with exact integer labels.
pub fn brute_run_away(a: u64, b: u64, fixzero: bool, set: &[u64], horizon: u64) -> Vec<u64> {
    let start: Vec<BigUint> = set.iter().copied().map(BigUint::from).collect();
    let mut labels = start.clone();
    let mut times = Vec::new();
    for step in 1..=horizon {
        for m in labels.iter_mut() {
            if !(fixzero && m.is_zero()) {
                *m = m.clone() * a + b;
            }
        }
        if labels.iter().any(|m| start.contains(m)) {
            times.push(step);
        }
    }
    times
}
