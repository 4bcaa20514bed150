//! Helpers shared by the integration test binaries: small constructors, the
//! bridge from oracle parent tables into the model world, and a tiny
//! deterministic generator for reproducible random corpora.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use treelip::oracle::FiniteTree;
use treelip::{
    Magnitude, Scalar, ScanBudget, SupportHint, TreeFunction, TreeModel, VertexPath,
};

pub fn budget() -> ScanBudget {
    ScanBudget::default()
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    ratio(n, 1)
}

pub fn path(n: u64) -> VertexPath {
    VertexPath::path_vertex(n)
}

pub fn exact_sq(m: &Magnitude) -> BigRational {
    match m {
        Magnitude::ExactSq(sq) => sq.clone(),
        Magnitude::Float(v) => panic!("expected an exact magnitude, got float {v}"),
    }
}

// ---------------------------------------------------------------------------
// Bridging parent tables into the model world.

/// Child-index path of every vertex: a vertex extends its parent's path by
/// its slot among the parent's children, children listed in index order.
/// Parents precede children in the table, so one ascending pass suffices.
pub fn paths_of(tree: &FiniteTree) -> Vec<VertexPath> {
    let mut paths = vec![VertexPath::root(); tree.vertex_count()];
    for v in 0..tree.vertex_count() {
        for (slot, c) in tree.children(v).into_iter().enumerate() {
            paths[c] = paths[v].child(slot as u32);
        }
    }
    paths
}

/// The model presenting the finite tree. Models are infinite on every ray, so
/// each leaf continues as a single ray of default arity 1.
pub fn model_of(tree: &FiniteTree, paths: &[VertexPath]) -> TreeModel {
    let mut table = BTreeMap::new();
    for (v, p) in paths.iter().enumerate() {
        let arity = tree.children(v).len() as u32;
        table.insert(p.clone(), arity.max(1));
    }
    TreeModel::custom_table("bridged", table, 1).unwrap()
}

/// A value table extended constantly below the leaves. The padding rays then
/// contribute zero increments, so every norm over the model agrees exactly
/// with the norm over the finite tree.
pub fn function_of(paths: &[VertexPath], values: &[(BigRational, BigRational)]) -> TreeFunction {
    let height = paths.iter().map(|p| p.length()).max().unwrap_or(0);
    let table: BTreeMap<VertexPath, Scalar> = paths
        .iter()
        .zip(values)
        .map(|(p, (re, im))| (p.clone(), Scalar::exact(re.clone(), im.clone())))
        .collect();
    TreeFunction::new(
        "bridged values",
        SupportHint::DerivativeVanishes { depth: height },
        move |v| {
            // Deepest listed ancestor; the root is always listed.
            let mut probe = v.clone();
            loop {
                if let Some(s) = table.get(&probe) {
                    return s.clone();
                }
                match probe.parent() {
                    Some(p) => probe = p,
                    None => return Scalar::zero(),
                }
            }
        },
    )
}

pub fn height_of(paths: &[VertexPath]) -> u64 {
    paths.iter().map(|p| p.length()).max().unwrap_or(0)
}

// ---------------------------------------------------------------------------
// Deterministic pseudo-randomness for reproducible corpora.

/// SplitMix64: a fixed seed yields the same corpus on every run and platform.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` by rejection, so corpora stay stable if
    /// the call order changes elsewhere. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let raw = self.next();
            if raw < zone {
                return raw % bound;
            }
        }
    }
}
