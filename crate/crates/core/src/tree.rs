//! Infinite rooted trees presented by arity functions, and finite truncations.
//!
//! A vertex is the path of child indices from the root, so the root is the
//! empty path. A [`TreeModel`] gives every vertex a positive arity; the tree it
//! presents is infinite along every ray and never materialized. Scans work on
//! [`Truncation`]s, the finite set of vertices up to a depth, produced level by
//! level under a resource budget.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Path of child indices from the root; the root is the empty path.
///
/// The derived order is lexicographic, which is the tie-break order used by
/// every `attained_at` field in reports.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexPath {
    indices: Vec<u32>,
}

impl VertexPath {
    pub fn root() -> Self {
        VertexPath::default()
    }

    pub fn from_indices(indices: impl Into<Vec<u32>>) -> Self {
        VertexPath {
            indices: indices.into(),
        }
    }

    /// Depth-n vertex of the path tree (the unary tree): n zero steps.
    pub fn path_vertex(n: u64) -> Self {
        VertexPath {
            indices: vec![0; n as usize],
        }
    }

    /// Integer label under the path-tree adapter, when the path is unary.
    pub fn path_index(&self) -> Option<u64> {
        if self.indices.iter().all(|&i| i == 0) {
            Some(self.length())
        } else {
            None
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// Number of edges from the root.
    pub fn length(&self) -> u64 {
        self.indices.len() as u64
    }

    pub fn is_root(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn parent(&self) -> Option<VertexPath> {
        if self.indices.is_empty() {
            None
        } else {
            Some(VertexPath {
                indices: self.indices[..self.indices.len() - 1].to_vec(),
            })
        }
    }

    pub fn child(&self, index: u32) -> VertexPath {
        let mut indices = self.indices.clone();
        indices.push(index);
        VertexPath { indices }
    }

    /// Ancestor at the given depth; `None` if this vertex is shallower.
    pub fn ancestor_at(&self, depth: u64) -> Option<VertexPath> {
        if depth > self.length() {
            None
        } else {
            Some(VertexPath {
                indices: self.indices[..depth as usize].to_vec(),
            })
        }
    }

    pub fn common_prefix_len(&self, other: &VertexPath) -> u64 {
        self.indices
            .iter()
            .zip(&other.indices)
            .take_while(|(a, b)| a == b)
            .count() as u64
    }

    /// Geodesic distance in any tree containing both paths: the number of
    /// edges up to the deepest common ancestor and back down.
    pub fn distance(&self, other: &VertexPath) -> u64 {
        self.length() + other.length() - 2 * self.common_prefix_len(other)
    }

    /// Whether `self` lies in the sector rooted at `sector_root`
    /// (`sector_root` itself included).
    pub fn in_sector(&self, sector_root: &VertexPath) -> bool {
        self.indices.len() >= sector_root.indices.len()
            && self.indices[..sector_root.indices.len()] == sector_root.indices[..]
    }
}

impl fmt::Display for VertexPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for VertexPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Resource caps for scans. Level sizes and vertex lengths beyond the caps
/// abort with a budget error instead of exhausting memory.
#[derive(Clone, Debug, Serialize)]
pub struct ScanBudget {
    pub level_cap: u64,
    pub len_cap: u64,
    pub orbit_horizon: u64,
}

impl Default for ScanBudget {
    fn default() -> Self {
        ScanBudget {
            level_cap: 1 << 20,
            len_cap: 1 << 22,
            orbit_horizon: 4096,
        }
    }
}

impl ScanBudget {
    pub fn check_len(&self, v: &VertexPath, context: &str) -> Result<()> {
        if v.length() > self.len_cap {
            Err(Error::LengthBudget {
                len: v.length(),
                cap: self.len_cap,
                context: context.to_string(),
            })
        } else {
            Ok(())
        }
    }
}

/// Structural family of a model, used by adapters and validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TreeShape {
    /// Unary tree; vertices correspond to non-negative integers by depth.
    Path,
    /// Every vertex has the same arity q >= 1.
    Homogeneous(u32),
    /// Spine of a path tree with a unary ray attached at every even spine
    /// vertex (child index 1 enters the ray, index 0 continues the spine).
    Comb,
    Custom,
}

struct ModelInner {
    name: String,
    shape: TreeShape,
    arity: Box<dyn Fn(&VertexPath) -> u32 + Send + Sync>,
}

/// An infinite, locally finite rooted tree presented by its arity function.
#[derive(Clone)]
pub struct TreeModel {
    inner: Arc<ModelInner>,
}

impl TreeModel {
    pub fn new(
        name: impl Into<String>,
        shape: TreeShape,
        arity: impl Fn(&VertexPath) -> u32 + Send + Sync + 'static,
    ) -> Self {
        TreeModel {
            inner: Arc::new(ModelInner {
                name: name.into(),
                shape,
                arity: Box::new(arity),
            }),
        }
    }

    pub fn path() -> Self {
        TreeModel::new("path", TreeShape::Path, |_| 1)
    }

    /// Homogeneous tree of arity q (q = 1 is the path tree's structure).
    pub fn homogeneous(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidSpec("homogeneous arity must be >= 1".into()));
        }
        Ok(TreeModel::new(
            format!("homogeneous-{q}"),
            TreeShape::Homogeneous(q),
            move |_| q,
        ))
    }

    pub fn comb() -> Self {
        TreeModel::new("comb", TreeShape::Comb, |v| match comb::classify(v) {
            comb::CombVertex::Spine(n) => {
                if n % 2 == 0 {
                    2
                } else {
                    1
                }
            }
            _ => 1,
        })
    }

    /// Finite arity table with a default for unlisted vertices. All arities
    /// must be positive so the presented tree stays infinite on every ray.
    pub fn custom_table(
        name: impl Into<String>,
        table: BTreeMap<VertexPath, u32>,
        default: u32,
    ) -> Result<Self> {
        if default == 0 || table.values().any(|&a| a == 0) {
            return Err(Error::InvalidSpec(
                "custom-table arities must all be >= 1".into(),
            ));
        }
        Ok(TreeModel::new(name, TreeShape::Custom, move |v| {
            table.get(v).copied().unwrap_or(default)
        }))
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn shape(&self) -> &TreeShape {
        &self.inner.shape
    }

    pub fn arity(&self, v: &VertexPath) -> u32 {
        (self.inner.arity)(v)
    }

    /// Whether the path denotes a vertex of this tree: every step's index must
    /// be below the arity of its prefix.
    pub fn contains(&self, v: &VertexPath) -> bool {
        let mut prefix = VertexPath::root();
        for &i in v.indices() {
            if i >= self.arity(&prefix) {
                return false;
            }
            prefix = prefix.child(i);
        }
        true
    }

    /// All vertices of length `n` in lexicographic order. Only this level is
    /// materialized; the budget caps its size.
    pub fn level(&self, n: u64, budget: &ScanBudget) -> Result<Vec<VertexPath>> {
        let mut out = Vec::new();
        let mut current = VertexPath::path_vertex(0);
        // Descend leftmost to depth n, then advance like an odometer.
        for _ in 0..n {
            current = current.child(0);
        }
        loop {
            if out.len() as u64 >= budget.level_cap {
                return Err(Error::LevelBudget {
                    tree: self.inner.name.clone(),
                    level: n,
                    cap: budget.level_cap,
                });
            }
            out.push(current.clone());
            // Find the deepest position whose index can advance.
            let mut k = current.indices().len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                let prefix = current.ancestor_at(k as u64 - 1).unwrap();
                let next_index = current.indices()[k - 1] + 1;
                if next_index < self.arity(&prefix) {
                    let mut indices = prefix.indices().to_vec();
                    indices.push(next_index);
                    indices.resize(n as usize, 0);
                    current = VertexPath::from_indices(indices);
                    break;
                }
                k -= 1;
            }
        }
    }

    pub fn truncation(&self, depth: u64, budget: &ScanBudget) -> Result<Truncation> {
        let mut levels = Vec::with_capacity(depth as usize + 1);
        for n in 0..=depth {
            levels.push(self.level(n, budget)?);
        }
        Ok(Truncation {
            model: self.clone(),
            depth,
            levels,
        })
    }
}

impl fmt::Debug for TreeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeModel")
            .field("name", &self.inner.name)
            .field("shape", &self.inner.shape)
            .finish()
    }
}

/// All vertices of a model up to a depth, stored level by level in
/// lexicographic order within each level.
pub struct Truncation {
    model: TreeModel,
    depth: u64,
    levels: Vec<Vec<VertexPath>>,
}

impl Truncation {
    pub fn model(&self) -> &TreeModel {
        &self.model
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    pub fn level(&self, n: u64) -> &[VertexPath] {
        &self.levels[n as usize]
    }

    pub fn levels(&self) -> impl Iterator<Item = (u64, &[VertexPath])> {
        self.levels
            .iter()
            .enumerate()
            .map(|(n, l)| (n as u64, l.as_slice()))
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexPath> {
        self.levels.iter().flatten()
    }

    pub fn vertex_count(&self) -> u64 {
        self.levels.iter().map(|l| l.len() as u64).sum()
    }
}

/// Comb-tree vertex bookkeeping shared by the model and the comb self map.
pub mod comb {
    use super::VertexPath;

    /// Role of a path in the comb encoding.
    #[derive(Clone, Debug, PartialEq, Eq)]
    pub enum CombVertex {
        /// Spine vertex n (the all-zero path of length n).
        Spine(u64),
        /// Ray vertex v_k: attached at even spine vertex k, v >= 1 steps in.
        Ray { attach: u64, step: u64 },
        /// Path that is not a vertex of the comb tree.
        Invalid,
    }

    pub fn spine(n: u64) -> VertexPath {
        VertexPath::path_vertex(n)
    }

    /// Ray vertex v_k = spine k, one step of index 1, then v-1 steps of index 0.
    pub fn ray(attach: u64, step: u64) -> VertexPath {
        assert!(attach % 2 == 0 && step >= 1);
        let mut indices = vec![0u32; attach as usize];
        indices.push(1);
        indices.extend(std::iter::repeat(0).take(step as usize - 1));
        VertexPath::from_indices(indices)
    }

    pub fn classify(v: &VertexPath) -> CombVertex {
        match v.indices().iter().position(|&i| i != 0) {
            None => CombVertex::Spine(v.length()),
            Some(k) => {
                let attach = k as u64;
                let tail_ok = v.indices()[k] == 1
                    && v.indices()[k + 1..].iter().all(|&i| i == 0)
                    && attach % 2 == 0;
                if tail_ok {
                    CombVertex::Ray {
                        attach,
                        step: v.length() - attach,
                    }
                } else {
                    CombVertex::Invalid
                }
            }
        }
    }
}
