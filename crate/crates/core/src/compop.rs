//! Self maps of a tree and the composition operator they induce on the little
//! Lipschitz space.
//!
//! A [`SelfMap`] pairs an image function with a [`MapMetadata`] record of
//! structural facts (stretch bound, injectivity, eventual length growth, and
//! separation behavior). Scans verify declared facts where they can and refuse
//! to proceed past a contradiction; certificates in reports always say whether
//! they rest on declared facts or on observation alone.
//!
//! The operator itself acts by [`SelfMap::pullback`]: `(C f)(v) = f(map(v))`.
//! [`classify_boundedness`] decides whether that operator is bounded on the
//! little space, [`norm_bounds`] brackets its norm and probes the bracket with
//! witness functions.

use crate::error::{Error, Result};
use crate::keys;
use crate::lip::{lip_norm, SupportHint, TreeFunction};
use crate::scalar::Magnitude;
use crate::tree::{comb, ScanBudget, TreeModel, VertexPath};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Hard cap on the length of any materialized image vertex, independent of
/// scan budgets: paths are stored densely, so unbounded images would exhaust
/// memory before any budget check runs.
const IMAGE_LEN_CAP: u64 = 1 << 24;

/// A certified bound on the separation of one parent pair under iteration:
/// `dist(map^n(w), map^n(parent(w))) <= bound` for every `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParentSeparationBound {
    pub w: VertexPath,
    pub bound: u64,
}

/// Certified geometric expansion facts.
///
/// `ratio` is a factor `g >= 1` with `dist(map(u), map(v)) >= g * dist(u, v)`
/// for all vertex pairs. `parent_exact` upgrades parent pairs to equality at
/// every iterate: `dist(map^n(v), map^n(parent(v))) == g^n` for non-root `v`.
/// `min_separation_exact` records that the ratio is attained, and
/// `tent_offset = Some(t)` certifies `t + |map(v)| >= g * (t + |v|)` for all
/// `v`, the growth fact tent functions need under pullback.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricSeparation {
    pub ratio: u64,
    pub parent_exact: bool,
    pub min_separation_exact: bool,
    pub tent_offset: Option<u64>,
}

/// Declared structural facts about a self map. Every field is optional;
/// `None` always means unknown, never false.
///
/// Scans treat declared facts as trusted certificates but cross-check them
/// wherever a truncation can: a contradiction aborts with a metadata
/// violation rather than silently preferring either side.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapMetadata {
    /// Least upper bound of `dist(map(v), map(parent(v)))` over non-root `v`,
    /// which equals the Lipschitz number of the map.
    pub lipschitz_number: Option<u64>,
    pub injective: Option<bool>,
    /// `|map(v)| > |v|` for every vertex with `|v| >=` this value.
    pub length_increasing_from: Option<u64>,
    /// Every sector on which the map is nonconstant is rooted at depth at
    /// most this value; `Some(0)` with a constant root sector means the map
    /// is constant everywhere.
    pub nonconstant_sectors_within: Option<u64>,
    pub periodic_point_free: Option<bool>,
    /// For every vertex `v`, the set of times `n` with a nonempty preimage
    /// `map^{-n}(v)` is finite.
    pub preimage_times_finite: Option<bool>,
    pub parent_separation_bound: Option<ParentSeparationBound>,
    pub geometric_separation: Option<GeometricSeparation>,
}

impl MapMetadata {
    /// Field-wise overlay: facts present in `overlay` replace those in
    /// `self`, absent ones are kept.
    pub fn overlaid(&self, overlay: &MapMetadata) -> MapMetadata {
        MapMetadata {
            lipschitz_number: overlay.lipschitz_number.or(self.lipschitz_number),
            injective: overlay.injective.or(self.injective),
            length_increasing_from: overlay
                .length_increasing_from
                .or(self.length_increasing_from),
            nonconstant_sectors_within: overlay
                .nonconstant_sectors_within
                .or(self.nonconstant_sectors_within),
            periodic_point_free: overlay.periodic_point_free.or(self.periodic_point_free),
            preimage_times_finite: overlay.preimage_times_finite.or(self.preimage_times_finite),
            parent_separation_bound: overlay
                .parent_separation_bound
                .clone()
                .or_else(|| self.parent_separation_bound.clone()),
            geometric_separation: overlay
                .geometric_separation
                .clone()
                .or_else(|| self.geometric_separation.clone()),
        }
    }
}

/// How a finite image table extends to the rest of the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableDefault {
    /// Vertices off the table map to themselves.
    Identity,
    /// The map is undefined off the table; scans that reach such a vertex
    /// abort with an undefined-image error.
    Undefined,
}

struct MapInner {
    name: String,
    tree: TreeModel,
    metadata: MapMetadata,
    total: bool,
    apply: Box<dyn Fn(&VertexPath) -> Result<VertexPath> + Send + Sync>,
}

/// A self map of a tree's vertex set, with declared structural facts.
#[derive(Clone)]
pub struct SelfMap {
    inner: Arc<MapInner>,
}

impl SelfMap {
    pub fn new(
        name: impl Into<String>,
        tree: TreeModel,
        metadata: MapMetadata,
        total: bool,
        apply: impl Fn(&VertexPath) -> Result<VertexPath> + Send + Sync + 'static,
    ) -> Self {
        SelfMap {
            inner: Arc::new(MapInner {
                name: name.into(),
                tree,
                metadata,
                total,
                apply: Box::new(apply),
            }),
        }
    }

    /// The map `m -> a*m + b` on the path tree, with an optional override
    /// pinning `0 -> 0`. All structural metadata is derived.
    pub fn affine_path(a: u64, b: u64, fixzero: bool) -> Result<SelfMap> {
        if a == 0 {
            return Err(Error::InvalidSpec(
                "affine factor must be >= 1; a constant map is its own kind".into(),
            ));
        }
        // With b = 0 the pin changes nothing.
        let pinned = fixzero && b > 0;
        let name = match (a, b, pinned) {
            (1, 0, _) => "affine(m)".to_string(),
            (a, 0, _) => format!("affine({a}m)"),
            (1, b, false) => format!("affine(m+{b})"),
            (a, b, false) => format!("affine({a}m+{b})"),
            (a, b, true) => format!("affine({a}m+{b},0 fixed)"),
        };
        let metadata = affine_metadata(a, b, pinned);
        let map_name = name.clone();
        Ok(SelfMap::new(
            name,
            TreeModel::path(),
            metadata,
            true,
            move |v| {
                let m = v.path_index().ok_or_else(|| {
                    Error::PreconditionUnmet(format!(
                        "`{map_name}` applied to {v}, which is not a path vertex"
                    ))
                })?;
                let image = if pinned && m == 0 {
                    0
                } else {
                    a.checked_mul(m)
                        .and_then(|am| am.checked_add(b))
                        .filter(|&n| n <= IMAGE_LEN_CAP)
                        .ok_or(Error::LengthBudget {
                            len: u64::MAX,
                            cap: IMAGE_LEN_CAP,
                            context: format!("image of {v} under `{map_name}`"),
                        })?
                };
                Ok(VertexPath::path_vertex(image))
            },
        ))
    }

    /// The standard comb-tree map: odd spine vertices step back along the
    /// spine, even spine vertices enter their ray, ray vertices advance one
    /// step outward. Injective, without periodic points, stretch bound 3, and
    /// every backward chain is finite (odd spine vertices have no preimage).
    pub fn comb_map() -> SelfMap {
        let metadata = MapMetadata {
            lipschitz_number: Some(3),
            injective: Some(true),
            length_increasing_from: None,
            nonconstant_sectors_within: None,
            periodic_point_free: Some(true),
            preimage_times_finite: Some(true),
            parent_separation_bound: Some(ParentSeparationBound {
                w: VertexPath::from_indices([0]),
                bound: 1,
            }),
            geometric_separation: None,
        };
        SelfMap::new(
            "comb-step",
            TreeModel::comb(),
            metadata,
            true,
            |v| match comb::classify(v) {
                comb::CombVertex::Spine(n) if n % 2 == 0 => Ok(comb::ray(n, 1)),
                comb::CombVertex::Spine(n) => Ok(comb::spine(n - 1)),
                comb::CombVertex::Ray { attach, step } => Ok(comb::ray(attach, step + 1)),
                comb::CombVertex::Invalid => Err(Error::PreconditionUnmet(format!(
                    "`comb-step` applied to {v}, which is not a comb vertex"
                ))),
            },
        )
    }

    /// The map sending every vertex to `target`.
    pub fn constant_map(tree: TreeModel, target: VertexPath) -> Result<SelfMap> {
        if !tree.contains(&target) {
            return Err(Error::InvalidSpec(format!(
                "constant target {target} is not a vertex of `{}`",
                tree.name()
            )));
        }
        let metadata = MapMetadata {
            lipschitz_number: Some(0),
            injective: Some(false),
            length_increasing_from: None,
            nonconstant_sectors_within: Some(0),
            periodic_point_free: Some(false),
            preimage_times_finite: Some(false),
            parent_separation_bound: Some(ParentSeparationBound {
                w: VertexPath::from_indices([0]),
                bound: 1,
            }),
            geometric_separation: None,
        };
        let name = format!("constant({target})");
        Ok(SelfMap::new(name, tree, metadata, true, move |_| {
            Ok(target.clone())
        }))
    }

    /// A map given by a finite image table, extended by the chosen default.
    /// Carries no derived metadata; declare facts via [`Self::with_metadata`].
    pub fn table_map(
        tree: TreeModel,
        entries: BTreeMap<VertexPath, VertexPath>,
        default: TableDefault,
    ) -> Result<SelfMap> {
        let name = format!("table-map({} entries)", entries.len());
        for (v, w) in &entries {
            if !tree.contains(v) {
                return Err(Error::InvalidSpec(format!(
                    "table key {v} is not a vertex of `{}`",
                    tree.name()
                )));
            }
            if !tree.contains(w) {
                return Err(Error::InvalidImage {
                    map: name.clone(),
                    tree: tree.name().to_string(),
                    vertex: v.clone(),
                    image: w.clone(),
                });
            }
        }
        let total = default == TableDefault::Identity;
        let map_name = name.clone();
        Ok(SelfMap::new(
            name,
            tree,
            MapMetadata::default(),
            total,
            move |v| match entries.get(v) {
                Some(w) => Ok(w.clone()),
                None => match default {
                    TableDefault::Identity => Ok(v.clone()),
                    TableDefault::Undefined => Err(Error::UndefinedImage {
                        map: map_name.clone(),
                        vertex: v.clone(),
                    }),
                },
            },
        ))
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn tree(&self) -> &TreeModel {
        &self.inner.tree
    }

    pub fn metadata(&self) -> &MapMetadata {
        &self.inner.metadata
    }

    /// Whether the map is defined at every vertex.
    pub fn is_total(&self) -> bool {
        self.inner.total
    }

    /// Same map with the metadata record replaced.
    pub fn with_metadata(&self, metadata: MapMetadata) -> SelfMap {
        let inner = self.clone();
        SelfMap::new(
            self.name().to_string(),
            self.tree().clone(),
            metadata,
            self.is_total(),
            move |v| inner.image(v),
        )
    }

    pub fn image(&self, v: &VertexPath) -> Result<VertexPath> {
        (self.inner.apply)(v)
    }

    /// `map^n(v)`, with the length budget checked after every step.
    pub fn iterate(&self, v: &VertexPath, n: u64, budget: &ScanBudget) -> Result<VertexPath> {
        let mut current = v.clone();
        for _ in 0..n {
            current = self.image(&current)?;
            budget.check_len(&current, "iteration")?;
        }
        Ok(current)
    }

    /// The composition operator applied to `f`: the function
    /// `v -> f(map(v))`, with the strongest support hint the map's metadata
    /// justifies.
    pub fn pullback(&self, f: &TreeFunction) -> Result<TreeFunction> {
        if !self.is_total() {
            return Err(Error::PreconditionUnmet(format!(
                "`{}` is not defined everywhere, so it induces no composition operator",
                self.name()
            )));
        }
        let md = self.metadata();
        let mut candidates: Vec<SupportHint> = Vec::new();
        if f.support() == (&SupportHint::DerivativeVanishes { depth: 0 }) {
            // Constant functions pull back to constants.
            candidates.push(SupportHint::DerivativeVanishes { depth: 0 });
        }
        if let Some(d) = md.nonconstant_sectors_within {
            // Beyond depth d every sector is constant, so the pullback of
            // anything is constant along edges deeper than d + 1.
            candidates.push(SupportHint::DerivativeVanishes { depth: d + 1 });
        }
        if let (Some(n), SupportHint::FiniteSupport { depth: d }) =
            (md.length_increasing_from, f.support())
        {
            // Past both thresholds, images are longer than the support depth.
            candidates.push(SupportHint::FiniteSupport {
                depth: (*d).max(n.saturating_sub(1)),
            });
        }
        let hint = candidates
            .into_iter()
            .min_by_key(|h| {
                let fs = matches!(h, SupportHint::FiniteSupport { .. });
                (h.certifying_depth().unwrap_or(u64::MAX), !fs)
            })
            .unwrap_or(SupportHint::None);
        let name = format!("compose({},{})", f.name(), self.name());
        let map = self.clone();
        let g = f.clone();
        Ok(TreeFunction::new(name, hint, move |v| {
            let w = map.image(v).expect("total map undefined at a tree vertex");
            g.eval(&w)
        }))
    }
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelfMap")
            .field("name", &self.inner.name)
            .field("tree", &self.inner.tree.name())
            .field("total", &self.inner.total)
            .finish()
    }
}

fn affine_metadata(a: u64, b: u64, pinned: bool) -> MapMetadata {
    let lipschitz_number = Some(if pinned { a + b } else { a });
    let length_increasing_from = if a == 1 && b == 0 {
        None
    } else if !pinned && b >= 1 {
        Some(0)
    } else {
        // b = 0 leaves 0 in place; the pin does the same.
        Some(1)
    };
    let periodic_point_free = Some(!(b == 0 || pinned));
    let preimage_times_finite = Some(b >= 1 && !pinned);
    let parent_separation_bound = if a == 1 {
        // Consecutive vertices stay consecutive; the pin shifts the witness
        // off the pinned origin.
        Some(ParentSeparationBound {
            w: VertexPath::path_vertex(if pinned { 2 } else { 1 }),
            bound: 1,
        })
    } else {
        None
    };
    let tent_offset = if pinned {
        // The pinned origin defeats any offset unless nothing expands.
        if a == 1 {
            Some(1)
        } else {
            None
        }
    } else if b >= a - 1 {
        Some(1)
    } else {
        None
    };
    MapMetadata {
        lipschitz_number,
        injective: Some(true),
        length_increasing_from,
        nonconstant_sectors_within: None,
        periodic_point_free,
        preimage_times_finite,
        parent_separation_bound,
        geometric_separation: Some(GeometricSeparation {
            ratio: a,
            parent_exact: !pinned,
            min_separation_exact: true,
            tent_offset,
        }),
    }
}

/// Largest observed edge stretch `dist(map(v), map(parent(v)))`, reconciled
/// with the declared bound when one exists.
#[derive(Clone, Debug, Serialize)]
pub struct LipschitzEstimate {
    /// The Lipschitz number: the declared bound when present, otherwise the
    /// observed maximum (then a lower bound only).
    pub value: u64,
    /// Whether `value` is the exact Lipschitz number (declared, or certified
    /// by a constant-sector bound covered by the scan).
    pub exact: bool,
    pub observed: u64,
    /// First vertex attaining the observed maximum, by level then
    /// lexicographic order.
    pub attained_at: VertexPath,
    pub declared: Option<u64>,
    pub scan_depth: u64,
}

pub fn lipschitz_number(
    map: &SelfMap,
    depth: u64,
    budget: &ScanBudget,
) -> Result<LipschitzEstimate> {
    let tree = map.tree();
    let root = VertexPath::root();
    let root_image = map.image(&root)?;
    budget.check_len(&root_image, "edge stretch scan")?;
    let mut best: u64 = 0;
    let mut attained = root.clone();
    let mut prev = vec![(root, root_image)];
    for n in 1..=depth {
        let mut next = Vec::new();
        for (v, image) in &prev {
            for i in 0..tree.arity(v) {
                if next.len() as u64 >= budget.level_cap {
                    return Err(Error::LevelBudget {
                        tree: tree.name().to_string(),
                        level: n,
                        cap: budget.level_cap,
                    });
                }
                let c = v.child(i);
                let ci = map.image(&c)?;
                budget.check_len(&ci, "edge stretch scan")?;
                let stretch = ci.distance(image);
                if stretch > best {
                    best = stretch;
                    attained = c.clone();
                }
                next.push((c, ci));
            }
        }
        prev = next;
    }
    let declared = map.metadata().lipschitz_number;
    if let Some(bound) = declared {
        if best > bound {
            return Err(Error::MetadataViolation {
                map: map.name().to_string(),
                detail: format!(
                    "declared stretch bound {bound}, but the edge into {attained} stretches to {best}"
                ),
            });
        }
    }
    // A constant-sector bound certifies the scan saw every nonzero stretch.
    let sector_certified = map
        .metadata()
        .nonconstant_sectors_within
        .is_some_and(|d| depth >= d + 2);
    Ok(LipschitzEstimate {
        value: declared.unwrap_or(best),
        exact: declared.is_some() || sector_certified,
        observed: best,
        attained_at: attained,
        declared,
        scan_depth: depth,
    })
}

/// Observed constancy data for every sector of a truncation.
pub(crate) struct SectorAnalysis {
    /// Image of every truncation vertex.
    pub images: BTreeMap<VertexPath, VertexPath>,
    /// Sector roots observed nonconstant, each with a witness inside whose
    /// image differs from the root's image.
    pub nonconstant: BTreeMap<VertexPath, VertexPath>,
    pub scanned: u64,
}

pub(crate) fn sector_analysis(
    map: &SelfMap,
    depth: u64,
    budget: &ScanBudget,
) -> Result<SectorAnalysis> {
    let trunc = map.tree().truncation(depth, budget)?;
    let mut images = BTreeMap::new();
    for v in trunc.vertices() {
        let w = map.image(v)?;
        budget.check_len(&w, "sector scan")?;
        images.insert(v.clone(), w);
    }
    enum State {
        Constant,
        Nonconstant(VertexPath),
    }
    let mut states: BTreeMap<VertexPath, State> = BTreeMap::new();
    let mut nonconstant = BTreeMap::new();
    for n in (0..=depth).rev() {
        for v in trunc.level(n) {
            let own = &images[v];
            let mut state = State::Constant;
            if n < depth {
                for i in 0..map.tree().arity(v) {
                    let c = v.child(i);
                    match &states[&c] {
                        State::Nonconstant(w) => {
                            let witness = if images[&c] != *own { c } else { w.clone() };
                            state = State::Nonconstant(witness);
                            break;
                        }
                        State::Constant if images[&c] != *own => {
                            state = State::Nonconstant(c);
                            break;
                        }
                        State::Constant => {}
                    }
                }
            }
            if let State::Nonconstant(w) = &state {
                nonconstant.insert(v.clone(), w.clone());
            }
            states.insert(v.clone(), state);
        }
    }
    Ok(SectorAnalysis {
        images,
        nonconstant,
        scanned: trunc.vertex_count(),
    })
}

/// A sector root whose image function is observed nonconstant, with a vertex
/// inside the sector witnessing it.
#[derive(Clone, Debug, Serialize)]
pub struct SectorWitness {
    pub root: VertexPath,
    pub inside: VertexPath,
}

/// Summary of sector constancy over a truncation.
#[derive(Debug, Serialize)]
pub struct SectorScan {
    pub scan_depth: u64,
    pub scanned: u64,
    pub nonconstant_count: u64,
    pub constant_count: u64,
    pub deepest_nonconstant: Option<u64>,
    /// First few nonconstant sector roots with witnesses, in vertex order.
    pub sample: Vec<SectorWitness>,
    /// Declared bound on nonconstant sector depth, when present.
    pub certified_within: Option<u64>,
}

pub fn sector_scan(map: &SelfMap, depth: u64, budget: &ScanBudget) -> Result<SectorScan> {
    let analysis = sector_analysis(map, depth, budget)?;
    check_sector_declaration(map, &analysis)?;
    let nonconstant_count = analysis.nonconstant.len() as u64;
    let deepest = analysis.nonconstant.keys().map(|v| v.length()).max();
    let sample = analysis
        .nonconstant
        .iter()
        .take(16)
        .map(|(root, inside)| SectorWitness {
            root: root.clone(),
            inside: inside.clone(),
        })
        .collect();
    Ok(SectorScan {
        scan_depth: depth,
        scanned: analysis.scanned,
        nonconstant_count,
        constant_count: analysis.scanned - nonconstant_count,
        deepest_nonconstant: deepest,
        sample,
        certified_within: map.metadata().nonconstant_sectors_within,
    })
}

fn check_sector_declaration(map: &SelfMap, analysis: &SectorAnalysis) -> Result<()> {
    if let Some(d) = map.metadata().nonconstant_sectors_within {
        if let Some((root, inside)) = analysis.nonconstant.iter().find(|(r, _)| r.length() > d) {
            return Err(Error::MetadataViolation {
                map: map.name().to_string(),
                detail: format!(
                    "nonconstant sectors declared within depth {d}, but the sector at {root} \
                     (witness {inside}) is nonconstant"
                ),
            });
        }
    }
    Ok(())
}

/// Evidence that the operator fails to map into the little space: one image
/// vertex with nonconstant-sector preimages at many distinct depths. The
/// pullback of that vertex's characteristic function then has unit-modulus
/// increments at every listed boundary vertex, so its increments cannot decay.
#[derive(Debug, Serialize)]
pub struct UnboundedWitness {
    /// The image vertex whose characteristic function refuses to pull back
    /// into the little space.
    pub image: VertexPath,
    /// Distinct depths of observed nonconstant-sector preimages.
    pub preimage_depths: Vec<u64>,
    pub sample_preimages: Vec<VertexPath>,
    /// One vertex per depth where the pullback's increment has modulus 1.
    pub boundary_vertices: Vec<VertexPath>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundednessVerdict {
    /// Declared facts certify both a finite stretch bound and the sector
    /// condition; the operator is bounded.
    BoundedCertified { basis: String },
    /// A witness pattern refutes the sector condition as far as the scan can
    /// see.
    UnboundedObserved { witness: UnboundedWitness },
    /// The scan saw no refutation but no declared fact certifies boundedness.
    Inconclusive { detail: String },
}

/// Boundedness classification of the composition operator.
#[derive(Debug, Serialize)]
pub struct BoundednessReport {
    pub verdict: BoundednessVerdict,
    /// The fact the verdict rests on (or, for Inconclusive, probes).
    pub key: &'static str,
    pub lipschitz: LipschitzEstimate,
    pub scan_depth: u64,
    /// Distinct preimage depths required before a pattern counts as a
    /// refutation witness.
    pub preimage_depth_threshold: u64,
    pub nonconstant_count: u64,
    pub deepest_nonconstant: Option<u64>,
}

/// Decides boundedness of the composition operator: bounded exactly when the
/// map has a finite stretch bound and the nonconstant-sector family is finite
/// or escapes to infinity in image length.
///
/// Certification is by declared metadata (stretch bound or constant sectors;
/// injectivity or eventual length growth for the escape condition).
/// Refutation is by the indicator-pullback pattern: one image vertex
/// collecting nonconstant-sector preimages at `threshold` distinct depths.
pub fn classify_boundedness(
    map: &SelfMap,
    depth: u64,
    threshold: u64,
    budget: &ScanBudget,
) -> Result<BoundednessReport> {
    if threshold == 0 {
        return Err(Error::InvalidSpec(
            "refutation threshold must be >= 1".into(),
        ));
    }
    let lipschitz = lipschitz_number(map, depth, budget)?;
    let analysis = sector_analysis(map, depth, budget)?;
    check_sector_declaration(map, &analysis)?;
    let md = map.metadata();

    // Bucket nonconstant sector roots by image; a repeated image at many
    // depths is the refutation pattern.
    let mut buckets: BTreeMap<&VertexPath, Vec<&VertexPath>> = BTreeMap::new();
    for root in analysis.nonconstant.keys() {
        buckets
            .entry(&analysis.images[root])
            .or_default()
            .push(root);
    }
    if md.injective == Some(true) {
        if let Some((image, preimages)) = buckets.iter().find(|(_, p)| p.len() > 1) {
            return Err(Error::MetadataViolation {
                map: map.name().to_string(),
                detail: format!(
                    "declared injective, but {} and {} both map to {image}",
                    preimages[0], preimages[1]
                ),
            });
        }
    }
    let refutation = buckets
        .iter()
        .map(|(image, preimages)| {
            let depths: BTreeSet<u64> = preimages.iter().map(|v| v.length()).collect();
            (*image, preimages, depths)
        })
        .filter(|(_, _, depths)| depths.len() as u64 >= threshold)
        .max_by(|a, b| a.2.len().cmp(&b.2.len()).then(b.0.cmp(a.0)));

    let stretch_certified = lipschitz.exact;
    let sector_basis: Option<(&str, &'static str)> = if md.nonconstant_sectors_within.is_some() {
        Some((
            "finitely many nonconstant sectors",
            keys::LITTLE_LIP_BOUNDED_CHARACTERIZATION,
        ))
    } else if md.injective == Some(true) {
        Some((
            "injective, so every vertex has finitely many preimages",
            keys::FINITE_PREIMAGES_BOUNDED,
        ))
    } else if md.length_increasing_from.is_some() {
        Some((
            "eventual length growth",
            keys::LENGTH_GROWTH_PREIMAGE_FINITE,
        ))
    } else {
        None
    };

    let (verdict, key) = if let Some((image, preimages, depths)) = refutation {
        if stretch_certified && sector_basis.is_some() {
            return Err(Error::MetadataViolation {
                map: map.name().to_string(),
                detail: format!(
                    "metadata certifies boundedness, but {image} has nonconstant-sector \
                     preimages at {} distinct depths",
                    depths.len()
                ),
            });
        }
        let mut boundary = Vec::new();
        let mut sample = Vec::new();
        let mut seen = BTreeSet::new();
        for v in preimages {
            if !seen.insert(v.length()) {
                continue;
            }
            if boundary.len() < 16 {
                boundary.push(fiber_boundary(map, v, &analysis.nonconstant[*v], image)?);
                sample.push((*v).clone());
            }
        }
        (
            BoundednessVerdict::UnboundedObserved {
                witness: UnboundedWitness {
                    image: image.clone(),
                    preimage_depths: depths.into_iter().collect(),
                    sample_preimages: sample,
                    boundary_vertices: boundary,
                },
            },
            keys::INDICATOR_PULLBACK_UNBOUNDED,
        )
    } else if let (true, Some((text, key))) = (stretch_certified, sector_basis) {
        (
            BoundednessVerdict::BoundedCertified {
                basis: format!("stretch bound {} and {}", lipschitz.value, text),
            },
            key,
        )
    } else {
        let missing = if stretch_certified {
            "no declared fact pins the sector condition"
        } else {
            "the stretch bound is observed only"
        };
        (
            BoundednessVerdict::Inconclusive {
                detail: format!("no refutation pattern within depth {depth}; {missing}"),
            },
            keys::LITTLE_LIP_BOUNDED_CHARACTERIZATION,
        )
    };

    Ok(BoundednessReport {
        verdict,
        key,
        lipschitz,
        scan_depth: depth,
        preimage_depth_threshold: threshold,
        nonconstant_count: analysis.nonconstant.len() as u64,
        deepest_nonconstant: analysis.nonconstant.keys().map(|v| v.length()).max(),
    })
}

/// First vertex on the prefix chain from `v` toward `inside` whose image
/// leaves `w`'s fiber. Its parent still maps to `w`, so the pullback of the
/// characteristic function of `w` has increment of modulus 1 there.
fn fiber_boundary(
    map: &SelfMap,
    v: &VertexPath,
    inside: &VertexPath,
    w: &VertexPath,
) -> Result<VertexPath> {
    for k in v.length() + 1..=inside.length() {
        let p = inside.ancestor_at(k).unwrap();
        if map.image(&p)? != *w {
            return Ok(p);
        }
    }
    Err(Error::TheoremViolation(format!(
        "sector witness {inside} never leaves the fiber of {w}"
    )))
}

/// One probe of the operator norm: a unit-norm function and the observed norm
/// of its pullback.
#[derive(Debug, Serialize)]
pub struct WitnessRatio {
    pub function: String,
    pub norm: Magnitude,
    pub image_norm: Magnitude,
    pub ratio: Magnitude,
    /// Whether the image norm scan was certified complete by a support hint.
    pub image_certified: bool,
    pub exact: bool,
}

/// Bracket on the operator norm with witness probes.
#[derive(Debug, Serialize)]
pub struct NormBoundsReport {
    /// `1 + |map(root)|`; attained up to any tolerance by tall tent functions.
    pub lower: Magnitude,
    /// `max(lower, stretch bound)`.
    pub upper: Magnitude,
    /// Whether the upper bound uses the exact Lipschitz number.
    pub upper_exact: bool,
    pub root_image_depth: u64,
    pub lipschitz: LipschitzEstimate,
    pub witnesses: Vec<WitnessRatio>,
    pub best_ratio: Magnitude,
    pub best_witness: Option<String>,
    pub scan_depth: u64,
}

/// Lower and upper bounds for the operator norm, probed by a family of
/// unit-norm witnesses: the tent reaching the root image, characteristic
/// functions near the root, and bumps around images of near-root vertices.
pub fn norm_bounds(map: &SelfMap, depth: u64, budget: &ScanBudget) -> Result<NormBoundsReport> {
    let lipschitz = lipschitz_number(map, depth, budget)?;
    let root_image = map.image(&VertexPath::root())?;
    let m = root_image.length();
    let lower = Magnitude::from_count(1 + m);
    let upper = Magnitude::from_count((1 + m).max(lipschitz.value));

    // Norms of the witness family are known by construction: tents and
    // characteristic functions have norm 1, a bump has norm
    // max(1, radius - |center|) (the root value dominating once the bump
    // reaches over the root).
    let unit = || Magnitude::from_count(1);
    let mut functions: Vec<(TreeFunction, Magnitude)> = vec![(TreeFunction::tent(m), unit())];
    let near_root = map.tree().truncation(2.min(depth), budget)?;
    for v in near_root.vertices().take(64) {
        functions.push((TreeFunction::indicator(v.clone()), unit()));
    }
    let mut centers = BTreeSet::new();
    for v in near_root.vertices().take(64) {
        centers.insert(map.image(v)?);
    }
    let max_radius = lipschitz.value.clamp(2, 6);
    for c in centers {
        for r in 1..=max_radius {
            let norm = Magnitude::from_count(r.saturating_sub(c.length()).max(1));
            functions.push((TreeFunction::bump(c.clone(), r), norm));
        }
    }

    let mut witnesses = Vec::new();
    let mut best_ratio = Magnitude::zero();
    let mut best_witness = None;
    for (f, norm) in functions {
        let image = map.pullback(&f)?;
        let needed = image.support().certifying_depth();
        let scan_depth = match needed {
            Some(d) if d > depth && d <= depth + 32 => d,
            _ => depth,
        };
        let report = match lip_norm(&image, map.tree(), scan_depth, budget) {
            Ok(r) => r,
            // A deepened scan can blow the level cap on wide trees; the
            // requested depth still yields an observed value.
            Err(Error::LevelBudget { .. }) if scan_depth > depth => {
                lip_norm(&image, map.tree(), depth, budget)?
            }
            Err(e) => return Err(e),
        };
        let ratio = report.value.div(&norm)?;
        if ratio > best_ratio {
            best_ratio = ratio.clone();
            best_witness = Some(f.name().to_string());
        }
        witnesses.push(WitnessRatio {
            function: f.name().to_string(),
            exact: norm.is_exact() && report.value.is_exact(),
            image_norm: report.value,
            image_certified: report.certified,
            norm,
            ratio,
        });
    }

    if lipschitz.exact {
        if let Some(w) = witnesses.iter().find(|w| w.ratio > upper) {
            return Err(Error::TheoremViolation(format!(
                "witness `{}` attains ratio {} above the certified bound {upper}",
                w.function, w.ratio
            )));
        }
    }

    Ok(NormBoundsReport {
        lower,
        upper,
        upper_exact: lipschitz.exact,
        root_image_depth: m,
        lipschitz,
        witnesses,
        best_ratio,
        best_witness,
        scan_depth: depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lip::lip_norm;
    use num_rational::BigRational;

    fn budget() -> ScanBudget {
        ScanBudget::default()
    }

    fn path(n: u64) -> VertexPath {
        VertexPath::path_vertex(n)
    }

    #[test]
    fn affine_images() {
        let m = SelfMap::affine_path(2, 1, false).unwrap();
        assert_eq!(m.image(&path(0)).unwrap(), path(1));
        assert_eq!(m.image(&path(3)).unwrap(), path(7));
        let pinned = SelfMap::affine_path(2, 1, true).unwrap();
        assert_eq!(pinned.image(&path(0)).unwrap(), path(0));
        assert_eq!(pinned.image(&path(3)).unwrap(), path(7));
        assert_eq!(
            m.iterate(&path(1), 3, &budget()).unwrap(),
            path(15) // 1 -> 3 -> 7 -> 15
        );
        assert!(SelfMap::affine_path(0, 5, false).is_err());
    }

    #[test]
    fn affine_metadata_facts() {
        let doubling = SelfMap::affine_path(2, 0, false).unwrap();
        let md = doubling.metadata();
        assert_eq!(md.lipschitz_number, Some(2));
        assert_eq!(md.injective, Some(true));
        assert_eq!(md.length_increasing_from, Some(1));
        assert_eq!(md.periodic_point_free, Some(false)); // 0 is fixed
        assert_eq!(md.preimage_times_finite, Some(false));
        let gs = md.geometric_separation.as_ref().unwrap();
        assert_eq!(gs.ratio, 2);
        assert!(gs.parent_exact);
        assert_eq!(gs.tent_offset, None); // 1+2m < 2(1+m)

        let md = SelfMap::affine_path(2, 1, false)
            .unwrap()
            .metadata()
            .clone();
        assert_eq!(md.length_increasing_from, Some(0));
        assert_eq!(md.periodic_point_free, Some(true));
        assert_eq!(md.preimage_times_finite, Some(true));
        assert_eq!(
            md.geometric_separation.as_ref().unwrap().tent_offset,
            Some(1)
        );

        let md = SelfMap::affine_path(3, 1, false)
            .unwrap()
            .metadata()
            .clone();
        assert_eq!(md.geometric_separation.as_ref().unwrap().tent_offset, None);

        let shift = SelfMap::affine_path(1, 1, false)
            .unwrap()
            .metadata()
            .clone();
        assert_eq!(shift.lipschitz_number, Some(1));
        assert_eq!(
            shift.parent_separation_bound,
            Some(ParentSeparationBound {
                w: path(1),
                bound: 1
            })
        );
        assert_eq!(shift.preimage_times_finite, Some(true));

        let identity = SelfMap::affine_path(1, 0, false)
            .unwrap()
            .metadata()
            .clone();
        assert_eq!(identity.periodic_point_free, Some(false));
        assert_eq!(identity.length_increasing_from, None);

        let pinned = SelfMap::affine_path(2, 3, true).unwrap().metadata().clone();
        assert_eq!(pinned.lipschitz_number, Some(5));
        assert_eq!(pinned.length_increasing_from, Some(1));
        assert_eq!(pinned.periodic_point_free, Some(false));
        assert!(!pinned.geometric_separation.as_ref().unwrap().parent_exact);
    }

    #[test]
    fn lipschitz_scans() {
        let doubling = SelfMap::affine_path(2, 0, false).unwrap();
        let est = lipschitz_number(&doubling, 6, &budget()).unwrap();
        assert_eq!(est.value, 2);
        assert_eq!(est.observed, 2);
        assert!(est.exact);
        assert_eq!(est.attained_at, path(1));

        let comb = SelfMap::comb_map();
        let est = lipschitz_number(&comb, 6, &budget()).unwrap();
        assert_eq!(est.value, 3);
        assert_eq!(est.attained_at, VertexPath::from_indices([0, 0]));

        // An understated declared bound is caught by the scan.
        let lied = doubling.with_metadata(MapMetadata {
            lipschitz_number: Some(1),
            ..doubling.metadata().clone()
        });
        assert!(matches!(
            lipschitz_number(&lied, 6, &budget()),
            Err(Error::MetadataViolation { .. })
        ));
    }

    #[test]
    fn comb_map_structure() {
        let m = SelfMap::comb_map();
        assert_eq!(m.image(&comb::spine(0)).unwrap(), comb::ray(0, 1));
        assert_eq!(m.image(&comb::spine(3)).unwrap(), comb::spine(2));
        assert_eq!(m.image(&comb::spine(2)).unwrap(), comb::ray(2, 1));
        assert_eq!(m.image(&comb::ray(2, 5)).unwrap(), comb::ray(2, 6));
        // The certified parent pair stays one apart forever.
        let budget = budget();
        let mut a = comb::spine(1);
        let mut b = comb::spine(0);
        for _ in 0..12 {
            a = m.image(&a).unwrap();
            b = m.image(&b).unwrap();
            assert_eq!(a.distance(&b), 1);
        }
        let _ = budget;
    }

    #[test]
    fn sector_scans() {
        let tree = TreeModel::homogeneous(2).unwrap();
        let constant = SelfMap::constant_map(tree.clone(), path(2)).unwrap();
        let scan = sector_scan(&constant, 5, &budget()).unwrap();
        assert_eq!(scan.nonconstant_count, 0);
        assert_eq!(scan.certified_within, Some(0));

        let doubling = SelfMap::affine_path(2, 0, false).unwrap();
        let scan = sector_scan(&doubling, 6, &budget()).unwrap();
        // On a path every sector (except the deepest scanned, which has no
        // visible interior) is observed nonconstant.
        assert_eq!(scan.nonconstant_count, 6);
        assert_eq!(scan.deepest_nonconstant, Some(5));

        // Declaring constant sectors for a nonconstant map is a violation.
        let lied = doubling.with_metadata(MapMetadata {
            nonconstant_sectors_within: Some(0),
            ..doubling.metadata().clone()
        });
        assert!(matches!(
            sector_scan(&lied, 6, &budget()),
            Err(Error::MetadataViolation { .. })
        ));
    }

    /// Binary-tree map collapsing every spine vertex to the root: images are
    /// path vertices of length equal to the number of nonzero letters.
    fn collapse_map() -> SelfMap {
        let tree = TreeModel::homogeneous(2).unwrap();
        SelfMap::new("collapse", tree, MapMetadata::default(), true, |v| {
            let ones = v.indices().iter().filter(|&&i| i != 0).count() as u64;
            Ok(VertexPath::path_vertex(ones))
        })
    }

    #[test]
    fn boundedness_verdicts() {
        let b = budget();
        let doubling = SelfMap::affine_path(2, 0, false).unwrap();
        let report = classify_boundedness(&doubling, 6, 4, &b).unwrap();
        assert!(matches!(
            report.verdict,
            BoundednessVerdict::BoundedCertified { .. }
        ));

        let comb = SelfMap::comb_map();
        let report = classify_boundedness(&comb, 8, 4, &b).unwrap();
        assert!(matches!(
            report.verdict,
            BoundednessVerdict::BoundedCertified { .. }
        ));

        let constant =
            SelfMap::constant_map(TreeModel::homogeneous(2).unwrap(), VertexPath::root()).unwrap();
        let report = classify_boundedness(&constant, 5, 4, &b).unwrap();
        assert!(matches!(
            report.verdict,
            BoundednessVerdict::BoundedCertified { .. }
        ));

        let collapse = collapse_map();
        let report = classify_boundedness(&collapse, 8, 6, &b).unwrap();
        match &report.verdict {
            BoundednessVerdict::UnboundedObserved { witness } => {
                assert_eq!(witness.image, VertexPath::root());
                assert!(witness.preimage_depths.len() >= 6);
                // Each boundary vertex leaves the fiber while its parent stays.
                for u in &witness.boundary_vertices {
                    assert_ne!(collapse.image(u).unwrap(), witness.image);
                    assert_eq!(collapse.image(&u.parent().unwrap()).unwrap(), witness.image);
                }
            }
            v => panic!("expected a refutation, got {v:?}"),
        }

        // No metadata, no refutation pattern: inconclusive.
        let blank = SelfMap::new(
            "blank-shift",
            TreeModel::path(),
            MapMetadata::default(),
            true,
            |v| Ok(VertexPath::path_vertex(v.length() + 1)),
        );
        let report = classify_boundedness(&blank, 6, 4, &b).unwrap();
        assert!(matches!(
            report.verdict,
            BoundednessVerdict::Inconclusive { .. }
        ));
    }

    #[test]
    fn norm_bound_brackets() {
        let b = budget();
        // Doubling map: bracket [1, 2], and the radius-2 bump at the image of
        // 1 attains the upper bound exactly.
        let doubling = SelfMap::affine_path(2, 0, false).unwrap();
        let report = norm_bounds(&doubling, 8, &b).unwrap();
        assert!(report.lower.eq_value(&BigRational::from_integer(1.into())));
        assert!(report.upper.eq_value(&BigRational::from_integer(2.into())));
        assert!(report.upper_exact);
        assert!(report
            .best_ratio
            .eq_value(&BigRational::from_integer(2.into())));

        // Comb map: root goes one level deep, so the bracket is [2, 3], and a
        // bump attains 3.
        let comb = SelfMap::comb_map();
        let report = norm_bounds(&comb, 8, &b).unwrap();
        assert!(report.lower.eq_value(&BigRational::from_integer(2.into())));
        assert!(report.upper.eq_value(&BigRational::from_integer(3.into())));
        assert!(report
            .best_ratio
            .eq_value(&BigRational::from_integer(3.into())));

        // Identity: everything collapses to 1.
        let id = SelfMap::affine_path(1, 0, false).unwrap();
        let report = norm_bounds(&id, 6, &b).unwrap();
        assert!(report.lower.eq_value(&BigRational::from_integer(1.into())));
        assert!(report.upper.eq_value(&BigRational::from_integer(1.into())));
        assert!(report
            .best_ratio
            .eq_value(&BigRational::from_integer(1.into())));
    }

    #[test]
    fn pullback_hints_and_values() {
        let shift = SelfMap::affine_path(1, 1, false).unwrap();
        let f = TreeFunction::indicator(path(3));
        let g = shift.pullback(&f).unwrap();
        // chi_3 pulled back along m -> m+1 is chi_2.
        assert!(g.eval(&path(2)).is_one());
        assert!(g.eval(&path(3)).is_zero());
        assert_eq!(g.support(), &SupportHint::FiniteSupport { depth: 3 });

        let constant = SelfMap::constant_map(TreeModel::path(), path(4)).unwrap();
        let g = constant.pullback(&TreeFunction::linear()).unwrap();
        assert_eq!(g.support(), &SupportHint::DerivativeVanishes { depth: 1 });
        assert_eq!(g.eval(&path(9)), crate::scalar::Scalar::from_integer(4));

        // Norm of the pullback under the certified hint.
        let norm = lip_norm(&g, &TreeModel::path(), 2, &budget()).unwrap();
        assert!(norm.certified);
        assert!(norm.value.eq_value(&BigRational::from_integer(4.into())));
    }

    #[test]
    fn partial_maps_refuse_operators() {
        let tree = TreeModel::path();
        let mut entries = BTreeMap::new();
        entries.insert(path(0), path(1));
        let partial = SelfMap::table_map(tree, entries, TableDefault::Undefined).unwrap();
        assert!(!partial.is_total());
        assert!(matches!(
            partial.image(&path(5)),
            Err(Error::UndefinedImage { .. })
        ));
        assert!(matches!(
            partial.pullback(&TreeFunction::linear()),
            Err(Error::PreconditionUnmet(_))
        ));
        // Scans hit the hole and surface it.
        assert!(matches!(
            lipschitz_number(&partial, 3, &budget()),
            Err(Error::UndefinedImage { .. })
        ));
    }

    #[test]
    fn table_map_validation() {
        let tree = TreeModel::path();
        let mut entries = BTreeMap::new();
        entries.insert(path(1), VertexPath::from_indices([0, 1]));
        assert!(matches!(
            SelfMap::table_map(tree.clone(), entries, TableDefault::Identity),
            Err(Error::InvalidImage { .. })
        ));
        let mut entries = BTreeMap::new();
        entries.insert(VertexPath::from_indices([1]), path(0));
        assert!(matches!(
            SelfMap::table_map(tree, entries, TableDefault::Identity),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn metadata_overlay() {
        let base = SelfMap::affine_path(2, 0, false)
            .unwrap()
            .metadata()
            .clone();
        let overlay = MapMetadata {
            lipschitz_number: Some(7),
            ..MapMetadata::default()
        };
        let merged = base.overlaid(&overlay);
        assert_eq!(merged.lipschitz_number, Some(7));
        assert_eq!(merged.injective, Some(true));
        assert_eq!(merged.length_increasing_from, Some(1));
    }
}
