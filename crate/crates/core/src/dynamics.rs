//! Dynamics of weighted composition operators: orbit and periodic point
//! scans, run-away behaviour of truncations, parent separation growth,
//! preimage time sets, backward orbits of tent functions, and a combined
//! hypercyclicity report.
//!
//! The operator under study is `f -> lambda * f(map(.))`. Scans observe a
//! truncation; declared metadata turns observations into certificates. A
//! verdict is `Certified` only when it follows from a finite witness (a
//! collision, a verified cycle) or from declared structural facts.

use crate::compop::SelfMap;
use crate::error::{Error, Result};
use crate::keys;
use crate::lip::{lip_norm, SupportHint, TreeFunction};
use crate::scalar::{Magnitude, Scalar};
use crate::tree::{ScanBudget, VertexPath};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Scan sizes for the dynamics report.
#[derive(Clone, Debug, Serialize)]
pub struct DynamicsBudgets {
    /// Truncation depth for vertex scans.
    pub depth: u64,
    /// Step horizon for orbit walks and run-away iteration.
    pub horizon: u64,
    /// Separation anchors and table vertices come from levels up to here.
    pub sample_depth: u64,
    /// Separation table steps `1..=grid_n_max`.
    pub grid_n_max: u64,
    /// The additive constant of the separation table is searched in
    /// `0..=c_max`.
    pub c_max: u64,
    /// Extra separation anchors beyond the sampled levels.
    pub extra_anchors: Vec<VertexPath>,
}

impl Default for DynamicsBudgets {
    fn default() -> Self {
        DynamicsBudgets {
            depth: 6,
            horizon: 48,
            sample_depth: 3,
            grid_n_max: 8,
            c_max: 8,
            extra_anchors: Vec::new(),
        }
    }
}

/// A forward orbit with optional cycle information.
#[derive(Debug, Serialize)]
pub struct OrbitReport {
    pub start: VertexPath,
    /// `(step, vertex)` pairs, step 0 first.
    pub vertices: Vec<(u64, VertexPath)>,
    pub lengths: Vec<u64>,
    pub cycle: Option<CycleInfo>,
    pub steps_walked: u64,
}

#[derive(Debug, Serialize)]
pub struct CycleInfo {
    /// First step at which the cycle vertex appeared.
    pub entry: u64,
    pub period: u64,
    pub vertex: VertexPath,
}

/// Walks `steps` forward images of `w`, stopping early at a revisit.
pub fn orbit_report(
    map: &SelfMap,
    w: &VertexPath,
    steps: u64,
    budget: &ScanBudget,
) -> Result<OrbitReport> {
    if !map.tree().contains(w) {
        return Err(Error::InvalidSpec(format!(
            "orbit start {w} is not a vertex of `{}`",
            map.tree().name()
        )));
    }
    let mut seen: BTreeMap<VertexPath, u64> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut lengths = Vec::new();
    let mut cycle = None;
    let mut current = w.clone();
    let mut step = 0u64;
    loop {
        if let Some(entry) = seen.get(&current) {
            cycle = Some(CycleInfo {
                entry: *entry,
                period: step - entry,
                vertex: current.clone(),
            });
            break;
        }
        seen.insert(current.clone(), step);
        vertices.push((step, current.clone()));
        lengths.push(current.length());
        if step >= steps {
            break;
        }
        current = map.image(&current)?;
        budget.check_len(&current, "orbit walk")?;
        step += 1;
    }
    Ok(OrbitReport {
        start: w.clone(),
        vertices,
        lengths,
        cycle,
        steps_walked: step,
    })
}

/// A verified periodic point: iterating the map `period` times returns to
/// `vertex`.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicPoint {
    pub vertex: VertexPath,
    pub period: u64,
}

#[derive(Debug, Serialize)]
pub struct PeriodicScan {
    /// Verified cycles discovered by the scan (at most one per cycle).
    pub found: Vec<PeriodicPoint>,
    pub declared_free: Option<bool>,
    pub scanned: u64,
    pub horizon: u64,
}

/// Walks the orbit of every truncation vertex looking for revisits; each
/// revisit pins down a cycle, which is reverified by direct iteration. With
/// declared length growth a walk stops once its length can never return.
pub fn periodic_point_scan(
    map: &SelfMap,
    depth: u64,
    horizon: u64,
    budget: &ScanBudget,
) -> Result<PeriodicScan> {
    let trunc = map.tree().truncation(depth, budget)?;
    let growth = map.metadata().length_increasing_from;
    let mut found: Vec<PeriodicPoint> = Vec::new();
    let mut cycle_members: BTreeSet<VertexPath> = BTreeSet::new();
    let mut scanned = 0u64;
    for v in trunc.vertices() {
        scanned += 1;
        let mut seen: BTreeMap<VertexPath, u64> = BTreeMap::new();
        let mut current = v.clone();
        let mut step = 0u64;
        loop {
            if cycle_members.contains(&current) {
                break; // cycle already recorded through another start
            }
            if let Some(entry) = seen.get(&current) {
                let period = step - entry;
                let check = map.iterate(&current, period, budget)?;
                if check != current {
                    return Err(Error::TheoremViolation(format!(
                        "revisited vertex {current} failed cycle verification"
                    )));
                }
                if !cycle_members.contains(&current) {
                    let mut member = current.clone();
                    for _ in 0..period {
                        cycle_members.insert(member.clone());
                        member = map.image(&member)?;
                    }
                    found.push(PeriodicPoint {
                        vertex: current.clone(),
                        period,
                    });
                }
                break;
            }
            if let Some(n) = growth {
                if current.length() >= n.max(v.length() + 1) {
                    break; // lengths only grow from here; no return possible
                }
            }
            if step >= horizon || current.length() > SOFT_LENGTH_CEILING {
                break;
            }
            seen.insert(current.clone(), step);
            current = map.image(&current)?;
            budget.check_len(&current, "periodic scan")?;
            step += 1;
        }
    }
    if map.metadata().periodic_point_free == Some(true) {
        if let Some(p) = found.first() {
            return Err(Error::MetadataViolation {
                map: map.name().to_string(),
                detail: format!(
                    "declared free of periodic points, but {} has period {}",
                    p.vertex, p.period
                ),
            });
        }
    }
    Ok(PeriodicScan {
        found,
        declared_free: map.metadata().periodic_point_free,
        scanned,
        horizon,
    })
}

#[derive(Debug, Serialize)]
pub struct InjectivityScan {
    pub scanned: u64,
    /// Sampled collisions `(u, u', shared image)`.
    pub collisions: Vec<(VertexPath, VertexPath, VertexPath)>,
    pub observed_injective: bool,
    pub declared: Option<bool>,
}

/// Hash-joins images over a truncation.
pub fn injectivity_scan(map: &SelfMap, depth: u64, budget: &ScanBudget) -> Result<InjectivityScan> {
    let trunc = map.tree().truncation(depth, budget)?;
    let mut images: BTreeMap<VertexPath, VertexPath> = BTreeMap::new();
    let mut collisions = Vec::new();
    let mut scanned = 0u64;
    for v in trunc.vertices() {
        scanned += 1;
        let image = map.image(v)?;
        budget.check_len(&image, "injectivity scan")?;
        if let Some(prev) = images.get(&image) {
            if collisions.len() < 8 {
                collisions.push((prev.clone(), v.clone(), image.clone()));
            }
        } else {
            images.insert(image, v.clone());
        }
    }
    if map.metadata().injective == Some(true) {
        if let Some((u, v, w)) = collisions.first() {
            return Err(Error::MetadataViolation {
                map: map.name().to_string(),
                detail: format!("declared injective, but {u} and {v} share the image {w}"),
            });
        }
    }
    Ok(InjectivityScan {
        scanned,
        observed_injective: collisions.is_empty(),
        collisions,
        declared: map.metadata().injective,
    })
}

/// Intersection times of a finite vertex set with its own forward images.
#[derive(Debug, Serialize)]
pub struct RunAwayScan {
    pub set: Vec<VertexPath>,
    /// Steps `j` in `1..=horizon` at which some iterated image lands back in
    /// the set.
    pub times: Vec<u64>,
    /// Whether `times` provably holds every return: each track either died or
    /// certifiably outgrew the set under declared length growth.
    pub complete: bool,
    pub steps_scanned: u64,
    pub horizon: u64,
}

/// Iterates a finite set forward, recording the steps at which the images
/// still meet it. A track whose image outgrows both the set and a declared
/// growth threshold can never return and is retired; once every track has
/// retired that way, the recorded times are the whole intersection set.
/// Without the certificate, tracks beyond the soft length ceiling are
/// dropped as merely observed.
pub fn run_away_scan(
    map: &SelfMap,
    set: &[VertexPath],
    horizon: u64,
    budget: &ScanBudget,
) -> Result<RunAwayScan> {
    if set.is_empty() || horizon == 0 {
        return Err(Error::PreconditionUnmet(
            "run-away scans need a nonempty set and a positive horizon".into(),
        ));
    }
    let members: BTreeSet<VertexPath> = set.iter().cloned().collect();
    let max_len = members.iter().map(|v| v.length()).max().unwrap_or(0);
    let growth = map.metadata().length_increasing_from;
    let mut images: Vec<VertexPath> = members.iter().cloned().collect();
    let mut times = Vec::new();
    let mut retirements_certified = true;
    let mut step = 0u64;
    while step < horizon && !images.is_empty() {
        step += 1;
        for img in images.iter_mut() {
            *img = map.image(img)?;
            budget.check_len(img, "run-away scan")?;
        }
        if images.iter().any(|img| members.contains(img)) {
            times.push(step);
        }
        images.retain(|img| {
            let certified_gone = match growth {
                Some(n) => img.length() > max_len.max(n),
                None => false,
            };
            if certified_gone {
                return false;
            }
            if img.length() > SOFT_LENGTH_CEILING {
                retirements_certified = false;
                return false;
            }
            true
        });
    }
    Ok(RunAwayScan {
        set: members.into_iter().collect(),
        complete: images.is_empty() && retirements_certified,
        times,
        steps_scanned: step,
        horizon,
    })
}

/// Distances of one parent edge pushed forward through the map.
#[derive(Debug, Serialize)]
pub struct SeparationTrack {
    pub anchor: VertexPath,
    /// `dist(map^n(anchor), map^n(parent))` for `n = 1..=steps`.
    pub distances: Vec<u64>,
    pub max: u64,
    /// Whether the second half of the track exceeds the first half.
    pub grew: bool,
}

/// Vertices beyond this length stop soft scans: expanding maps outgrow any
/// horizon long before it, and the question at hand is already answered.
const SOFT_LENGTH_CEILING: u64 = 1 << 16;

/// Tracks the forward separation of `anchor` from its parent. The walk stops
/// early once either iterate outgrows the soft length ceiling.
pub fn separation_track(
    map: &SelfMap,
    anchor: &VertexPath,
    steps: u64,
    budget: &ScanBudget,
) -> Result<SeparationTrack> {
    let parent = anchor.parent().ok_or_else(|| {
        Error::PreconditionUnmet("separation tracks need a non-root anchor".into())
    })?;
    let mut a = anchor.clone();
    let mut b = parent;
    let mut distances = Vec::new();
    for _ in 0..steps {
        a = map.image(&a)?;
        b = map.image(&b)?;
        budget.check_len(&a, "separation track")?;
        budget.check_len(&b, "separation track")?;
        distances.push(a.distance(&b));
        if a.length() > SOFT_LENGTH_CEILING || b.length() > SOFT_LENGTH_CEILING {
            break;
        }
    }
    let max = distances.iter().copied().max().unwrap_or(0);
    let half = distances.len() / 2;
    let first_half = distances[..half].iter().copied().max().unwrap_or(0);
    let second_half = distances[half..].iter().copied().max().unwrap_or(0);
    let grew = second_half > first_half;
    Ok(SeparationTrack {
        anchor: anchor.clone(),
        distances,
        max,
        grew,
    })
}

/// The separation track weighted by `|lambda|^n`; bounded weighted
/// separation at one edge obstructs hypercyclicity.
#[derive(Debug, Serialize)]
pub struct WeightedSeparation {
    pub anchor: VertexPath,
    pub terms: Vec<Magnitude>,
    pub sup: Magnitude,
    /// Whether the supremum is already attained in the first half.
    pub bounded_observed: bool,
}

pub fn weighted_separation(
    map: &SelfMap,
    lambda: &Scalar,
    anchor: &VertexPath,
    steps: u64,
    budget: &ScanBudget,
) -> Result<WeightedSeparation> {
    let track = separation_track(map, anchor, steps, budget)?;
    let modulus = lambda.modulus();
    let mut terms = Vec::with_capacity(track.distances.len());
    let mut weight = Magnitude::from_count(1);
    for d in &track.distances {
        weight = weight.mul(&modulus);
        terms.push(weight.mul(&Magnitude::from_count(*d)));
    }
    let sup = terms.iter().cloned().max().unwrap_or_else(Magnitude::zero);
    let half = terms.len() / 2;
    let first_half = terms[..half].iter().cloned().max();
    let bounded_observed = match first_half {
        Some(m) => m >= sup,
        None => true,
    };
    Ok(WeightedSeparation {
        anchor: anchor.clone(),
        terms,
        sup,
        bounded_observed,
    })
}

/// Strength of the conclusion a backward-time scan reached.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimesAssessment {
    /// An empty preimage level was reached and the preimage relation was
    /// complete over the scan, so the set of times is provably finite.
    ProvablyFinite,
    /// An empty preimage level was reached, but only within an uncertified
    /// scan; unscanned deep vertices could still extend the set.
    EmptyWithinScan,
    /// A preimage level left the scanned region before any gap appeared.
    Truncated,
}

/// The set of backward times of one vertex: the `n` for which the `n`-fold
/// preimage is nonempty. Emptiness at one time forces emptiness at all later
/// times, so the first gap settles finiteness of the whole set.
#[derive(Debug, Serialize)]
pub struct PreimageTimes {
    pub vertex: VertexPath,
    /// Times with nonempty preimage, up to the horizon.
    pub times: Vec<u64>,
    /// First time with empty preimage, if one was reached.
    pub exhausted_at: Option<u64>,
    /// Whether the preimage relation was complete over the scan.
    pub relation_complete: bool,
    pub assessment: TimesAssessment,
    pub scan_depth: u64,
}

/// Computes backward times by iterated preimage sets over a truncation scan.
/// The relation is complete, and the gap conclusive, when declared length
/// growth bounds every preimage inside the scan.
pub fn preimage_times(
    map: &SelfMap,
    vertex: &VertexPath,
    depth: u64,
    horizon: u64,
    budget: &ScanBudget,
) -> Result<PreimageTimes> {
    let slack = 4;
    let scan_depth = match map.metadata().length_increasing_from {
        Some(n) => depth.max(n).max(vertex.length()),
        None => depth.max(vertex.length()) + slack,
    };
    let trunc = map.tree().truncation(scan_depth, budget)?;
    let mut preimages: BTreeMap<VertexPath, Vec<VertexPath>> = BTreeMap::new();
    for u in trunc.vertices() {
        let image = map.image(u)?;
        budget.check_len(&image, "preimage scan")?;
        preimages.entry(image).or_default().push(u.clone());
    }
    // With declared growth, any preimage of a scanned vertex is shorter than
    // the scan depth or below the threshold, hence inside the scan.
    let relation_complete = map.metadata().length_increasing_from.is_some();

    let mut current: BTreeSet<VertexPath> = BTreeSet::new();
    current.insert(vertex.clone());
    let mut times = Vec::new();
    let mut exhausted_at = None;
    let mut assessment = None;
    for n in 1..=horizon {
        let mut next: BTreeSet<VertexPath> = BTreeSet::new();
        for v in &current {
            if let Some(pre) = preimages.get(v) {
                next.extend(pre.iter().cloned());
            }
        }
        if next.is_empty() {
            exhausted_at = Some(n);
            assessment = Some(if relation_complete {
                TimesAssessment::ProvablyFinite
            } else {
                TimesAssessment::EmptyWithinScan
            });
            break;
        }
        // Sets beyond the scan depth are unreliable; stop rather than claim.
        if next.iter().any(|u| u.length() >= scan_depth) {
            assessment = Some(TimesAssessment::Truncated);
            break;
        }
        times.push(n);
        current = next;
    }
    let assessment = match assessment {
        Some(found) => found,
        None => {
            return Err(Error::HorizonExhausted {
                context: format!("backward times of {vertex} under {}", map.name()),
                horizon,
            })
        }
    };
    Ok(PreimageTimes {
        vertex: vertex.clone(),
        times,
        exhausted_at,
        relation_complete,
        assessment,
        scan_depth,
    })
}

#[derive(Debug, Serialize)]
pub struct GrowthScan {
    /// Least observed level from which every scanned vertex strictly grows,
    /// if the deepest scanned level is already clean.
    pub observed_from: Option<u64>,
    /// Deepest scanned vertex whose image fails to grow, if any.
    pub witness: Option<VertexPath>,
    pub declared: Option<u64>,
    pub scan_depth: u64,
}

/// Scans for eventual length growth of images.
pub fn growth_scan(map: &SelfMap, depth: u64, budget: &ScanBudget) -> Result<GrowthScan> {
    let trunc = map.tree().truncation(depth, budget)?;
    let declared = map.metadata().length_increasing_from;
    let mut worst: Option<VertexPath> = None;
    for v in trunc.vertices() {
        let image = map.image(v)?;
        budget.check_len(&image, "growth scan")?;
        if image.length() <= v.length() {
            if let Some(n) = declared {
                if v.length() >= n {
                    return Err(Error::MetadataViolation {
                        map: map.name().to_string(),
                        detail: format!(
                            "declared growth from {n}, but |map({v})| = {} at length {}",
                            image.length(),
                            v.length()
                        ),
                    });
                }
            }
            if worst.as_ref().map_or(true, |w| v.length() >= w.length()) {
                worst = Some(v.clone());
            }
        }
    }
    // A clean observed tail must span at least two levels; a single clean
    // level flickers with the scan depth on maps that alternate.
    let observed_from = match &worst {
        None => Some(0),
        Some(w) if w.length() + 2 <= depth => Some(w.length() + 1),
        Some(_) => None,
    };
    Ok(GrowthScan {
        observed_from,
        witness: worst,
        declared,
        scan_depth: depth,
    })
}

/// One backward step of the weighted operator: `lambda^{-n} f(map^{-n}(.))`,
/// zero where the backward chain dies.
#[derive(Serialize)]
pub struct BackwardGeometric {
    pub steps: u64,
    pub norm: Magnitude,
    /// Whether every backward chain either resolved or provably ended inside
    /// the scan.
    pub complete: bool,
    pub scan_depth: u64,
    #[serde(skip)]
    pub function: TreeFunction,
}

impl std::fmt::Debug for BackwardGeometric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BackwardGeometric")
            .field("steps", &self.steps)
            .field("norm", &self.norm.approx())
            .field("complete", &self.complete)
            .finish()
    }
}

/// Computes the backward pull of `f` through `n` preimage steps on a
/// truncation, weighting by `lambda^{-n}`. Needs `|lambda| > 1`, a finitely
/// supported `f`, and an injective preimage relation as far as the scan can
/// see; the weighted pulls then shrink geometrically in norm.
pub fn backward_geometric(
    map: &SelfMap,
    f: &TreeFunction,
    lambda: &Scalar,
    n: u64,
    depth: u64,
    budget: &ScanBudget,
) -> Result<BackwardGeometric> {
    if !magnitude_gt_one(&lambda.modulus()) {
        return Err(Error::PreconditionUnmet(
            "backward geometric pulls need |lambda| > 1".into(),
        ));
    }
    if !matches!(f.support(), SupportHint::FiniteSupport { .. }) {
        return Err(Error::PreconditionUnmet(format!(
            "backward geometric pulls need a finitely supported function, got {}",
            f.name()
        )));
    }
    let slack = 4;
    let scan_depth = match map.metadata().length_increasing_from {
        Some(g) => depth.max(g),
        None => depth + n + slack,
    };
    let trunc = map.tree().truncation(scan_depth, budget)?;
    let mut inverse: BTreeMap<VertexPath, VertexPath> = BTreeMap::new();
    for u in trunc.vertices() {
        let image = map.image(u)?;
        budget.check_len(&image, "backward pull scan")?;
        if let Some(prev) = inverse.insert(image.clone(), u.clone()) {
            let detail = format!("{prev} and {u} share the image {image}");
            if map.metadata().injective == Some(true) {
                return Err(Error::MetadataViolation {
                    map: map.name().to_string(),
                    detail,
                });
            }
            return Err(Error::InjectivityUnknown {
                map: map.name().to_string(),
                detail,
            });
        }
    }
    let growth = map.metadata().length_increasing_from;
    let weight = lambda.recip()?.powu(n);
    let eval = map.tree().truncation(depth, budget)?;
    let mut values: BTreeMap<VertexPath, Scalar> = BTreeMap::new();
    let mut complete = true;
    for v in eval.vertices() {
        let mut current = v.clone();
        let mut alive = true;
        for _ in 0..n {
            match inverse.get(&current) {
                Some(pre) => current = pre.clone(),
                None => {
                    // A gap inside the scan is conclusive under declared
                    // growth; otherwise the chain may continue unseen.
                    let covered = match growth {
                        Some(g) => current.length().max(g) < scan_depth,
                        None => false,
                    };
                    if !covered {
                        complete = false;
                    }
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            let value = weight.clone() * f.eval(&current);
            if !value.is_zero() {
                values.insert(v.clone(), value);
            }
        }
    }
    let function = TreeFunction::from_table(values)
        .with_support(SupportHint::None)
        .with_name(format!("backward({n},{})", f.name()));
    let norm = lip_norm(&function, map.tree(), depth, budget)?.value;
    Ok(BackwardGeometric {
        steps: n,
        norm,
        complete,
        scan_depth,
        function,
    })
}

/// The `n`-step separation of a vertex: the least distance from its `n`-fold
/// image to the `n`-fold image of any other vertex.
#[derive(Debug, Serialize)]
pub struct SeparationM {
    pub n: u64,
    pub vertex: VertexPath,
    /// The `n`-fold image of `vertex`.
    pub image: VertexPath,
    /// The separation; exact when `certified`, otherwise the minimum over the
    /// scan and hence only an upper estimate.
    pub value: u64,
    /// A scanned vertex attaining the minimum, when the scan attained it.
    pub attained_at: Option<VertexPath>,
    /// Whether declared exact geometric separation pins the value.
    pub certified: bool,
    pub scan_depth: u64,
}

/// Computes the `n`-step separation of `vertex` over a truncation. Scans only
/// ever shrink the minimum, so the observed value is an upper estimate;
/// declared exact geometric separation pins it to `ratio^n`, and an observed
/// value below that declaration is a metadata violation.
pub fn separation_m(
    map: &SelfMap,
    n: u64,
    vertex: &VertexPath,
    depth: u64,
    budget: &ScanBudget,
) -> Result<SeparationM> {
    if n == 0 {
        return Err(Error::PreconditionUnmet(
            "separation needs at least one step".into(),
        ));
    }
    let scan_depth = depth.max(vertex.length());
    let trunc = map.tree().truncation(scan_depth, budget)?;
    let target = map.iterate(vertex, n, budget)?;
    let mut best: Option<(u64, VertexPath)> = None;
    for u in trunc.vertices() {
        if u == vertex {
            continue;
        }
        let image = map.iterate(u, n, budget)?;
        let d = image.distance(&target);
        if best.as_ref().map_or(true, |(b, _)| d < *b) {
            best = Some((d, u.clone()));
        }
    }
    let (mut value, mut attained_at) = match best {
        Some((d, u)) => (d, Some(u)),
        None => {
            return Err(Error::PreconditionUnmet(
                "separation needs a second scanned vertex".into(),
            ))
        }
    };
    let mut certified = false;
    let declared_exact = map
        .metadata()
        .geometric_separation
        .as_ref()
        .filter(|g| g.parent_exact && g.min_separation_exact)
        .and_then(|g| u32::try_from(n).ok().and_then(|e| g.ratio.checked_pow(e)));
    if let Some(expected) = declared_exact {
        if value < expected {
            return Err(Error::MetadataViolation {
                map: map.name().to_string(),
                detail: format!(
                    "declared separation {expected} at step {n}, observed {value} near {vertex}"
                ),
            });
        }
        if value > expected {
            // The minimizing partner sits outside the scan; the declaration
            // still pins the exact value.
            value = expected;
            attained_at = None;
        }
        certified = true;
    }
    Ok(SeparationM {
        n,
        vertex: vertex.clone(),
        image: target,
        value,
        attained_at,
        certified,
        scan_depth,
    })
}

/// A tent of width `m` at the `n`-fold image of a vertex: the function
/// `u -> max(0, m - dist(u, center)) / m`. Every increment has size `1/m`,
/// and composing with `map^n` recovers the indicator of the vertex whenever
/// `m` stays within the `n`-step separation.
#[derive(Serialize)]
pub struct TentReport {
    pub n: u64,
    pub vertex: VertexPath,
    pub center: VertexPath,
    pub m_value: u64,
    /// Exact norm `max(1, m - |center|) / m`.
    pub norm: Magnitude,
    /// The tent vanishes strictly below this depth.
    pub support_depth: u64,
    /// Whether `tent(map^n(x))` equalled the indicator of `vertex` at every
    /// scanned `x`.
    pub pullback_exact: bool,
    pub scan_depth: u64,
    #[serde(skip)]
    pub function: TreeFunction,
}

impl std::fmt::Debug for TentReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TentReport")
            .field("n", &self.n)
            .field("center", &self.center)
            .field("m_value", &self.m_value)
            .field("norm", &self.norm.approx())
            .field("pullback_exact", &self.pullback_exact)
            .finish()
    }
}

/// Builds the width-`m` tent at the `n`-fold image of `vertex` and checks the
/// pullback identity on a truncation. With `m` at most the `n`-step
/// separation the pullback is the indicator of `vertex`, while the tent's own
/// norm is of order `1/m`; that gap is what drives backward shrinking.
pub fn tent_function(
    map: &SelfMap,
    n: u64,
    vertex: &VertexPath,
    m: u64,
    depth: u64,
    budget: &ScanBudget,
) -> Result<TentReport> {
    if m == 0 {
        return Err(Error::PreconditionUnmet(
            "tents need a positive width".into(),
        ));
    }
    let center = map.iterate(vertex, n, budget)?;
    let support_depth = center.length() + m - 1;
    let name = format!("tent({n},{vertex},{m})");
    let c = center.clone();
    let function = TreeFunction::new(
        name,
        SupportHint::FiniteSupport {
            depth: support_depth,
        },
        move |u| {
            let d = u.distance(&c);
            if d < m {
                Scalar::from_rational(BigRational::new(BigInt::from(m - d), BigInt::from(m)))
            } else {
                Scalar::zero()
            }
        },
    );
    let scan_depth = depth.max(vertex.length());
    let eval = map.tree().truncation(scan_depth, budget)?;
    let mut pullback_exact = true;
    for x in eval.vertices() {
        let image = map.iterate(x, n, budget)?;
        let want = if x == vertex {
            Scalar::one()
        } else {
            Scalar::zero()
        };
        if function.eval(&image) != want {
            pullback_exact = false;
            break;
        }
    }
    let peak = if m > center.length() {
        m - center.length()
    } else {
        1
    };
    let norm = Scalar::from_rational(BigRational::new(BigInt::from(peak.max(1)), BigInt::from(m)))
        .modulus();
    Ok(TentReport {
        n,
        vertex: vertex.clone(),
        center,
        m_value: m,
        norm,
        support_depth,
        pullback_exact,
        scan_depth,
        function,
    })
}

/// One probe of the separation table.
#[derive(Debug, Serialize)]
pub struct SeparationEntry {
    pub n: u64,
    pub vertex: VertexPath,
    pub image_length: u64,
    pub value: u64,
    pub certified: bool,
}

/// Separation probed across a grid of vertices and step counts: whether the
/// weighted separation grows along every row, and the least additive constant
/// reconciling separations with image lengths.
#[derive(Debug, Serialize)]
pub struct SeparationTable {
    pub entries: Vec<SeparationEntry>,
    /// Least `c <= c_max` with `|map^n(v)| + c >= value` at every entry.
    pub c: Option<u64>,
    /// Whether `|lambda|^n * value` strictly grows in `n` for every grid
    /// vertex.
    pub weighted_growing: bool,
    /// Whether every entry carries a declared exact value.
    pub certified: bool,
    pub scan_depth: u64,
}

/// Probes the separation over vertices of the sampled levels and steps
/// `1..=n_max`, weighting by `|lambda|^n`.
pub fn separation_table(
    map: &SelfMap,
    lambda: &Scalar,
    n_max: u64,
    c_max: u64,
    sample_depth: u64,
    depth: u64,
    budget: &ScanBudget,
) -> Result<SeparationTable> {
    if n_max == 0 {
        return Err(Error::PreconditionUnmet(
            "separation tables need at least one step".into(),
        ));
    }
    let grid = map.tree().truncation(sample_depth, budget)?;
    let modulus = lambda.modulus();
    let mut entries = Vec::new();
    let mut weighted_growing = true;
    let mut deficit = 0u64;
    let mut certified = true;
    let mut scan_depth = depth;
    for v in grid.vertices() {
        let mut previous: Option<Magnitude> = None;
        for n in 1..=n_max {
            let sep = separation_m(map, n, v, depth, budget)?;
            scan_depth = scan_depth.max(sep.scan_depth);
            let weighted = modulus.powu(n).mul(&Magnitude::from_count(sep.value));
            if let Some(prev) = &previous {
                if weighted <= *prev {
                    weighted_growing = false;
                }
            }
            previous = Some(weighted);
            deficit = deficit.max(sep.value.saturating_sub(sep.image.length()));
            certified &= sep.certified;
            entries.push(SeparationEntry {
                n,
                vertex: v.clone(),
                image_length: sep.image.length(),
                value: sep.value,
                certified: sep.certified,
            });
        }
    }
    Ok(SeparationTable {
        entries,
        c: (deficit <= c_max).then_some(deficit),
        weighted_growing,
        certified,
        scan_depth,
    })
}

/// Verdicts for the weighted composition operator's dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsVerdict {
    NotHypercyclicCertified,
    NotHypercyclicEvidence,
    MixingCertified,
    MixingEvidence,
    Inconclusive,
}

/// One row of the condition table: an observation from the scans and the
/// declared certificate, when either exists.
#[derive(Debug, Serialize)]
pub struct ConditionRow {
    pub name: String,
    /// The fact this condition feeds.
    pub key: &'static str,
    pub observed: Option<bool>,
    pub certified: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct HypercyclicityReport {
    pub map: String,
    pub lambda: Scalar,
    pub verdict: DynamicsVerdict,
    /// The fact the verdict rests on (or, when inconclusive, probes).
    pub key: &'static str,
    /// The route or observation behind the verdict, in words.
    pub basis: String,
    pub conditions: Vec<ConditionRow>,
    pub injectivity: InjectivityScan,
    pub periodic: PeriodicScan,
    pub run_away: RunAwayScan,
    pub separation: Vec<SeparationTrack>,
    pub weighted: Vec<WeightedSeparation>,
    pub preimage_samples: Vec<PreimageTimes>,
    /// Whether some backward time sample outran the horizon entirely.
    pub preimage_exhausted: bool,
    pub growth: GrowthScan,
    pub separation_table: SeparationTable,
    pub budgets: DynamicsBudgets,
}

fn magnitude_gt_one(m: &Magnitude) -> bool {
    !m.le_value(&BigRational::one())
}

fn magnitude_le_one(m: &Magnitude) -> bool {
    m.le_value(&BigRational::one())
}

/// Runs the full battery of dynamics scans and resolves the verdict chain
/// for the operator `f -> lambda * f(map(.))`:
///
/// 1. an observed injectivity collision certifies non-hypercyclicity, since
///    every orbit function takes equal values on the colliding pair;
/// 2. a verified periodic point certifies non-hypercyclicity for every
///    weight;
/// 3. a declared parent separation bound (or exact geometric separation with
///    `|lambda| * ratio <= 1`) certifies non-hypercyclicity for
///    `|lambda| <= 1`, since the weighted increment at that edge stays
///    bounded along the whole orbit;
/// 4. with certified injectivity and no periodic points, `|lambda| > 1`
///    upgrades declared length growth or finite preimage times to certified
///    mixing (forward images leave every truncation exactly, backward pulls
///    vanish or shrink geometrically);
/// 5. exact geometric separation with `|lambda| * ratio > 1` and a declared
///    tent offset gives certified mixing through backward tent pulls;
///    forward orbits vanish by `|lambda| < 1` alone, or by declared finite
///    preimage times when `|lambda| >= 1`;
/// 6. otherwise the scans alone produce evidence verdicts or none.
pub fn hypercyclicity_report(
    map: &SelfMap,
    lambda: &Scalar,
    budgets: &DynamicsBudgets,
    budget: &ScanBudget,
) -> Result<HypercyclicityReport> {
    if lambda.is_zero() {
        return Err(Error::InvalidSpec(
            "the zero operator has no dynamics to probe".into(),
        ));
    }
    let meta = map.metadata().clone();
    let modulus = lambda.modulus();

    let injectivity = injectivity_scan(map, budgets.depth, budget)?;
    let periodic = periodic_point_scan(map, budgets.depth, budgets.horizon, budget)?;
    let growth = growth_scan(map, budgets.depth, budget)?;

    // The probe set for run-away behaviour: every vertex of the sampled
    // levels.
    let sample_level = budgets.sample_depth.min(budgets.depth).max(1);
    let trunc = map.tree().truncation(sample_level, budget)?;
    let sampled: Vec<VertexPath> = trunc.vertices().cloned().collect();
    let run_away = run_away_scan(map, &sampled, budgets.horizon, budget)?;

    // Separation anchors: every sampled non-root vertex, user extras, and the
    // declared bound witness.
    let mut anchors: Vec<VertexPath> = sampled.iter().filter(|v| !v.is_root()).cloned().collect();
    anchors.extend(budgets.extra_anchors.iter().cloned());
    if let Some(ps) = &meta.parent_separation_bound {
        anchors.push(ps.w.clone());
    }
    let mut seen_anchors = BTreeSet::new();
    anchors.retain(|a| !a.is_root() && seen_anchors.insert(a.clone()));
    let mut separation = Vec::new();
    let mut weighted = Vec::new();
    for anchor in &anchors {
        separation.push(separation_track(map, anchor, budgets.horizon, budget)?);
        weighted.push(weighted_separation(
            map,
            lambda,
            anchor,
            budgets.horizon,
            budget,
        )?);
    }

    // Backward time samples: the root and the first vertices of the sampled
    // level. A sample that outruns the horizon (an endless backward chain) is
    // recorded rather than fatal.
    let mut preimage_samples = Vec::new();
    let mut preimage_exhausted = false;
    let mut sample_vertices = vec![VertexPath::root()];
    sample_vertices.extend(trunc.level(sample_level).iter().take(2).cloned());
    for v in &sample_vertices {
        match preimage_times(map, v, budgets.depth, budgets.horizon, budget) {
            Ok(p) => preimage_samples.push(p),
            Err(Error::HorizonExhausted { .. }) => preimage_exhausted = true,
            Err(e) => return Err(e),
        }
    }
    let observed_preimage_finite =
        !preimage_exhausted && preimage_samples.iter().all(|p| p.exhausted_at.is_some());

    let table = separation_table(
        map,
        lambda,
        budgets.grid_n_max.max(1),
        budgets.c_max,
        sample_level,
        budgets.depth,
        budget,
    )?;

    let observed_separation_grew = separation.iter().any(|t| t.grew);
    let weighted_bounded = weighted.iter().all(|w| w.bounded_observed);
    let run_away_clean = run_away.complete
        || match run_away.times.last() {
            None => true,
            Some(s) => *s < run_away.steps_scanned,
        };

    // Certified separation facts at one edge.
    let geo = meta.geometric_separation.as_ref();
    let expansion_gt_one =
        geo.map(|g| magnitude_gt_one(&modulus.mul(&Magnitude::from_count(g.ratio))));
    let declared_sep_bounded = meta.parent_separation_bound.is_some() && magnitude_le_one(&modulus);
    let geometric_sep_bounded =
        matches!((geo, expansion_gt_one), (Some(g), Some(false)) if g.parent_exact);
    // The backward tent route: exact separation growth beats the weight.
    let tent_route = geo.is_some_and(|g| {
        g.parent_exact
            && g.min_separation_exact
            && g.tent_offset.is_some()
            && expansion_gt_one == Some(true)
    });

    let sep_growth_certified = if tent_route {
        Some(true)
    } else if geo.is_some_and(|g| g.parent_exact && g.min_separation_exact)
        && expansion_gt_one == Some(false)
    {
        Some(false)
    } else {
        None
    };

    let conditions = vec![
        ConditionRow {
            name: "injective".into(),
            key: keys::NONINJECTIVE_NOT_HYPERCYCLIC,
            observed: Some(injectivity.observed_injective),
            certified: meta.injective,
            detail: format!("{} vertices scanned", injectivity.scanned),
        },
        ConditionRow {
            name: "periodic-point-free".into(),
            key: keys::PERIODIC_POINT_OBSTRUCTION,
            observed: Some(periodic.found.is_empty()),
            certified: meta.periodic_point_free,
            detail: format!(
                "{} starts walked to horizon {}",
                periodic.scanned, periodic.horizon
            ),
        },
        ConditionRow {
            name: "run-away".into(),
            key: keys::COFINITE_RETURN_HYPERCYCLIC,
            observed: Some(run_away_clean),
            certified: run_away.complete.then_some(true),
            detail: match run_away.times.last() {
                Some(s) => format!(
                    "{} returns of {} probes, last at step {s}",
                    run_away.times.len(),
                    run_away.set.len()
                ),
                None => format!("no return among {} probes", run_away.set.len()),
            },
        },
        ConditionRow {
            name: "weighted-separation-unbounded".into(),
            key: keys::PARENT_SEPARATION_UNBOUNDED,
            observed: Some(!weighted_bounded),
            certified: if declared_sep_bounded || geometric_sep_bounded {
                Some(false)
            } else if geo.is_some_and(|g| g.parent_exact) {
                expansion_gt_one
            } else {
                None
            },
            detail: format!("{} anchors tracked", weighted.len()),
        },
        ConditionRow {
            name: "eventual-length-growth".into(),
            key: keys::LENGTH_GROWTH_MIXING,
            observed: Some(growth.observed_from.is_some()),
            certified: growth.declared.map(|_| true),
            detail: match (&growth.observed_from, &growth.witness) {
                (Some(n), _) => format!("growth observed from level {n}"),
                (None, Some(w)) => format!("non-growing image at {w}"),
                (None, None) => "non-growing vertices at the deepest scanned level".into(),
            },
        },
        ConditionRow {
            name: "preimage-times-finite".into(),
            key: keys::PREIMAGE_TIMES_MIXING,
            observed: Some(observed_preimage_finite),
            certified: meta.preimage_times_finite,
            detail: if preimage_exhausted {
                "a backward chain outran the horizon".into()
            } else {
                format!("{} vertices sampled", preimage_samples.len())
            },
        },
        ConditionRow {
            name: "separation-m-growth".into(),
            key: keys::TENT_BACKWARD_MIXING,
            observed: Some(table.weighted_growing && table.c.is_some()),
            certified: sep_growth_certified,
            detail: match table.c {
                Some(c) => format!("weighted separation table grows, length offset {c}"),
                None => "no length offset covers the separation table".into(),
            },
        },
    ];

    let structurally_certified =
        meta.injective == Some(true) && meta.periodic_point_free == Some(true);
    let observed_clean =
        injectivity.observed_injective && periodic.found.is_empty() && run_away_clean;

    // Verdict chain.
    let (verdict, key, basis): (DynamicsVerdict, &'static str, String) = if let Some((u, v, w)) =
        injectivity.collisions.first()
    {
        (
            DynamicsVerdict::NotHypercyclicCertified,
            keys::NONINJECTIVE_NOT_HYPERCYCLIC,
            format!("every orbit function takes equal values at {u} and {v} (image {w})"),
        )
    } else if let Some(p) = periodic.found.first() {
        (
            DynamicsVerdict::NotHypercyclicCertified,
            keys::PERIODIC_POINT_OBSTRUCTION,
            format!(
                "verified periodic point {} of period {}",
                p.vertex, p.period
            ),
        )
    } else if declared_sep_bounded {
        let ps = meta.parent_separation_bound.as_ref().unwrap();
        (
            DynamicsVerdict::NotHypercyclicCertified,
            keys::PARENT_SEPARATION_UNBOUNDED,
            format!(
                "weighted separation at {} stays within {} for this weight",
                ps.w, ps.bound
            ),
        )
    } else if geometric_sep_bounded {
        (
            DynamicsVerdict::NotHypercyclicCertified,
            keys::PARENT_SEPARATION_UNBOUNDED,
            "exact geometric separation keeps weighted increments bounded".into(),
        )
    } else if structurally_certified && magnitude_gt_one(&modulus) && growth.declared.is_some() {
        (
            DynamicsVerdict::MixingCertified,
            keys::LENGTH_GROWTH_MIXING,
            "length-growth-mixing: forward images leave every truncation, backward pulls shrink geometrically".into(),
        )
    } else if structurally_certified
        && magnitude_gt_one(&modulus)
        && meta.preimage_times_finite == Some(true)
    {
        (
            DynamicsVerdict::MixingCertified,
            keys::PREIMAGE_TIMES_MIXING,
            "preimage-times-mixing: backward times of every vertex run out".into(),
        )
    } else if structurally_certified
        && tent_route
        && (modulus.lt_value(&BigRational::one()) || meta.preimage_times_finite == Some(true))
    {
        (
            DynamicsVerdict::MixingCertified,
            keys::TENT_BACKWARD_MIXING,
            "tent-backward-mixing: weighted tents shrink backward while forward orbits vanish"
                .into(),
        )
    } else if magnitude_gt_one(&modulus)
        && observed_clean
        && (observed_preimage_finite || growth.observed_from.is_some())
    {
        (
            DynamicsVerdict::MixingEvidence,
            if growth.observed_from.is_some() {
                keys::LENGTH_GROWTH_MIXING
            } else {
                keys::PREIMAGE_TIMES_MIXING
            },
            "scans consistent with mixing; structural certificates missing".into(),
        )
    } else if observed_clean && table.weighted_growing && table.c.is_some() {
        (
            DynamicsVerdict::MixingEvidence,
            keys::TENT_BACKWARD_MIXING,
            "weighted separation table grows with bounded length offset".into(),
        )
    } else if magnitude_le_one(&modulus) && weighted_bounded && !observed_separation_grew {
        (
            DynamicsVerdict::NotHypercyclicEvidence,
            keys::PARENT_SEPARATION_UNBOUNDED,
            "weighted separation stayed bounded over every tracked edge".into(),
        )
    } else {
        (
            DynamicsVerdict::Inconclusive,
            keys::COFINITE_RETURN_HYPERCYCLIC,
            "no certificate applies and scans point both ways".into(),
        )
    };

    Ok(HypercyclicityReport {
        map: map.name().to_string(),
        lambda: lambda.clone(),
        verdict,
        key,
        basis,
        conditions,
        injectivity,
        periodic,
        run_away,
        separation,
        weighted,
        preimage_samples,
        preimage_exhausted,
        growth,
        separation_table: table,
        budgets: budgets.clone(),
    })
}
