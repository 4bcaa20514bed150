//! Spectral probes for composition operators: geometric eigenfunctions
//! anchored outside the image, the power eigenfamily on the path tree,
//! pointwise resolvent solutions, and the submultiplicative spectral radius
//! sequence.
//!
//! Every probe verifies its defining equation on a truncation and reports the
//! observed residual together with the certificate level of the structural
//! facts it used. Declared metadata upgrades `Observed` to `Certified`; a
//! contradiction between a declared fact and a scan aborts the probe.

use crate::compop::SelfMap;
use crate::error::{Error, Result};
use crate::keys;
use crate::lip::{decay_profile, lip_norm, SupportHint, TreeFunction};
use crate::scalar::{Magnitude, Scalar};
use crate::tree::{ScanBudget, VertexPath};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Residual tolerance below which a floating-point probe is accepted.
pub const EIGEN_TOL: f64 = 1e-9;

/// Whether a reported fact is certified by declared structural metadata or
/// rests on the scanned truncation alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertLevel {
    Certified,
    Observed,
}

/// Forward orbit of one vertex, recorded up to a length window.
struct OrbitTable {
    /// Step and vertex for every orbit point of length at most the window.
    entries: Vec<(u64, VertexPath)>,
    /// Whether the table provably contains every orbit point within the
    /// window (declared length growth) or the walk merely left the window
    /// before the horizon.
    complete: CertLevel,
}

/// Walks the orbit of `w`, recording points of length at most `window`.
/// Collisions abort: a periodic orbit admits no geometric eigenfunction.
/// With declared length growth the walk stops, certified, as soon as the
/// orbit outgrows both the window and the growth threshold; otherwise it runs
/// to the horizon and fails if the orbit is still inside the window there.
fn orbit_table(
    map: &SelfMap,
    w: &VertexPath,
    window: u64,
    budget: &ScanBudget,
) -> Result<OrbitTable> {
    let growth = map.metadata().length_increasing_from;
    let mut entries = Vec::new();
    let mut index = BTreeMap::new();
    let mut visited: BTreeSet<VertexPath> = BTreeSet::new();
    let mut current = w.clone();
    let mut step: u64 = 0;
    loop {
        if let Some(entry) = index.get(&current) {
            return Err(Error::OrbitCollision {
                start: w.clone(),
                vertex: current,
                entry: *entry,
                period: step - entry,
            });
        }
        if !visited.insert(current.clone()) {
            // Revisited a point longer than the window.
            let entry = step; // unknown entry step for unrecorded points
            return Err(Error::OrbitCollision {
                start: w.clone(),
                vertex: current,
                entry,
                period: 0,
            });
        }
        if current.length() <= window {
            index.insert(current.clone(), step);
            entries.push((step, current.clone()));
        }
        if let Some(n) = growth {
            if current.length() > window.max(n) {
                // Lengths now increase strictly forever; nothing returns.
                return Ok(OrbitTable {
                    entries,
                    complete: CertLevel::Certified,
                });
            }
        }
        if step >= budget.orbit_horizon {
            if current.length() <= window {
                return Err(Error::HorizonExhausted {
                    context: format!("orbit of {w} still inside the window"),
                    horizon: budget.orbit_horizon,
                });
            }
            return Ok(OrbitTable {
                entries,
                complete: CertLevel::Observed,
            });
        }
        current = map.image(&current)?;
        budget.check_len(&current, "orbit walk")?;
        step += 1;
    }
}

/// A geometric eigenfunction probe: the function summing `lambda^n` at the
/// `n`-th orbit point of an anchor outside the map's image.
#[derive(Serialize)]
pub struct EigenPair {
    pub lambda: Scalar,
    pub anchor: VertexPath,
    /// Orbit points of length at most `table_window` enter the table.
    pub table_window: u64,
    pub orbit_points_recorded: u64,
    pub orbit_complete: CertLevel,
    pub anchor_outside_image: CertLevel,
    /// Largest observed `|f(map(v)) - lambda f(v)|` over the truncation.
    pub residual: Magnitude,
    pub residual_exact: bool,
    pub accepted: bool,
    pub norm_observed: Magnitude,
    /// Whether the increment profile decays across the scan, the observable
    /// sign of little-space membership.
    pub decay_observed: bool,
    pub scan_depth: u64,
    #[serde(skip)]
    pub function: TreeFunction,
}

impl fmt::Debug for EigenPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenPair")
            .field("lambda", &self.lambda)
            .field("anchor", &self.anchor)
            .field("residual", &self.residual.approx())
            .field("accepted", &self.accepted)
            .finish()
    }
}

/// Builds and verifies the geometric eigenfunction of `lambda` anchored at
/// `w`: `f` equal to `lambda^n` at the `n`-th forward image of `w` and zero
/// elsewhere. When `w` lies outside the image and the map is injective this
/// satisfies `f(map(v)) = lambda f(v)` everywhere; the report carries the
/// observed residual of exactly that equation.
pub fn geometric_eigenfunction(
    map: &SelfMap,
    w: &VertexPath,
    lambda: &Scalar,
    depth: u64,
    budget: &ScanBudget,
) -> Result<EigenPair> {
    if !map.tree().contains(w) {
        return Err(Error::InvalidSpec(format!(
            "anchor {w} is not a vertex of `{}`",
            map.tree().name()
        )));
    }
    // Images of the truncation: the residual scan needs f there, and the same
    // pass checks that nothing maps onto the anchor.
    let trunc = map.tree().truncation(depth, budget)?;
    let mut images = BTreeMap::new();
    let mut window = depth;
    for v in trunc.vertices() {
        let image = map.image(v)?;
        budget.check_len(&image, "eigen scan")?;
        if image == *w {
            return Err(Error::NotOutsideImage {
                map: map.name().to_string(),
                vertex: w.clone(),
                preimage: v.clone(),
            });
        }
        window = window.max(image.length());
        images.insert(v.clone(), image);
    }
    let growth = map.metadata().length_increasing_from;
    let anchor_outside_image = match growth {
        // Any preimage of w would be shorter than w or below the growth
        // threshold, and the scan covered both ranges.
        Some(n) if depth >= n.max(w.length()) => CertLevel::Certified,
        _ => CertLevel::Observed,
    };

    let table = orbit_table(map, w, window, budget)?;
    let mut values: BTreeMap<VertexPath, Scalar> = BTreeMap::new();
    let mut power = Scalar::one();
    let mut last_step = 0u64;
    for (step, vertex) in &table.entries {
        for _ in last_step..*step {
            power = power * lambda.clone();
        }
        last_step = *step;
        values.insert(vertex.clone(), power.clone());
    }
    let orbit_points_recorded = table.entries.len() as u64;
    let function = TreeFunction::from_table(values.clone())
        .with_support(SupportHint::None)
        .with_name(format!("geometric({lambda},{w})"));

    // Residual of the eigen equation over the truncation. Both vertices are
    // inside the table window, so table lookups are conclusive.
    let zero = Scalar::zero();
    let mut residual = Magnitude::zero();
    for (v, image) in &images {
        let fv = values.get(v).unwrap_or(&zero);
        let fi = values.get(image).unwrap_or(&zero);
        let diff = (fi.clone() - lambda.clone() * fv.clone()).modulus();
        if diff > residual {
            residual = diff;
        }
    }
    let accepted = residual.is_zero() || residual.approx() <= EIGEN_TOL;

    let profile = decay_profile(&function, map.tree(), depth, budget)?;
    let decay_observed = match (profile.first(), profile.last()) {
        (Some(first), Some(last)) => last.max.is_zero() || last.max < first.max,
        _ => true,
    };
    let norm_observed = lip_norm(&function, map.tree(), depth, budget)?.value;

    Ok(EigenPair {
        lambda: lambda.clone(),
        anchor: w.clone(),
        table_window: window,
        orbit_points_recorded,
        orbit_complete: table.complete,
        anchor_outside_image,
        residual_exact: residual.is_exact(),
        accepted,
        residual,
        norm_observed,
        decay_observed,
        scan_depth: depth,
        function,
    })
}

/// Power eigenfamily probe on the path tree.
#[derive(Serialize)]
pub struct PowerEigenReport {
    pub map: String,
    pub lambda: Scalar,
    /// Exponent of the eigenfunction `m -> (m+1)^mu`.
    pub mu: Scalar,
    /// Whether the probe ran in exact arithmetic (`lambda` an integer power
    /// of the slope).
    pub exact: bool,
    pub residual: Magnitude,
    pub accepted: bool,
    pub norm_observed: Magnitude,
    pub decay_observed: bool,
    pub scan_depth: u64,
    #[serde(skip)]
    pub function: TreeFunction,
}

impl fmt::Debug for PowerEigenReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerEigenReport")
            .field("lambda", &self.lambda)
            .field("mu", &self.mu)
            .field("accepted", &self.accepted)
            .finish()
    }
}

/// `n == a^k`?
fn int_log(a: u64, n: &BigInt) -> Option<u32> {
    let base = BigInt::from(a);
    let mut power = BigInt::one();
    let mut k = 0u32;
    while power < *n {
        power *= &base;
        k += 1;
        if k > 4096 {
            return None;
        }
    }
    (power == *n).then_some(k)
}

/// Exponent `k` with `lambda == a^k`, for exact positive rational `lambda`
/// whose reduced numerator or denominator is a pure power of `a`.
fn exact_power_exponent(a: u64, lambda: &Scalar) -> Option<i64> {
    let r = lambda.as_real_rational()?;
    if !r.numer().is_positive() {
        return None;
    }
    if r.denom().is_one() {
        int_log(a, r.numer()).map(|k| k as i64)
    } else if r.numer().is_one() {
        int_log(a, r.denom()).map(|k| -(k as i64))
    } else {
        None
    }
}

/// Probes the power eigenfamily of the map `m -> a*m + (a-1)` on the path
/// tree, for which `1 + map(m) = a(1 + m)` exactly: `f(m) = (m+1)^mu` with
/// `a^mu = lambda` satisfies the eigen equation for every nonzero `lambda`.
/// Exact when `lambda` is an integer power of `a` (in particular `lambda = 1`
/// gives the constant function); floating point via the principal logarithm
/// otherwise.
pub fn power_eigen_path(
    a: u64,
    lambda: &Scalar,
    depth: u64,
    budget: &ScanBudget,
) -> Result<PowerEigenReport> {
    if a < 2 {
        return Err(Error::InvalidSpec(
            "the power eigenfamily needs a slope a >= 2".into(),
        ));
    }
    // Outside the open disk |lambda| < a the formal power function no longer
    // has vanishing increments, so it is not a member of the little space.
    let a_rat = BigRational::from_integer(BigInt::from(a));
    if lambda.is_zero() || !lambda.modulus().lt_value(&a_rat) {
        return Err(Error::PreconditionUnmet(format!(
            "the power eigenfamily needs 0 < |lambda| < {a}"
        )));
    }
    let map = SelfMap::affine_path(a, a - 1, false)?;
    let exponent = exact_power_exponent(a, lambda);
    let (mu, function, exact) = match exponent {
        Some(k) => {
            let mu = Scalar::from_integer(k);
            let f = TreeFunction::new(
                format!("power({k})"),
                if k <= 1 {
                    SupportHint::SupWithin { depth: 1 }
                } else {
                    SupportHint::None
                },
                move |v| {
                    let n = BigInt::from(v.length() + 1);
                    if k >= 0 {
                        Scalar::from_rational(BigRational::from_integer(n.pow(k as u32)))
                    } else {
                        Scalar::from_rational(BigRational::new(BigInt::one(), n.pow(-k as u32)))
                    }
                },
            );
            (mu, f, true)
        }
        None => {
            let lam = lambda.to_complex64();
            let ln_a = (a as f64).ln();
            let mu = Complex64::new(lam.norm().ln() / ln_a, lam.arg() / ln_a);
            let f = TreeFunction::new(format!("power({mu})"), SupportHint::None, move |v| {
                let ln_n = ((v.length() + 1) as f64).ln();
                let value = (mu * ln_n).exp();
                Scalar::complex(value.re, value.im)
            });
            (Scalar::complex(mu.re, mu.im), f, false)
        }
    };

    let trunc = map.tree().truncation(depth, budget)?;
    let mut residual = Magnitude::zero();
    for v in trunc.vertices() {
        let image = map.image(v)?;
        let diff = (function.eval(&image) - lambda.clone() * function.eval(v)).modulus();
        if diff > residual {
            residual = diff;
        }
    }
    if exact && !residual.is_zero() {
        return Err(Error::TheoremViolation(format!(
            "exact power eigenfunction for {lambda} left residual {residual}"
        )));
    }
    let accepted = residual.is_zero() || residual.approx() <= EIGEN_TOL;

    let profile = decay_profile(&function, map.tree(), depth, budget)?;
    let decay_observed = match (profile.first(), profile.last()) {
        (Some(first), Some(last)) => last.max.is_zero() || last.max < first.max,
        _ => true,
    };
    let norm_observed = lip_norm(&function, map.tree(), depth, budget)?.value;

    Ok(PowerEigenReport {
        map: map.name().to_string(),
        lambda: lambda.clone(),
        mu,
        exact,
        residual,
        accepted,
        norm_observed,
        decay_observed,
        scan_depth: depth,
        function,
    })
}

/// Which dense-range construction solves `(C - lambda) f = chi_w`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolventMode {
    /// `f = sum_{n>=1} lambda^{n-1} chi_{map^n(w)}`: needs `|lambda| < 1` and
    /// an injective map.
    ForwardOrbit,
    /// `f = -sum_{n>=0} lambda^{-(n+1)} chi_{map^{-n}(w)}`: needs
    /// `|lambda| > 1`.
    BackwardChain,
    /// The backward sum when some `map^{-N}(w)` is empty, so it is finite and
    /// any `lambda != 0` works.
    FiniteChain,
}

impl fmt::Display for ResolventMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResolventMode::ForwardOrbit => "forward-orbit",
            ResolventMode::BackwardChain => "backward-chain",
            ResolventMode::FiniteChain => "finite-chain",
        })
    }
}

/// Pointwise solution of `(C - lambda) f = chi_w` on a truncation.
#[derive(Serialize)]
pub struct ResolventReport {
    pub lambda: Scalar,
    pub vertex: VertexPath,
    pub mode: ResolventMode,
    /// Orbit steps walked (forward) or preimage levels materialized
    /// (backward).
    pub terms: u64,
    /// Largest observed `|f(map(v)) - lambda f(v) - chi_w(v)|` over the
    /// truncation.
    pub residual: Magnitude,
    pub residual_exact: bool,
    pub accepted: bool,
    /// Certified when every lookup was conclusive: the orbit provably left
    /// the window, or every preimage level is complete and the chains died.
    pub completeness: CertLevel,
    pub solution_norm_observed: Magnitude,
    pub scan_depth: u64,
    #[serde(skip)]
    pub solution: TreeFunction,
}

impl fmt::Debug for ResolventReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResolventReport")
            .field("lambda", &self.lambda)
            .field("mode", &self.mode)
            .field("terms", &self.terms)
            .field("residual", &self.residual.approx())
            .field("accepted", &self.accepted)
            .finish()
    }
}

const PREIMAGE_SLACK: u64 = 4;

/// Solves `(C - lambda) f = chi_w` pointwise by one of the three series
/// constructions and verifies the identity on the truncation. Forward mode
/// walks the orbit of `w`; the backward modes grow the preimage levels
/// `map^{-n}(w)` until they die out or the horizon is hit.
pub fn resolvent_solution(
    map: &SelfMap,
    w: &VertexPath,
    lambda: &Scalar,
    mode: ResolventMode,
    depth: u64,
    horizon: u64,
    budget: &ScanBudget,
) -> Result<ResolventReport> {
    let one = BigRational::one();
    let modulus = lambda.modulus();
    match mode {
        ResolventMode::ForwardOrbit => {
            if !modulus.lt_value(&one) {
                return Err(Error::PreconditionUnmet(
                    "the forward-orbit series needs |lambda| < 1".into(),
                ));
            }
        }
        ResolventMode::BackwardChain => {
            if modulus.le_value(&one) {
                return Err(Error::PreconditionUnmet(
                    "the backward-chain series needs |lambda| > 1".into(),
                ));
            }
        }
        ResolventMode::FiniteChain => {
            if lambda.is_zero() {
                return Err(Error::PreconditionUnmet(
                    "the finite-chain series needs lambda != 0".into(),
                ));
            }
        }
    }

    let trunc = map.tree().truncation(depth, budget)?;
    // The identity is checked at every truncation vertex, which reads f one
    // forward step out of the window.
    let mut images = BTreeMap::new();
    let mut window = depth.max(w.length());
    for v in trunc.vertices() {
        let image = map.image(v)?;
        budget.check_len(&image, "resolvent scan")?;
        window = window.max(image.length());
        images.insert(v.clone(), image);
    }

    let growth = map.metadata().length_increasing_from;
    let mut values: BTreeMap<VertexPath, Scalar> = BTreeMap::new();
    let mut completeness = CertLevel::Certified;
    let mut terms = 0u64;

    match mode {
        ResolventMode::ForwardOrbit => {
            match map.metadata().injective {
                Some(true) => {}
                Some(false) => {
                    return Err(Error::PreconditionUnmet(
                        "the forward-orbit series needs an injective map".into(),
                    ))
                }
                None => {
                    // A collision-free scan supports the construction but
                    // cannot certify it beyond the window.
                    let mut seen: BTreeMap<VertexPath, VertexPath> = BTreeMap::new();
                    for (v, image) in &images {
                        if let Some(other) = seen.insert(image.clone(), v.clone()) {
                            return Err(Error::InjectivityUnknown {
                                map: map.name().to_string(),
                                detail: format!("{other} and {v} share the image {image}"),
                            });
                        }
                    }
                    completeness = CertLevel::Observed;
                }
            }
            let mut order = vec![w.clone()];
            let mut visited: BTreeSet<VertexPath> = BTreeSet::new();
            visited.insert(w.clone());
            let mut current = w.clone();
            let mut coeff = Scalar::one();
            loop {
                current = map.image(&current)?;
                budget.check_len(&current, "resolvent orbit")?;
                terms += 1;
                if !visited.insert(current.clone()) {
                    let entry = order.iter().position(|v| v == &current).unwrap_or(0) as u64;
                    return Err(Error::OrbitCollision {
                        start: w.clone(),
                        vertex: current,
                        entry,
                        period: terms - entry,
                    });
                }
                order.push(current.clone());
                values.insert(current.clone(), coeff.clone());
                coeff = coeff * lambda.clone();
                match growth {
                    // Past this length the orbit can never re-enter the
                    // window, so the remaining terms vanish on it.
                    Some(n) if current.length() > window.max(n) => break,
                    _ => {}
                }
                if terms >= horizon {
                    if current.length() <= window {
                        return Err(Error::HorizonExhausted {
                            context: format!("forward orbit of {w} is still inside the window"),
                            horizon,
                        });
                    }
                    completeness = CertLevel::Observed;
                    break;
                }
            }
        }
        ResolventMode::BackwardChain | ResolventMode::FiniteChain => {
            // Preimages may be longer than their image, so the inverse
            // relation is scanned over a deeper window.
            let scan_depth = depth.max(w.length()) + PREIMAGE_SLACK;
            let inv_scan = map.tree().truncation(scan_depth, budget)?;
            let mut preimages: BTreeMap<VertexPath, Vec<VertexPath>> = BTreeMap::new();
            for u in inv_scan.vertices() {
                let image = map.image(u)?;
                budget.check_len(&image, "resolvent preimage scan")?;
                preimages.entry(image).or_default().push(u.clone());
            }
            // With declared length growth, every backward chain from w stays
            // within length max(N, |w|), so the scan sees complete levels.
            let levels_complete = match growth {
                Some(n) => scan_depth >= n.max(w.length()),
                None => false,
            };
            if !levels_complete {
                completeness = CertLevel::Observed;
            }
            let inv_lambda = lambda.recip()?;
            let mut coeff = Scalar::zero() - inv_lambda.clone();
            let mut level = vec![w.clone()];
            loop {
                for u in &level {
                    let entry = values.entry(u.clone()).or_insert_with(Scalar::zero);
                    *entry = entry.clone() + coeff.clone();
                }
                level = level
                    .iter()
                    .flat_map(|u| preimages.get(u).cloned().unwrap_or_default())
                    .collect();
                if level.is_empty() {
                    break;
                }
                terms += 1;
                if terms >= horizon {
                    return Err(Error::HorizonExhausted {
                        context: format!("preimage chains of {w} did not terminate"),
                        horizon,
                    });
                }
                coeff = coeff * inv_lambda.clone();
            }
        }
    }

    let zero = Scalar::zero();
    let chi = TreeFunction::indicator(w.clone());
    let mut residual = Magnitude::zero();
    for v in trunc.vertices() {
        let fv = values.get(v).unwrap_or(&zero);
        let fi = values.get(&images[v]).unwrap_or(&zero);
        let diff = (fi.clone() - lambda.clone() * fv.clone() - chi.eval(v)).modulus();
        if diff > residual {
            residual = diff;
        }
    }
    let accepted = residual.is_zero() || residual.approx() <= EIGEN_TOL;

    let support = match mode {
        ResolventMode::ForwardOrbit => SupportHint::None,
        _ if completeness == CertLevel::Certified => SupportHint::FiniteSupport {
            depth: values.keys().map(|v| v.length()).max().unwrap_or(0),
        },
        _ => SupportHint::None,
    };
    let solution = TreeFunction::from_table(values)
        .with_support(support)
        .with_name(format!("resolvent({mode},{lambda},{w})"));
    let solution_norm_observed = lip_norm(&solution, map.tree(), depth, budget)?.value;

    Ok(ResolventReport {
        lambda: lambda.clone(),
        vertex: w.clone(),
        mode,
        terms,
        residual_exact: residual.is_exact(),
        accepted,
        residual,
        completeness,
        solution_norm_observed,
        scan_depth: depth,
        solution,
    })
}

/// One term of the spectral radius upper bound sequence.
#[derive(Debug, Serialize)]
pub struct RadiusEntry {
    pub n: u64,
    /// Largest observed edge stretch of the `n`-th iterate.
    pub iterated_stretch: u64,
    /// Whether the stretch equals the declared bound's `n`-th power, making
    /// it the exact Lipschitz number of the iterate.
    pub stretch_exact: bool,
    pub root_orbit_depth: u64,
    /// `max(1 + root depth, stretch)^{1/n}`, an upper bound for the spectral
    /// radius.
    pub bound: Magnitude,
    pub exact: bool,
}

/// The sequence of operator-norm upper bounds for the iterates, each taken to
/// the `1/n`-th power; the spectral radius sits below every entry.
#[derive(Debug, Serialize)]
pub struct SpectralRadiusSequence {
    pub entries: Vec<RadiusEntry>,
    pub best: Magnitude,
    pub scan_depth: u64,
}

pub fn spectral_radius_sequence(
    map: &SelfMap,
    n_max: u64,
    depth: u64,
    budget: &ScanBudget,
) -> Result<SpectralRadiusSequence> {
    if n_max == 0 {
        return Err(Error::InvalidSpec(
            "the radius sequence needs n >= 1".into(),
        ));
    }
    let scan_depth = depth.min(8);
    let trunc = map.tree().truncation(scan_depth, budget)?;
    // Flattened vertex list with parent indices, so iterated images update in
    // place and edges stay addressable.
    let mut vertices: Vec<VertexPath> = Vec::new();
    let mut parents: Vec<Option<usize>> = Vec::new();
    let mut level_start = 0usize;
    for (n, level) in trunc.levels() {
        let next_start = vertices.len();
        for v in level {
            let parent_idx = if n == 0 {
                None
            } else {
                let p = v.parent().unwrap();
                // Levels are lexicographic, so a linear probe from the
                // previous level's start finds the parent.
                Some(
                    (level_start..next_start)
                        .find(|&i| vertices[i] == p)
                        .expect("parent precedes child in the truncation"),
                )
            };
            parents.push(parent_idx);
            vertices.push(v.clone());
        }
        level_start = next_start;
    }

    let mut images = vertices.clone();
    let mut root_image = VertexPath::root();
    let declared = map.metadata().lipschitz_number;
    let mut entries = Vec::new();
    let mut best: Option<Magnitude> = None;
    for n in 1..=n_max {
        for img in images.iter_mut() {
            *img = map.image(img)?;
            budget.check_len(img, "radius sequence scan")?;
        }
        root_image = map.image(&root_image)?;
        budget.check_len(&root_image, "radius sequence scan")?;
        let mut stretch = 0u64;
        for (i, parent) in parents.iter().enumerate() {
            if let Some(p) = *parent {
                stretch = stretch.max(images[i].distance(&images[p]));
            }
        }
        let declared_power = declared.and_then(|l| l.checked_pow(n as u32));
        if let Some(p) = declared_power {
            if stretch > p {
                return Err(Error::MetadataViolation {
                    map: map.name().to_string(),
                    detail: format!(
                        "iterate {n} stretches an edge to {stretch}, above the declared {p}"
                    ),
                });
            }
        }
        let stretch_exact = declared_power == Some(stretch);
        let root_depth = root_image.length();
        let norm_bound = (1 + root_depth).max(stretch);
        let bound = Magnitude::from_count(norm_bound).nth_root(n as u32);
        let exact = stretch_exact && bound.is_exact();
        best = Some(match best {
            Some(b) if b <= bound => b,
            _ => bound.clone(),
        });
        entries.push(RadiusEntry {
            n,
            iterated_stretch: stretch,
            stretch_exact,
            root_orbit_depth: root_depth,
            bound,
            exact,
        });
    }
    Ok(SpectralRadiusSequence {
        entries,
        best: best.unwrap(),
        scan_depth,
    })
}

/// Point spectrum probe report: an anchor outside the image, geometric
/// eigenfunction samples through it, and the spectral radius bound they must
/// respect.
#[derive(Debug, Serialize)]
pub struct PointSpectrumReport {
    pub anchor: Option<VertexPath>,
    pub anchor_outside_image: Option<CertLevel>,
    /// 0 is an eigenvalue whenever some vertex misses the image: its
    /// indicator is annihilated. Carries the anchor's certification level.
    pub zero_eigenvalue: Option<CertLevel>,
    pub samples: Vec<EigenPair>,
    pub radius_bound: Magnitude,
    pub radius_entries: Vec<RadiusEntry>,
    /// The constant function is an eigenfunction for 1 of every composition
    /// operator.
    pub constant_eigenfunction: bool,
    /// For a constant symbol the point spectrum is exactly {0, 1}.
    pub constant_symbol_spectrum: Option<Vec<Scalar>>,
    /// Two vertices observed to share an image: the operator range cannot
    /// separate them, so 0 enters the compression spectrum.
    pub compression_witness: Option<(VertexPath, VertexPath)>,
    /// Set when injectivity is declared: the spectrum then coincides with the
    /// approximate point spectrum.
    pub injective_spectrum_note: Option<String>,
    /// The facts this report draws on, one key per fact present.
    pub keys: Vec<&'static str>,
    pub scan_depth: u64,
}

/// Samples the point spectrum: finds the shallowest vertex outside the
/// observed image, runs a geometric eigenfunction probe through it for every
/// requested `lambda`, and cross-checks accepted eigenvalues against the
/// spectral radius bound.
pub fn point_spectrum(
    map: &SelfMap,
    lambdas: &[Scalar],
    depth: u64,
    budget: &ScanBudget,
) -> Result<PointSpectrumReport> {
    let trunc = map.tree().truncation(depth, budget)?;
    let mut image_sources: BTreeMap<VertexPath, VertexPath> = BTreeMap::new();
    let mut compression_witness = None;
    for v in trunc.vertices() {
        let image = map.image(v)?;
        budget.check_len(&image, "image scan")?;
        if let Some(other) = image_sources.insert(image, v.clone()) {
            if compression_witness.is_none() {
                compression_witness = Some((other, v.clone()));
            }
        }
    }
    let anchor = trunc
        .vertices()
        .find(|v| !image_sources.contains_key(v))
        .cloned();
    let growth = map.metadata().length_increasing_from;
    let anchor_outside_image = anchor.as_ref().map(|_| match growth {
        Some(n) if depth >= n => CertLevel::Certified,
        _ => CertLevel::Observed,
    });
    let constant_symbol = image_sources.len() == 1;

    // Geometric samples assume distinct backward histories; with an observed
    // collision the family degenerates, so only the witnesses are reported.
    let mut samples = Vec::new();
    if compression_witness.is_none() {
        if let Some(w) = &anchor {
            for lambda in lambdas {
                samples.push(geometric_eigenfunction(map, w, lambda, depth, budget)?);
            }
        }
    }
    let radius = spectral_radius_sequence(map, 8, depth, budget)?;
    for pair in &samples {
        if pair.accepted {
            let modulus = pair.lambda.modulus();
            if modulus.approx() > radius.best.approx() + EIGEN_TOL {
                return Err(Error::TheoremViolation(format!(
                    "accepted eigenvalue {} outside the spectral radius bound {}",
                    pair.lambda, radius.best
                )));
            }
        }
    }
    let mut keys_cited = vec![keys::POINT_SPECTRUM_DISK, keys::SPECTRAL_RADIUS_SEQUENCE];
    if anchor.is_some() {
        keys_cited.push(keys::NON_SURJECTIVE_ZERO_EIGENVALUE);
    }
    if !samples.is_empty() {
        keys_cited.push(keys::GEOMETRIC_EIGENFUNCTIONS);
    }
    if constant_symbol {
        keys_cited.push(keys::CONSTANT_SYMBOL_SPECTRUM);
    }
    if compression_witness.is_some() {
        keys_cited.push(keys::NONINJECTIVE_COMPRESSION);
    }
    let injective = map.metadata().injective == Some(true);
    if injective {
        keys_cited.push(keys::INJECTIVE_SPECTRUM_NOTES);
    }
    Ok(PointSpectrumReport {
        zero_eigenvalue: anchor_outside_image,
        anchor,
        anchor_outside_image,
        samples,
        radius_bound: radius.best,
        radius_entries: radius.entries,
        constant_eigenfunction: map.is_total(),
        constant_symbol_spectrum: constant_symbol.then(|| vec![Scalar::zero(), Scalar::one()]),
        compression_witness,
        injective_spectrum_note: injective
            .then(|| "injective symbol: the spectrum equals the approximate point spectrum".into()),
        keys: keys_cited,
        scan_depth: depth,
    })
}
