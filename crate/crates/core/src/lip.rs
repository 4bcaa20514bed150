//! Functions on tree vertices, their increment (derivative) structure, and the
//! Lipschitz norm.
//!
//! The derivative of `f` at the root is `f(root)`; at any other vertex it is
//! `f(v) - f(parent(v))`. The norm is the supremum of derivative moduli over
//! all vertices. A function belongs to the little space when its derivative
//! modulus tends to zero with vertex length; [`decay_profile`] observes this
//! and [`finite_support_approx`] builds the classical finitely supported
//! approximation with a certified ramp bound.
//!
//! Scans only see a truncation, so every report states the scanned depth and
//! whether the function's [`SupportHint`] certifies the supremum within it.

use crate::error::{Error, Result};
use crate::scalar::{Magnitude, Scalar};
use crate::tree::{ScanBudget, TreeModel, VertexPath};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// What is known a priori about where a function lives.
///
/// Hints let a finite scan certify a supremum over the infinite tree. They are
/// structural facts about the function, independent of any truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SupportHint {
    /// Nothing known; scans report lower bounds only.
    None,
    /// `f(v) = 0` whenever `|v| > depth`.
    FiniteSupport { depth: u64 },
    /// The derivative vanishes whenever `|v| > depth` (the function is
    /// constant along every edge below that depth).
    DerivativeVanishes { depth: u64 },
    /// The supremum of the derivative modulus is attained at some vertex with
    /// `|v| <= depth`.
    SupWithin { depth: u64 },
}

impl SupportHint {
    /// Least scan depth from which the supremum over the whole tree is
    /// certified, if the hint provides one.
    pub fn certifying_depth(&self) -> Option<u64> {
        match self {
            SupportHint::None => None,
            // Derivatives can still be nonzero one level past the support.
            SupportHint::FiniteSupport { depth } => Some(depth + 1),
            SupportHint::DerivativeVanishes { depth } => Some(*depth),
            SupportHint::SupWithin { depth } => Some(*depth),
        }
    }
}

struct FnInner {
    name: String,
    support: SupportHint,
    eval: Box<dyn Fn(&VertexPath) -> Scalar + Send + Sync>,
}

/// A scalar-valued function on the vertices of a tree, evaluated lazily.
#[derive(Clone)]
pub struct TreeFunction {
    inner: Arc<FnInner>,
}

impl TreeFunction {
    pub fn new(
        name: impl Into<String>,
        support: SupportHint,
        eval: impl Fn(&VertexPath) -> Scalar + Send + Sync + 'static,
    ) -> Self {
        TreeFunction {
            inner: Arc::new(FnInner {
                name: name.into(),
                support,
                eval: Box::new(eval),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn support(&self) -> &SupportHint {
        &self.inner.support
    }

    /// Same function with a replaced support hint. The caller asserts the
    /// hint; nothing validates it here.
    pub fn with_support(&self, support: SupportHint) -> TreeFunction {
        let inner = self.clone();
        TreeFunction::new(self.name().to_string(), support, move |v| inner.eval(v))
    }

    pub fn with_name(&self, name: impl Into<String>) -> TreeFunction {
        let inner = self.clone();
        TreeFunction::new(name, self.support().clone(), move |v| inner.eval(v))
    }

    pub fn eval(&self, v: &VertexPath) -> Scalar {
        (self.inner.eval)(v)
    }

    /// `f(root)` at the root, `f(v) - f(parent)` elsewhere.
    pub fn derivative(&self, v: &VertexPath) -> Scalar {
        match v.parent() {
            None => self.eval(v),
            Some(p) => self.eval(v) - self.eval(&p),
        }
    }

    pub fn zero() -> Self {
        TreeFunction::new("zero", SupportHint::FiniteSupport { depth: 0 }, |_| {
            Scalar::zero()
        })
    }

    pub fn constant(c: Scalar) -> Self {
        let name = format!("constant({c})");
        TreeFunction::new(
            name,
            SupportHint::DerivativeVanishes { depth: 0 },
            move |_| c.clone(),
        )
    }

    /// Characteristic function of a single vertex. Its norm is 1.
    pub fn indicator(w: VertexPath) -> Self {
        let name = format!("indicator{w}");
        let depth = w.length();
        TreeFunction::new(name, SupportHint::FiniteSupport { depth }, move |v| {
            if *v == w {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
    }

    /// `f(v) = |v|`. Unit norm, but the derivative never decays, so it lies
    /// outside the little space.
    pub fn linear() -> Self {
        TreeFunction::new("linear", SupportHint::SupWithin { depth: 1 }, |v| {
            Scalar::from_integer(v.length() as i64)
        })
    }

    /// `f(v) = 1 + 1/2 + ... + 1/|v|`. Unit norm with derivative `1/|v|`, the
    /// standard unbounded member of the little space.
    pub fn harmonic() -> Self {
        TreeFunction::new("harmonic", SupportHint::SupWithin { depth: 1 }, |v| {
            let mut sum = Scalar::zero();
            for k in 1..=v.length() {
                sum = sum + Scalar::from_ratio(1, k as i64);
            }
            sum
        })
    }

    /// `f(v) = (|v| + 1)^mu`. Exact for integer `mu` in `0..=32`, floating
    /// point otherwise. For `mu <= 1` the largest increment is at the root.
    pub fn power_mu(mu: f64) -> Self {
        let name = format!("power-mu({mu})");
        let support = if mu <= 1.0 {
            SupportHint::SupWithin { depth: 1 }
        } else {
            SupportHint::None
        };
        let int_mu = if mu.fract() == 0.0 && (0.0..=32.0).contains(&mu) {
            Some(mu as u32)
        } else {
            None
        };
        TreeFunction::new(name, support, move |v| {
            let n = v.length() + 1;
            match int_mu {
                Some(k) => Scalar::from_rational(num_rational::BigRational::from_integer(
                    BigInt::from(n).pow(k),
                )),
                None => Scalar::from_f64((n as f64).powf(mu)),
            }
        })
    }

    /// Finite table of values; zero off the table.
    pub fn from_table(entries: BTreeMap<VertexPath, Scalar>) -> Self {
        let depth = entries.keys().map(|v| v.length()).max().unwrap_or(0);
        let name = format!("table({} entries)", entries.len());
        TreeFunction::new(name, SupportHint::FiniteSupport { depth }, move |v| {
            entries.get(v).cloned().unwrap_or_else(Scalar::zero)
        })
    }

    /// `f(u) = max(radius - dist(u, center), 0)`: the unit-norm bump of the
    /// given radius around a vertex.
    pub fn bump(center: VertexPath, radius: u64) -> Self {
        let name = format!("bump({center},{radius})");
        let depth = (center.length() + radius).saturating_sub(1);
        TreeFunction::new(name, SupportHint::FiniteSupport { depth }, move |v| {
            let d = v.distance(&center);
            if d >= radius {
                Scalar::zero()
            } else {
                Scalar::from_integer((radius - d) as i64)
            }
        })
    }

    /// `f(v) = 1 + |v|` up to depth `m`, descending back to zero at depth
    /// `2m + 1`. Unit norm; `f(v) = 1 + |v|` exactly on `|v| <= m`.
    pub fn tent(m: u64) -> Self {
        let name = format!("tent({m})");
        TreeFunction::new(
            name,
            SupportHint::FiniteSupport { depth: 2 * m },
            move |v| {
                let n = v.length();
                if n <= m {
                    Scalar::from_integer((1 + n) as i64)
                } else if n <= 2 * m + 1 {
                    Scalar::from_integer((2 * m + 1 - n) as i64)
                } else {
                    Scalar::zero()
                }
            },
        )
    }

    /// Pointwise linear combination. The combined hint is the strongest fact
    /// implied by every term's hint, or nothing when a term is unlocalized.
    pub fn linear_combination(terms: Vec<(Scalar, TreeFunction)>) -> Self {
        let support = combine_hints(terms.iter().map(|(_, f)| f.support()));
        let name = format!("lincomb({} terms)", terms.len());
        TreeFunction::new(name, support, move |v| {
            let mut sum = Scalar::zero();
            for (c, f) in &terms {
                sum = sum + c.clone() * f.eval(v);
            }
            sum
        })
    }
}

impl fmt::Debug for TreeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeFunction")
            .field("name", &self.inner.name)
            .field("support", &self.inner.support)
            .finish()
    }
}

fn combine_hints<'a>(hints: impl Iterator<Item = &'a SupportHint>) -> SupportHint {
    let mut finite: Option<u64> = Some(0);
    let mut vanishes: Option<u64> = Some(0);
    for h in hints {
        match h {
            SupportHint::FiniteSupport { depth } => {
                finite = finite.map(|d| d.max(*depth));
                vanishes = vanishes.map(|d| d.max(depth + 1));
            }
            SupportHint::DerivativeVanishes { depth } => {
                finite = None;
                vanishes = vanishes.map(|d| d.max(*depth));
            }
            _ => {
                finite = None;
                vanishes = None;
            }
        }
    }
    match (finite, vanishes) {
        (Some(d), _) => SupportHint::FiniteSupport { depth: d },
        (None, Some(d)) => SupportHint::DerivativeVanishes { depth: d },
        (None, None) => SupportHint::None,
    }
}

/// Visits every vertex of the truncation level by level in lexicographic
/// order, passing the level, the vertex, and its derivative value. Evaluates
/// the function once per vertex.
pub(crate) fn scan_derivatives<F>(
    tree: &TreeModel,
    f: &TreeFunction,
    depth: u64,
    budget: &ScanBudget,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(u64, &VertexPath, &Scalar),
{
    let root = VertexPath::root();
    let root_value = f.eval(&root);
    visit(0, &root, &root_value);
    let mut prev: Vec<(VertexPath, Scalar)> = vec![(root, root_value)];
    for n in 1..=depth {
        let mut next: Vec<(VertexPath, Scalar)> = Vec::new();
        for (v, fv) in &prev {
            for i in 0..tree.arity(v) {
                if next.len() as u64 >= budget.level_cap {
                    return Err(Error::LevelBudget {
                        tree: tree.name().to_string(),
                        level: n,
                        cap: budget.level_cap,
                    });
                }
                let c = v.child(i);
                let fc = f.eval(&c);
                let increment = &fc - fv;
                visit(n, &c, &increment);
                next.push((c, fc));
            }
        }
        prev = next;
    }
    Ok(())
}

/// Lipschitz norm observed on a truncation.
#[derive(Debug, Serialize)]
pub struct LipNormReport {
    /// Largest derivative modulus over the truncation.
    pub value: Magnitude,
    /// Whether the value passed through the exact regime end to end.
    pub exact: bool,
    /// First vertex attaining the value in level-by-level lexicographic order.
    pub attained_at: VertexPath,
    pub scan_depth: u64,
    /// True when the support hint places the supremum inside the scan, so the
    /// value is the norm over the whole tree, not just a lower bound.
    pub certified: bool,
}

pub fn lip_norm(
    f: &TreeFunction,
    tree: &TreeModel,
    depth: u64,
    budget: &ScanBudget,
) -> Result<LipNormReport> {
    let mut best = Magnitude::zero();
    let mut attained = VertexPath::root();
    let mut first = true;
    scan_derivatives(tree, f, depth, budget, |_, v, d| {
        let m = d.modulus();
        if first || m > best {
            best = m;
            attained = v.clone();
            first = false;
        }
    })?;
    let certified = match f.support().certifying_depth() {
        Some(d) => depth >= d,
        None => false,
    };
    Ok(LipNormReport {
        exact: best.is_exact(),
        value: best,
        attained_at: attained,
        scan_depth: depth,
        certified,
    })
}

/// Largest derivative modulus on one level.
#[derive(Debug, Serialize)]
pub struct LevelIncrement {
    pub level: u64,
    pub max: Magnitude,
    pub attained_at: VertexPath,
}

/// Per-level maxima of the derivative modulus for levels `1..=depth`. A
/// function lies in the little space exactly when these tend to zero.
pub fn decay_profile(
    f: &TreeFunction,
    tree: &TreeModel,
    depth: u64,
    budget: &ScanBudget,
) -> Result<Vec<LevelIncrement>> {
    let mut out: Vec<LevelIncrement> = Vec::new();
    scan_derivatives(tree, f, depth, budget, |n, v, d| {
        if n == 0 {
            return;
        }
        let m = d.modulus();
        match out.last_mut() {
            Some(entry) if entry.level == n => {
                if m > entry.max {
                    entry.max = m;
                    entry.attained_at = v.clone();
                }
            }
            _ => out.push(LevelIncrement {
                level: n,
                max: m,
                attained_at: v.clone(),
            }),
        }
    })?;
    Ok(out)
}

/// Finitely supported approximation of a little-space function, with the ramp
/// parameters and certified error bound of the construction.
#[derive(Serialize)]
pub struct FiniteSupportApprox {
    /// Requested error bound.
    pub epsilon: Magnitude,
    /// Depth below which the function is copied unchanged.
    pub ramp_start: u64,
    /// Number of levels over which the copy ramps down to zero.
    pub ramp_length: u64,
    /// The approximation vanishes beyond this depth (`ramp_start +
    /// ramp_length - 1`).
    pub support_depth: u64,
    /// Largest `|f|` on the level where the ramp starts.
    pub peak: Magnitude,
    /// `peak / ramp_length`, certified below `epsilon / 2`.
    pub ramp_increment_bound: Magnitude,
    /// Largest derivative modulus of `f - approximation` over the probe.
    pub observed_error: Magnitude,
    pub probe_depth: u64,
    /// The approximating function itself.
    #[serde(skip)]
    pub function: TreeFunction,
}

impl fmt::Debug for FiniteSupportApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteSupportApprox")
            .field("epsilon", &self.epsilon.approx())
            .field("ramp_start", &self.ramp_start)
            .field("ramp_length", &self.ramp_length)
            .field("support_depth", &self.support_depth)
            .finish()
    }
}

/// Builds the finitely supported approximation: copy `f` up to the first depth
/// `N` past which all observed increments stay below `epsilon / 2`, then ramp
/// linearly to zero over `M` further levels, where `M` is the least integer
/// with `max(|f|` at level `N) / M < epsilon / 2`.
///
/// Errs with `DecayNotObserved` when the increments never drop below the
/// threshold inside the probe, which is the observable sign that `f` is not in
/// the little space (or the probe is too shallow).
pub fn finite_support_approx(
    f: &TreeFunction,
    tree: &TreeModel,
    epsilon: &Magnitude,
    probe_depth: u64,
    budget: &ScanBudget,
) -> Result<FiniteSupportApprox> {
    if epsilon.is_zero() {
        return Err(Error::InvalidSpec("epsilon must be positive".into()));
    }
    if probe_depth == 0 {
        return Err(Error::InvalidSpec("probe depth must be positive".into()));
    }
    let half = epsilon.div(&Magnitude::from_count(2))?;

    let levels = decay_profile(f, tree, probe_depth, budget)?;
    // Least ramp start: every level from max(N, 1) through the probe must sit
    // strictly below epsilon / 2.
    let mut cut = probe_depth + 1;
    for entry in levels.iter().rev() {
        if entry.max < half {
            cut = entry.level;
        } else {
            break;
        }
    }
    if cut > probe_depth {
        return Err(Error::DecayNotObserved {
            threshold: half.to_string(),
            probe_depth,
        });
    }
    let ramp_start = if cut <= 1 { 0 } else { cut };

    // Peak of |f| on the ramp-start level.
    let mut peak = Magnitude::zero();
    for v in tree.level(ramp_start, budget)? {
        let m = f.eval(&v).modulus();
        if m > peak {
            peak = m;
        }
    }

    let ramp_length = ramp_length_for(&peak, &half)?;
    let bound = peak.div(&Magnitude::from_count(ramp_length))?;
    if bound >= half {
        return Err(Error::RampTooSteep {
            observed: bound.to_string(),
            allowed: half.to_string(),
            depth: ramp_start,
        });
    }

    let support_depth = ramp_start + ramp_length - 1;
    let inner = f.clone();
    let (n0, m0) = (ramp_start, ramp_length);
    let name = format!("approx({},eps)", f.name());
    let approx = TreeFunction::new(
        name,
        SupportHint::FiniteSupport {
            depth: support_depth,
        },
        move |v| {
            let len = v.length();
            if len <= n0 {
                inner.eval(v)
            } else if len < n0 + m0 {
                let anchor = v.ancestor_at(n0).unwrap();
                Scalar::from_ratio((n0 + m0 - len) as i64, m0 as i64) * inner.eval(&anchor)
            } else {
                Scalar::zero()
            }
        },
    );

    let difference = TreeFunction::linear_combination(vec![
        (Scalar::one(), f.clone()),
        (Scalar::from_integer(-1), approx.clone()),
    ]);
    let mut observed_error = Magnitude::zero();
    scan_derivatives(tree, &difference, probe_depth, budget, |_, _, d| {
        let m = d.modulus();
        if m > observed_error {
            observed_error = m;
        }
    })?;

    Ok(FiniteSupportApprox {
        epsilon: epsilon.clone(),
        ramp_start,
        ramp_length,
        support_depth,
        peak,
        ramp_increment_bound: bound,
        observed_error,
        probe_depth,
        function: approx,
    })
}

/// Least `M >= 1` with `peak / M < half`, exact in the exact regime via an
/// integer square root of the squared ratio.
fn ramp_length_for(peak: &Magnitude, half: &Magnitude) -> Result<u64> {
    if peak.is_zero() {
        return Ok(1);
    }
    let floor = match (peak, half) {
        (Magnitude::ExactSq(p2), Magnitude::ExactSq(h2)) => {
            // floor(sqrt(q)) for the rational q = p2 / h2 >= 0: with q = a/b in
            // lowest terms, sqrt(q) = sqrt(ab)/b and floor(x/b) = floor(floor(x)/b).
            let q = p2 / h2;
            debug_assert!(!q.numer().is_negative());
            let scaled = (q.numer() * q.denom()).sqrt();
            (scaled / q.denom())
                .to_u64()
                .ok_or_else(|| Error::PreconditionUnmet("ramp length exceeds u64".into()))?
        }
        _ => {
            let ratio = peak.approx() / half.approx();
            if !ratio.is_finite() {
                return Err(Error::PreconditionUnmet("ramp length is not finite".into()));
            }
            ratio.floor() as u64
        }
    };
    Ok(floor + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn budget() -> ScanBudget {
        ScanBudget::default()
    }

    #[test]
    fn indicator_norm_is_one() {
        let tree = TreeModel::homogeneous(2).unwrap();
        for w in [VertexPath::root(), VertexPath::from_indices([1, 0])] {
            let f = TreeFunction::indicator(w.clone());
            let r = lip_norm(&f, &tree, 4, &budget()).unwrap();
            assert!(r.value.eq_value(&BigRational::from_integer(1.into())));
            assert!(r.certified);
            assert!(r.exact);
            assert_eq!(r.attained_at, w);
        }
    }

    #[test]
    fn linear_and_harmonic_norms() {
        let tree = TreeModel::path();
        let lin = lip_norm(&TreeFunction::linear(), &tree, 6, &budget()).unwrap();
        assert!(lin.value.eq_value(&BigRational::from_integer(1.into())));
        assert!(lin.certified);
        assert_eq!(lin.attained_at, VertexPath::path_vertex(1));

        let har = lip_norm(&TreeFunction::harmonic(), &tree, 6, &budget()).unwrap();
        assert!(har.value.eq_value(&BigRational::from_integer(1.into())));
        assert!(har.certified);
    }

    #[test]
    fn decay_distinguishes_little_space() {
        let tree = TreeModel::path();
        let lin = decay_profile(&TreeFunction::linear(), &tree, 8, &budget()).unwrap();
        assert!(lin
            .iter()
            .all(|e| e.max.eq_value(&BigRational::from_integer(1.into()))));
        let har = decay_profile(&TreeFunction::harmonic(), &tree, 8, &budget()).unwrap();
        assert!(har[7].max.eq_value(&BigRational::new(1.into(), 8.into())));
        assert!(har.windows(2).all(|w| w[1].max < w[0].max));
    }

    #[test]
    fn harmonic_ramp_parameters() {
        // With epsilon = 1/2 the increments must drop below 1/4, which first
        // holds from level 5 on; the peak there is 1+1/2+1/3+1/4+1/5 = 137/60
        // and the least ramp length M with (137/60)/M < 1/4 is 10.
        let tree = TreeModel::path();
        let eps = Magnitude::exact_value(BigRational::new(1.into(), 2.into()));
        let a =
            finite_support_approx(&TreeFunction::harmonic(), &tree, &eps, 40, &budget()).unwrap();
        assert_eq!(a.ramp_start, 5);
        assert_eq!(a.ramp_length, 10);
        assert_eq!(a.support_depth, 14);
        assert!(a.peak.eq_value(&BigRational::new(137.into(), 60.into())));
        assert!(a.observed_error < eps);
        assert!(a.observed_error.is_exact());
        // The approximation agrees with f up to the ramp and vanishes past it.
        let v5 = VertexPath::path_vertex(5);
        assert_eq!(a.function.eval(&v5), TreeFunction::harmonic().eval(&v5));
        assert!(a.function.eval(&VertexPath::path_vertex(15)).is_zero());
        let v10 = VertexPath::path_vertex(10);
        let expected = Scalar::from_ratio(5, 10) * TreeFunction::harmonic().eval(&v5);
        assert_eq!(a.function.eval(&v10), expected);
    }

    #[test]
    fn linear_function_never_decays() {
        let tree = TreeModel::path();
        let eps = Magnitude::exact_value(BigRational::new(1.into(), 2.into()));
        let err =
            finite_support_approx(&TreeFunction::linear(), &tree, &eps, 30, &budget()).unwrap_err();
        assert!(matches!(err, Error::DecayNotObserved { .. }));
    }

    #[test]
    fn bump_and_tent_shapes() {
        let tree = TreeModel::homogeneous(2).unwrap();
        let c = VertexPath::from_indices([0]);
        let bump = TreeFunction::bump(c.clone(), 2);
        assert_eq!(bump.eval(&c), Scalar::from_integer(2));
        assert_eq!(bump.eval(&VertexPath::root()), Scalar::one());
        assert_eq!(bump.eval(&VertexPath::from_indices([0, 1])), Scalar::one());
        assert!(bump.eval(&VertexPath::from_indices([1])).is_zero());
        let r = lip_norm(&bump, &tree, 4, &budget()).unwrap();
        assert!(r.value.eq_value(&BigRational::from_integer(1.into())));
        assert!(r.certified);

        let tent = TreeFunction::tent(2);
        let path = TreeModel::path();
        assert_eq!(
            tent.eval(&VertexPath::path_vertex(2)),
            Scalar::from_integer(3)
        );
        assert_eq!(tent.eval(&VertexPath::path_vertex(4)), Scalar::one());
        assert!(tent.eval(&VertexPath::path_vertex(5)).is_zero());
        let r = lip_norm(&tent, &path, 6, &budget()).unwrap();
        assert!(r.value.eq_value(&BigRational::from_integer(1.into())));
        assert!(r.certified);
        assert_eq!(r.attained_at, VertexPath::root());
    }

    #[test]
    fn combination_hints() {
        let a = TreeFunction::indicator(VertexPath::from_indices([0, 0]));
        let b = TreeFunction::tent(1);
        let sum = TreeFunction::linear_combination(vec![
            (Scalar::one(), a),
            (Scalar::from_integer(3), b),
        ]);
        assert_eq!(sum.support(), &SupportHint::FiniteSupport { depth: 2 });
        let with_const = TreeFunction::linear_combination(vec![
            (Scalar::one(), sum),
            (
                Scalar::one(),
                TreeFunction::constant(Scalar::from_integer(7)),
            ),
        ]);
        assert_eq!(
            with_const.support(),
            &SupportHint::DerivativeVanishes { depth: 3 }
        );
        let unknown = TreeFunction::linear_combination(vec![
            (Scalar::one(), with_const),
            (Scalar::one(), TreeFunction::linear()),
        ]);
        assert_eq!(unknown.support(), &SupportHint::None);
    }

    #[test]
    fn power_mu_values() {
        let f = TreeFunction::power_mu(2.0);
        assert_eq!(
            f.eval(&VertexPath::path_vertex(3)),
            Scalar::from_integer(16)
        );
        assert!(f.eval(&VertexPath::path_vertex(3)).is_exact());
        let g = TreeFunction::power_mu(0.5);
        let v = g.eval(&VertexPath::path_vertex(3));
        assert!(!v.is_exact());
        assert!((v.to_complex64().re - 2.0).abs() < 1e-12);
    }
}
