//! Stable identifiers for the facts reports cite.
//!
//! Every verdict a report emits names the fact it rests on by one of these
//! keys. A key is a promise about content, not about code: renaming one is a
//! breaking change for downstream consumers of the JSON reports, so keys are
//! kebab-case nouns describing the fact itself. [`CATALOG`] pairs each key
//! with a one-line statement; [`statement`] looks one up.

use serde::Serialize;

/// The operator is bounded on the little space exactly when the symbol has a
/// finite stretch bound and no image vertex collects nonconstant-sector
/// preimages at unboundedly many depths.
pub const LITTLE_LIP_BOUNDED_CHARACTERIZATION: &str = "little-lip-bounded-characterization";

/// A finite stretch bound plus finitely many preimages per vertex
/// (injectivity is enough) certifies a bounded operator.
pub const FINITE_PREIMAGES_BOUNDED: &str = "finite-preimages-bounded";

/// An image vertex with nonconstant-sector preimages at arbitrarily many
/// depths defeats boundedness: the pullback of its characteristic function
/// keeps unit-modulus increments at every such depth.
pub const INDICATOR_PULLBACK_UNBOUNDED: &str = "indicator-pullback-unbounded";

/// The operator norm lies between `1 + |map(root)|` and the larger of that
/// and the stretch bound; tall tent functions approach the lower bound.
pub const OPERATOR_NORM_BOUNDS: &str = "operator-norm-bounds";

/// Every eigenvalue lies in the closed disk cut out by the iterate-norm
/// radius bound.
pub const POINT_SPECTRUM_DISK: &str = "point-spectrum-disk";

/// A vertex outside the image of an injective symbol anchors the geometric
/// eigenfunction summing `lambda^n` at its `n`-th forward image; it solves
/// the eigenvalue identity and lies in the little space when its increments
/// decay.
pub const GEOMETRIC_EIGENFUNCTIONS: &str = "geometric-eigenfunctions";

/// A constant symbol has point spectrum exactly `{0, 1}`.
pub const CONSTANT_SYMBOL_SPECTRUM: &str = "constant-symbol-spectrum";

/// When some vertex misses the image, its characteristic function is
/// annihilated, so `0` is an eigenvalue.
pub const NON_SURJECTIVE_ZERO_EIGENVALUE: &str = "non-surjective-zero-eigenvalue";

/// `(C - lambda) f = g` is solvable pointwise by series in the probed cases:
/// the forward orbit sum for `|lambda| < 1` with an injective symbol, the
/// backward preimage sum for `|lambda| > 1`, and a finite backward chain for
/// any nonzero `lambda`.
pub const DENSE_RANGE_CASES: &str = "dense-range-cases";

/// Two vertices sharing an image force every function in the range to agree
/// on them, so `0` enters the compression spectrum.
pub const NONINJECTIVE_COMPRESSION: &str = "noninjective-compression";

/// For an injective symbol the spectrum coincides with the approximate point
/// spectrum.
pub const INJECTIVE_SPECTRUM_NOTES: &str = "injective-spectrum-notes";

/// On the path tree with `1 + map(m) = a (1 + m)`, the powers
/// `f(m) = (m+1)^mu` are eigenfunctions with eigenvalue `a^mu`, one for every
/// nonzero `lambda`.
pub const POWER_EIGENFAMILY: &str = "power-eigenfamily";

/// Each iterate yields the spectral radius upper bound
/// `max(1 + |map^n(root)|, stretch(map^n))^(1/n)`, and stretch numbers are
/// submultiplicative along iterates.
pub const SPECTRAL_RADIUS_SEQUENCE: &str = "spectral-radius-sequence";

/// A periodic point of the symbol blocks hypercyclicity of the weighted
/// operator for every weight.
pub const PERIODIC_POINT_OBSTRUCTION: &str = "periodic-point-obstruction";

/// For a hypercyclic weighted operator the forward orbit of every vertex
/// leaves every truncation for good.
pub const ORBIT_ESCAPE: &str = "orbit-escape";

/// A symbol that merges two vertices gives an operator whose orbit functions
/// cannot separate them; such an operator is never hypercyclic.
pub const NONINJECTIVE_NOT_HYPERCYCLIC: &str = "noninjective-not-hypercyclic";

/// If `|lambda|^n dist(map^n(v), map^n(parent v))` stays bounded for some
/// vertex, the weighted operator is not hypercyclic.
pub const PARENT_SEPARATION_UNBOUNDED: &str = "parent-separation-unbounded";

/// For a symbol free of periodic points, a set of `k` vertices fails to run
/// away at most `k^2 - k` times.
pub const RUN_AWAY_BOUND: &str = "run-away-bound";

/// Hypercyclicity forces every finite vertex set to run away: only finitely
/// many times `n` may bring any part of `map^n(K)` back into `K`.
pub const COFINITE_RETURN_HYPERCYCLIC: &str = "cofinite-return-hypercyclic";

/// For an injective symbol without periodic points, all finite sets run away
/// exactly when every vertex has finitely many times with a nonempty
/// `n`-fold preimage.
pub const PREIMAGE_TIMES_EQUIVALENCE: &str = "preimage-times-equivalence";

/// An injective, periodic-point-free symbol with finite preimage times gives
/// a mixing weighted operator for every `|lambda| > 1`.
pub const PREIMAGE_TIMES_MIXING: &str = "preimage-times-mixing";

/// A symbol whose images eventually grow in length has finite preimage times
/// at every vertex: an `n`-fold preimage of `v` is no longer than
/// `max(N, |v|)`.
pub const LENGTH_GROWTH_PREIMAGE_FINITE: &str = "length-growth-preimage-finite";

/// An injective, periodic-point-free symbol with eventual length growth
/// gives a mixing weighted operator for every `|lambda| > 1`.
pub const LENGTH_GROWTH_MIXING: &str = "length-growth-mixing";

/// With exact geometric parent separation of ratio `g` and `|lambda| g > 1`,
/// weighted tent pullbacks shrink like `(|lambda| g)^{-n}` while forward
/// images vanish, so the weighted operator is mixing.
pub const TENT_BACKWARD_MIXING: &str = "tent-backward-mixing";

/// Truncating a little-space function to a finite depth converges in norm:
/// finitely supported functions are dense.
pub const FINITE_SUPPORT_DENSITY: &str = "finite-support-density";

/// One named fact: a stable key and its one-line statement.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KeyEntry {
    pub key: &'static str,
    pub statement: &'static str,
}

macro_rules! entry {
    ($key:ident, $statement:expr) => {
        KeyEntry {
            key: $key,
            statement: $statement,
        }
    };
}

/// Every key with its statement, in citation-frequency-agnostic alphabetical
/// order of the key string.
pub const CATALOG: &[KeyEntry] = &[
    entry!(
        COFINITE_RETURN_HYPERCYCLIC,
        "Hypercyclicity forces every finite vertex set to run away: only finitely many times \
         bring any of its images back into the set."
    ),
    entry!(
        CONSTANT_SYMBOL_SPECTRUM,
        "A constant symbol has point spectrum exactly {0, 1}."
    ),
    entry!(
        DENSE_RANGE_CASES,
        "(C - lambda) f = g is solvable pointwise by series: forward orbit sums for \
         |lambda| < 1 with an injective symbol, backward preimage sums for |lambda| > 1, \
         finite backward chains for any nonzero lambda."
    ),
    entry!(
        FINITE_PREIMAGES_BOUNDED,
        "A finite stretch bound plus finitely many preimages per vertex (injectivity is \
         enough) certifies a bounded operator."
    ),
    entry!(
        FINITE_SUPPORT_DENSITY,
        "Truncating a little-space function to a finite depth converges in norm: finitely \
         supported functions are dense."
    ),
    entry!(
        GEOMETRIC_EIGENFUNCTIONS,
        "A vertex outside the image of an injective symbol anchors the geometric \
         eigenfunction summing lambda^n along its forward orbit; it solves the eigenvalue \
         identity and joins the little space when its increments decay."
    ),
    entry!(
        INDICATOR_PULLBACK_UNBOUNDED,
        "An image vertex with nonconstant-sector preimages at arbitrarily many depths \
         defeats boundedness: the pullback of its characteristic function keeps \
         unit-modulus increments at every such depth."
    ),
    entry!(
        INJECTIVE_SPECTRUM_NOTES,
        "For an injective symbol the spectrum coincides with the approximate point \
         spectrum."
    ),
    entry!(
        LENGTH_GROWTH_MIXING,
        "An injective, periodic-point-free symbol with eventual length growth gives a \
         mixing weighted operator for every |lambda| > 1."
    ),
    entry!(
        LENGTH_GROWTH_PREIMAGE_FINITE,
        "A symbol whose images eventually grow in length has finite preimage times at \
         every vertex: an n-fold preimage of v is no longer than max(N, |v|)."
    ),
    entry!(
        LITTLE_LIP_BOUNDED_CHARACTERIZATION,
        "The operator is bounded on the little space exactly when the symbol has a finite \
         stretch bound and no image vertex collects nonconstant-sector preimages at \
         unboundedly many depths."
    ),
    entry!(
        NON_SURJECTIVE_ZERO_EIGENVALUE,
        "When some vertex misses the image, its characteristic function is annihilated, \
         so 0 is an eigenvalue."
    ),
    entry!(
        NONINJECTIVE_COMPRESSION,
        "Two vertices sharing an image force every function in the range to agree on \
         them, so 0 enters the compression spectrum."
    ),
    entry!(
        NONINJECTIVE_NOT_HYPERCYCLIC,
        "A symbol that merges two vertices gives an operator whose orbit functions cannot \
         separate them; such an operator is never hypercyclic."
    ),
    entry!(
        OPERATOR_NORM_BOUNDS,
        "The operator norm lies between 1 + |map(root)| and the larger of that and the \
         stretch bound; tall tent functions approach the lower bound."
    ),
    entry!(
        ORBIT_ESCAPE,
        "For a hypercyclic weighted operator the forward orbit of every vertex leaves \
         every truncation for good."
    ),
    entry!(
        PARENT_SEPARATION_UNBOUNDED,
        "If |lambda|^n dist(map^n(v), map^n(parent v)) stays bounded for some vertex, the \
         weighted operator is not hypercyclic."
    ),
    entry!(
        PERIODIC_POINT_OBSTRUCTION,
        "A periodic point of the symbol blocks hypercyclicity of the weighted operator \
         for every weight."
    ),
    entry!(
        POINT_SPECTRUM_DISK,
        "Every eigenvalue lies in the closed disk cut out by the iterate-norm radius \
         bound."
    ),
    entry!(
        POWER_EIGENFAMILY,
        "On the path tree with 1 + map(m) = a (1 + m), the powers f(m) = (m+1)^mu are \
         eigenfunctions with eigenvalue a^mu, one for every nonzero lambda."
    ),
    entry!(
        PREIMAGE_TIMES_EQUIVALENCE,
        "For an injective symbol without periodic points, all finite sets run away \
         exactly when every vertex has finitely many times with a nonempty n-fold \
         preimage."
    ),
    entry!(
        PREIMAGE_TIMES_MIXING,
        "An injective, periodic-point-free symbol with finite preimage times gives a \
         mixing weighted operator for every |lambda| > 1."
    ),
    entry!(
        RUN_AWAY_BOUND,
        "For a symbol free of periodic points, a set of k vertices fails to run away at \
         most k^2 - k times."
    ),
    entry!(
        SPECTRAL_RADIUS_SEQUENCE,
        "Each iterate yields the spectral radius upper bound max(1 + |map^n(root)|, \
         stretch(map^n))^(1/n); stretch numbers are submultiplicative along iterates."
    ),
    entry!(
        TENT_BACKWARD_MIXING,
        "With exact geometric parent separation of ratio g and |lambda| g > 1, weighted \
         tent pullbacks shrink like (|lambda| g)^-n while forward images vanish, so the \
         weighted operator is mixing."
    ),
];

/// The statement behind a key, if the key is in the catalog.
pub fn statement(key: &str) -> Option<&'static str> {
    CATALOG
        .iter()
        .find(|entry| entry.key == key)
        .map(|entry| entry.statement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn catalog_is_complete_and_unique() {
        let keys: Vec<&str> = CATALOG.iter().map(|e| e.key).collect();
        let set: BTreeSet<&str> = keys.iter().copied().collect();
        assert_eq!(set.len(), keys.len(), "duplicate key in catalog");
        assert_eq!(keys.len(), 25);
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, keys, "catalog not in key order");
    }

    #[test]
    fn keys_are_kebab_case() {
        for entry in CATALOG {
            assert!(
                entry
                    .key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-'),
                "key `{}` is not kebab-case",
                entry.key
            );
            assert!(!entry.key.starts_with('-') && !entry.key.ends_with('-'));
            assert!(!entry.statement.is_empty());
        }
    }

    #[test]
    fn lookup_works() {
        assert_eq!(
            statement(TENT_BACKWARD_MIXING).unwrap(),
            statement("tent-backward-mixing").unwrap()
        );
        assert!(statement("no-such-key").is_none());
    }
}
