//! Composition operators on the little Lipschitz space of an infinite rooted
//! tree: norms, boundedness certificates, operator-norm bounds, spectral
//! probes, and hypercyclicity diagnostics, all reported with explicit
//! witnesses and exactness flags.
//!
//! Vertices are paths of child indices ([`VertexPath`]); trees are presented
//! lazily by arity functions ([`TreeModel`]) and scanned through finite
//! [`Truncation`]s under explicit budgets. Scalars carry an exact rational
//! complex regime alongside floating point ([`Scalar`], [`Magnitude`]), and
//! every report says which regime produced it.

pub mod compop;
pub mod dynamics;
pub mod error;
pub mod keys;
pub mod lip;
pub mod oracle;
pub mod scalar;
pub mod specs;
pub mod spectra;
pub mod tree;

pub use compop::{
    classify_boundedness, lipschitz_number, norm_bounds, sector_scan, BoundednessReport,
    BoundednessVerdict, GeometricSeparation, LipschitzEstimate, MapMetadata, NormBoundsReport,
    ParentSeparationBound, SectorScan, SelfMap, TableDefault,
};
pub use dynamics::{
    backward_geometric, growth_scan, hypercyclicity_report, injectivity_scan, orbit_report,
    periodic_point_scan, preimage_times, run_away_scan, separation_m, separation_table,
    separation_track, tent_function, weighted_separation, BackwardGeometric, ConditionRow,
    CycleInfo, DynamicsBudgets, DynamicsVerdict, GrowthScan, HypercyclicityReport, InjectivityScan,
    OrbitReport, PeriodicPoint, PeriodicScan, PreimageTimes, RunAwayScan, SeparationEntry,
    SeparationM, SeparationTable, SeparationTrack, TentReport, TimesAssessment, WeightedSeparation,
};
pub use error::{Error, Result};
pub use lip::{
    decay_profile, finite_support_approx, lip_norm, FiniteSupportApprox, LipNormReport,
    SupportHint, TreeFunction,
};
pub use scalar::{ExactComplex, Magnitude, Scalar};
pub use specs::{parse_inline_path, FunctionSpec, MapSpec, RunSpec, TreeSpec};
pub use spectra::{
    geometric_eigenfunction, point_spectrum, power_eigen_path, resolvent_solution,
    spectral_radius_sequence, CertLevel, EigenPair, PointSpectrumReport, PowerEigenReport,
    RadiusEntry, ResolventMode, ResolventReport, SpectralRadiusSequence, EIGEN_TOL,
};
pub use tree::{ScanBudget, TreeModel, TreeShape, Truncation, VertexPath};
