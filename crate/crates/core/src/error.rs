use crate::tree::VertexPath;
use thiserror::Error;

/// Errors surfaced by scans and constructions.
///
/// `InvalidSpec` marks malformed input descriptions, the two budget variants
/// mark exhausted resource caps, and the rest are precondition or consistency
/// failures of individual operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("level {level} of `{tree}` exceeds the level budget ({cap} vertices)")]
    LevelBudget { tree: String, level: u64, cap: u64 },
    #[error("vertex length {len} exceeds the length budget ({cap}) during {context}")]
    LengthBudget { len: u64, cap: u64, context: String },
    #[error("map `{map}` sends {vertex} to {image}, which is not a vertex of `{tree}`")]
    InvalidImage {
        map: String,
        tree: String,
        vertex: VertexPath,
        image: VertexPath,
    },
    #[error("map `{map}` is undefined at {vertex}")]
    UndefinedImage { map: String, vertex: VertexPath },
    #[error("no decay below {threshold} observed within probe depth {probe_depth}")]
    DecayNotObserved { threshold: String, probe_depth: u64 },
    #[error("ramp precondition failed: max |f| = {observed} at depth {depth} exceeds {allowed}")]
    RampTooSteep {
        observed: String,
        allowed: String,
        depth: u64,
    },
    #[error("vertex {vertex} is an observed image under `{map}`: {preimage} maps to it")]
    NotOutsideImage {
        map: String,
        vertex: VertexPath,
        preimage: VertexPath,
    },
    #[error(
        "forward orbit of {start} revisits {vertex} (first seen at step {entry}, period {period})"
    )]
    OrbitCollision {
        start: VertexPath,
        vertex: VertexPath,
        entry: u64,
        period: u64,
    },
    #[error("{context}: still active at horizon {horizon}")]
    HorizonExhausted { context: String, horizon: u64 },
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("injectivity unknown for `{map}`: {detail}")]
    InjectivityUnknown { map: String, detail: String },
    #[error("declared metadata for `{map}` contradicts a scan: {detail}")]
    MetadataViolation { map: String, detail: String },
    #[error("computed data contradicts a certified bound: {0}")]
    TheoremViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidSpec(_) => 2,
            Error::LevelBudget { .. } | Error::LengthBudget { .. } => 3,
            _ => 4,
        }
    }

    /// Stable machine-readable discriminant for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "invalid-spec",
            Error::LevelBudget { .. } => "level-budget",
            Error::LengthBudget { .. } => "length-budget",
            Error::InvalidImage { .. } => "invalid-image",
            Error::UndefinedImage { .. } => "undefined-image",
            Error::DecayNotObserved { .. } => "decay-not-observed",
            Error::RampTooSteep { .. } => "ramp-too-steep",
            Error::NotOutsideImage { .. } => "not-outside-image",
            Error::OrbitCollision { .. } => "orbit-collision",
            Error::HorizonExhausted { .. } => "horizon-exhausted",
            Error::PreconditionUnmet(_) => "precondition-unmet",
            Error::InjectivityUnknown { .. } => "injectivity-unknown",
            Error::MetadataViolation { .. } => "metadata-violation",
            Error::TheoremViolation(_) => "theorem-violation",
        }
    }
}
