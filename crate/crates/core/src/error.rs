use thiserror::Error;

use crate::gcomplex::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("operation requires torus rank {expected}, model has rank {found}")]
    UnsupportedRank { expected: usize, found: usize },

    #[error("element does not belong to model `{model}`: {reason}")]
    ElementMismatch { model: String, reason: String },

    #[error("model `{0}` is not compact")]
    NotCompact(String),

    #[error("integration functional has no entry for top-degree generator `{0}`")]
    MissingIntegral(String),

    #[error("product table has no entry for the pair ({0}, {1})")]
    MissingProduct(String, String),

    #[error("model failed validation:\n{0}")]
    Invalid(ValidationReport),

    #[error("fixed point `{0}` is not isolated: its tangent Euler class vanishes")]
    NonIsolatedFixedPoint(String),

    #[error("fixed point `{point}` carries no restriction for class `{class}`")]
    MissingRestriction { point: String, class: String },

    #[error("thom extension obstructed at degree {degree}: contraction image is not exact")]
    ThomObstruction { degree: i64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("specialized ranks disagree on three draws: {0:?}")]
    RankDisagreement([usize; 3]),

    #[error("pairing of model `{0}` is degenerate over the fraction field (model defect)")]
    DegeneratePairing(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{location}: model rejected\n{report}")]
    Rejected { location: String, report: ValidationReport },

    #[error("{location}: map `{map}` rejected: {reason}")]
    MapRejected { location: String, map: String, reason: String },

    #[error("unsupported schema_version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("unknown builtin model `{name}`; available: {available}")]
    UnknownBuiltin { name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
