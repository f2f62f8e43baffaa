use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("set has no cells")]
    EmptySet,

    #[error("lower scale {alpha0} is below the cell resolution {resolution}")]
    ResolutionTooCoarse { alpha0: f64, resolution: f64 },

    #[error("precondition violated: {clause}")]
    PreconditionViolated { clause: String },

    #[error("certificate is not verified")]
    NotVerified,

    #[error("sampled derivative {value} at x={x} leaves [1/C_F, C_F] with C_F={c_f}")]
    DerivativeBoundViolated { x: f64, value: f64, c_f: f64 },

    #[error("no empty subinterval (precondition held: {precondition_held})")]
    NoEmptyCell { precondition_held: bool },

    #[error("parent cell {parent} has {children} children (precondition held: {precondition_held})")]
    ChildCountViolation {
        parent: i64,
        children: usize,
        precondition_held: bool,
    },

    #[error("disks overlap at depth {depth}")]
    DiskOverlap { depth: usize },

    #[error("need at least {needed} scales, found {found}")]
    InsufficientScales { needed: usize, found: usize },

    #[error("need at least {needed} points, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("quadrature spacing {spacing} exceeds h/10 = {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("mixed derivative of the phase vanishes near ({x}, {y})")]
    DegeneratePhase { x: f64, y: f64 },

    #[error("cutoff support comes within {distance} of the diagonal")]
    SupportTouchesDiagonal { distance: f64 },

    #[error("point {0} lies on the slit")]
    PointOnSlit(f64),

    #[error("frequency support is empty")]
    EmptySupport,

    #[error("regularity precondition failed: {0}")]
    RegularityPrecondition(String),

    #[error("step ratio {ratio} at step {step} is not below 1")]
    ContractionFailed { step: usize, ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
