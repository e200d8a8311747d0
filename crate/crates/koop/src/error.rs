//! Shared error type for the numerical laboratory.

use thiserror::Error;

/// Everything that can go wrong while building spaces, applying flows or
/// running a verification routine.
#[derive(Debug, Error)]
pub enum KoopError {
    /// Circle grids below eight points cannot resolve anything useful.
    #[error("grid size {n} too small: need at least 8 points")]
    GridTooSmall { n: usize },

    /// A declared band limit that the grid cannot represent: 2K + 1 <= N.
    #[error("band exceeds Nyquist: band limit {k} needs 2K+1 <= N but N = {n}")]
    BandExceedsNyquist { k: usize, n: usize },

    /// Two functions that were expected to live on the same space do not.
    #[error("functions live on different spaces")]
    SpaceMismatch,

    /// A sample came out NaN or infinite.
    #[error("non-finite sample encountered")]
    NonFiniteSample,

    /// A pointwise product whose certified bands overflow the grid; the
    /// caller asked for an alias-free guarantee that cannot be given.
    #[error("aliased product: band hints sum to {sum} but grid size {n} only certifies {cap}")]
    AliasedProduct { sum: usize, cap: usize, n: usize },

    /// Dense operator routines are guarded against accidentally huge grids.
    #[error("dense operator guard: size {size} exceeds limit {limit}")]
    SizeGuard { size: usize, limit: usize },

    /// The group kind has no closed-form generator action.
    #[error("exact generator unavailable: {reason}")]
    ExactGeneratorUnavailable { reason: String },

    /// A transfer function or weight that must stay away from zero does not.
    #[error("function vanishes (or nearly so): min |value| = {min_abs:.3e}")]
    VanishingValue { min_abs: f64 },

    /// A probe list that cannot support the requested fit or estimate.
    #[error("degenerate probe: {reason}")]
    DegenerateProbe { reason: String },

    /// A suspension roof dipping below its declared floor.
    #[error("roof must stay above its floor: min roof {min_roof} vs floor {floor}")]
    RoofBelowFloor { min_roof: f64, floor: f64 },

    /// Anything else that is a plain misuse of an interface.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Serialization(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KoopError>;
