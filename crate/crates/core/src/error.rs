use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("map is not hyperbolic")]
    NotHyperbolic,
    #[error("map fixes the origin; isometric circle undefined")]
    FixesOrigin,
    #[error("points coincide; no unique geodesic")]
    CoincidentPoints,
    #[error("point lies outside the open unit disk")]
    OutsideDisk,
    #[error("signature entry {0} is below 2")]
    InvalidOrder(u32),
    #[error("signature {signature:?} rejected: {reason}")]
    SignatureRejected { signature: [u32; 3], reason: String },
    #[error("domain placement failed: {0}")]
    PlacementFailure(String),
    #[error("vertex {vertex}: fan has {found} geodesics, expected {expected}")]
    FanCountMismatch {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("net gluing failure: {0}")]
    GluingFailure(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("alpha = {0} lies in no overlap interval")]
    AlphaOutsideOverlap(f64),
    #[error("precision exhausted at orbit step {step} (distance to boundary {distance:e}, error bound {bound:e})")]
    PrecisionExhausted {
        step: usize,
        distance: f64,
        bound: f64,
    },
    #[error("no fixed point of the word lies in an overlap interval")]
    NoFixedPointInOverlap,
    #[error("both fixed points lie in overlap intervals ({0:?}); choose one with a selection flag")]
    AmbiguousAlpha([usize; 2]),
    #[error("cell {cell}: image endpoint {endpoint} is not in the partition endpoint set")]
    NotMarkovCell { cell: usize, endpoint: f64 },
    #[error("invalid group word: {0}")]
    InvalidWord(String),
    #[error("internal consistency violation: {0}")]
    Consistency(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
