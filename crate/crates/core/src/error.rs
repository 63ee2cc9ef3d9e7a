use thiserror::Error;

/// Errors raised by library operations, grouped so that callers can map them
/// onto coarse exit classes (config / precondition / resource cap / internal).
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown generator name `{0}`")]
    UnknownGenerator(String),

    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("word is not geodesic: `{word}` has length {length} at letter count {letters}")]
    NotGeodesic {
        word: String,
        length: u32,
        letters: u32,
    },

    #[error("ray verified only to horizon {verified}, but horizon {required} is required")]
    HorizonTooShort { verified: u32, required: u32 },

    #[error("ray is finite with {available} letters; t={requested} is not evaluable")]
    RayExhausted { available: u32, requested: u32 },

    #[error("ball of radius {radius} exceeds the vertex cap {cap} (seen {seen} vertices)")]
    SizeCap { radius: u32, cap: usize, seen: usize },

    #[error("vertex not contained in ball: {0}")]
    NotInBall(String),

    #[error("a geodesic from `{from}` to `{to}` exits the ball at `{exit}`")]
    Containment {
        from: String,
        to: String,
        exit: String,
    },

    #[error("projection target set is empty")]
    EmptyTarget,

    #[error("empty family: {0}")]
    EmptyFamily(String),

    #[error("margin {margin} leaves no checkable vertices in a ball of radius {radius}")]
    MarginTooLarge { margin: u32, radius: u32 },

    #[error("Busemann values failed to stabilize by t={t_max} for {count} vertices (first: `{first}`)")]
    Stabilization { t_max: u32, count: usize, first: String },

    #[error("field is not 1-Lipschitz: {violations} violating edges (first: `{first}`)")]
    NotLipschitz { violations: usize, first: String },

    #[error("derivative field does not integrate: inconsistent around edge `{edge}`")]
    IntegrationCycle { edge: String },

    #[error("shift by `{0}` has empty overlap with the ball")]
    EmptyOverlap(String),

    #[error("rays are not distinct within the verified window")]
    RaysNotDistinct,

    #[error("horizon {horizon} exceeds the usable radius {radius}")]
    HorizonExceedsRadius { horizon: u32, radius: u32 },

    #[error("no valid disjoint sample balls: {0}")]
    NoValidSamples(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal invariant breach: {0}")]
    Invariant(String),
}

/// Coarse classification used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Precondition,
    ResourceCap,
    Invariant,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Config(_) | InvalidSpec(_) | Json(_) => ErrorClass::Config,
            SizeCap { .. } => ErrorClass::ResourceCap,
            Invariant(_) => ErrorClass::Invariant,
            _ => ErrorClass::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
