use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("weights sum to {0}, expected 1")]
    WeightsNotNormalized(f64),

    #[error("basis is not orthonormal: {0}")]
    NotOrthonormal(String),

    #[error("dimension {dim} is not supported by model `{model}`")]
    UnsupportedDim { model: String, dim: usize },

    #[error("engine `{engine}` cannot integrate {what}")]
    EngineNotApplicable { engine: String, what: String },

    #[error("overlap fraction undefined: states are orthogonal")]
    OrthogonalPair,

    #[error("preparation contexts realize different density operators (distance {0:.3e})")]
    ContextStateMismatch(f64),

    #[error("state is not part of this model: {0}")]
    UnknownPreparation(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("rays {first} and {second} are parallel")]
    ParallelRays { first: usize, second: usize },

    #[error("linear program is malformed: {0}")]
    MalformedLp(String),

    #[error("no atoms: the fragment admits no noncontextual deterministic assignment")]
    EmptyAtomSet,

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("model `{0}` is catalogued but not implemented")]
    NotImplemented(String),

    #[error("invalid engine spec `{0}`")]
    BadEngineSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
