use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by -inf in max-plus arithmetic")]
    InfiniteOperand,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("expected family {expected}, got {found}")]
    WrongFamily { expected: String, found: String },
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("coordinate {0} is zero")]
    ZeroCoordinate(usize),
    #[error("scaling factor is zero")]
    ZeroScale,
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("singular input: {0} vanishes")]
    SingularInput(String),
    #[error("map is not invertible at this point")]
    SingularInversion,
    #[error("image leaves the reduced subvariety")]
    ReductionViolated,
    #[error("level mismatch between the two inputs")]
    LevelMismatch,
    #[error("linear system is singular")]
    SingularSystem,
    #[error("input is not generic: {0}")]
    NonGenericInput(String),
    #[error("inconsistent system: {0}")]
    InconsistentSystem(String),
    #[error("zero input: {0}")]
    ZeroInput(String),
    #[error("data does not solve the bilinear equations: {0}")]
    NotASolution(String),
    #[error("time variable has a pole at momentum {0}")]
    PoleAtMomentum(String),
    #[error("coincident momenta make a coupling denominator vanish")]
    DeltaPole,
    #[error("no rational partner momentum for {0}")]
    NoRationalPartner(String),
    #[error("root finding failed: {0}")]
    RootFindFailure(String),
    #[error("reduction polynomial vanishes at {0}")]
    PoleInA(String),
    #[error("odd time variable expected")]
    OddnessViolation,
    #[error("limit is undefined: {0}")]
    LimitUndefined(String),
    #[error("value has a nonzero imaginary part: {0}")]
    ComplexValue(String),
    #[error("non-finite input: {0}")]
    NonFiniteInput(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
