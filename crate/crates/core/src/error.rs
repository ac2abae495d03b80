use thiserror::Error;

/// Errors raised by tower construction, element arithmetic, maps and verifiers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("minimal polynomial of `{generator}` has a root {root} in the preceding field")]
    RationalRootFound { generator: String, root: String },

    #[error("a tower may contain at most one transcendental generator")]
    MultipleTranscendentals,

    #[error("the transcendental generator `{0}` must be the first generator of the tower")]
    TranscendentalNotFirst(String),

    #[error("generator name `{0}` is declared twice")]
    DuplicateName(String),

    #[error("irreducibility of the minimal polynomial of `{0}` cannot be certified; declare it with assume_irreducible")]
    UncertifiedIrreducibility(String),

    #[error("invalid minimal polynomial for `{generator}`: {reason}")]
    InvalidMinPoly { generator: String, reason: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("elements belong to different towers")]
    TowerMismatch,

    #[error("pole hit: {0}")]
    PoleHit(String),

    #[error("matrix ({0}) has zero determinant")]
    NonInvertible(String),

    #[error("zero divisor encountered while inverting modulo the minimal polynomial of `{0}`; the assumed irreducibility is false")]
    ZeroDivisor(String),

    #[error("p'(g) vanishes for generator `{0}`")]
    InseparableGenerator(String),

    #[error("no image supplied for transcendental generator `{0}`")]
    MissingImage(String),

    #[error("the image of `{0}` is forced by its minimal polynomial and cannot be supplied")]
    ForcedImage(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("basis elements are Q-linearly dependent")]
    DependentBasis,

    #[error("length mismatch: {left} basis elements but {right} images")]
    LengthMismatch { left: usize, right: usize },

    #[error("{0} is outside the domain of the map")]
    OutOfDomain(String),

    #[error("difference quotient depends on the base point: {at_first} at {first} but {at_other} at {other}")]
    BasePointDependence {
        first: String,
        at_first: String,
        other: String,
        at_other: String,
    },

    #[error("function is not a polynomial function of degree at most {degree}: {detail}")]
    DegreeExceeded { degree: usize, detail: String },

    #[error("arity error: {0}")]
    ArityError(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
