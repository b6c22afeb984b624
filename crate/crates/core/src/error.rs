use thiserror::Error;

/// Errors shared across the symbolic and numeric layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate systems differ: [{0}] vs [{1}]")]
    CoordMismatch(String, String),

    #[error("form degrees incompatible: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("interior product of a degree-0 form is undefined")]
    InteriorOnScalar,

    #[error("evaluation at e = 0 with negative powers of e present")]
    EpsZero,

    #[error("defining polynomial is not unit-monic in a power of `{0}`")]
    NotReducible(String),

    #[error("polynomial division is not exact")]
    InexactDivision,

    #[error("degenerate contact form: top coefficient of beta^(dbeta)^n is zero")]
    DegenerateContact,

    #[error("point is not a tangency: dF and beta are not proportional there")]
    NotATangency,

    #[error("tangency record is missing classification data")]
    UnclassifiedRecord,

    #[error("coordinate `{0}` must not appear here")]
    ForbiddenCoordinate(String),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("dimension parameter must satisfy n >= 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("rotational reduction failed: {0}")]
    ReductionFailed(String),

    #[error("expected {expected} singular points, found {found}")]
    ZeroCount { expected: usize, found: usize },

    #[error("field vanishes on the sampling circle")]
    FieldVanishesOnCircle,

    #[error("Jacobian is too close to degenerate for eigenvalue classification")]
    DegenerateJacobian,

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("invalid rational literal `{0}`")]
    BadRational(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}
