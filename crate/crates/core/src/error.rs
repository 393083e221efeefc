use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {op} on {lhs:?} and {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("subspaces are not transversal")]
    NotTransversal,
    #[error("function evaluation failed at probe point: {0}")]
    EvaluationFailed(String),
    #[error("bad site indices ({i}, {j}) for a tuple of length {len}")]
    BadIndex { i: usize, j: usize, len: usize },
    #[error("map undefined in factor R_{{{i},{j}}}: {reason}")]
    MapUndefined { i: usize, j: usize, reason: String },
    #[error("parameter collision: {0}")]
    ParamCollision(String),
    #[error("degenerate pairing <p,q> = 0")]
    DegeneratePairing,
    #[error("singular denominator x + y = 0")]
    SingularDenominator,
    #[error("period {0} is even; the f-coordinate bracket needs an odd period >= 3")]
    EvenPeriod(usize),
    #[error("integration step {step} rejected at t = {t}: state norm {norm:e} exceeds guard")]
    StepRejected { step: usize, t: f64, norm: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
