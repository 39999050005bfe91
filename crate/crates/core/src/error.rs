use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("operator is not an effect: eigenvalues ({min}, {max}) leave [0, 1]")]
    NotAnEffect { min: f64, max: f64 },
    #[error("operator is not a projector (max |P^2 - P| = {0:e})")]
    NotProjector(f64),
    #[error("operator is not a density operator: {0}")]
    NotDensity(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigensolver failed to converge")]
    ConvergenceFailure,
    #[error("effects do not sum to the identity (max deviation {0:e})")]
    IncompleteMeasurement(f64),
    #[error("invalid mixture weights: {0}")]
    WeightError(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("axis is not a unit vector (norm {0})")]
    NotUnitVector(f64),
    #[error("unsupported dimension {0}: only qubits (d = 2) are supported here")]
    UnsupportedDimension(usize),
    #[error("frame function has no value for {0}")]
    MissingValue(String),
    #[error("constraint system is inconsistent (residual {0:e})")]
    InconsistentSystem(f64),
    #[error("effects span only {rank} of {needed} dimensions")]
    RankDeficient { rank: usize, needed: usize },
    #[error("projectors #{0} and #{1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
