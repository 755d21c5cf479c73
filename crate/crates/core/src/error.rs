use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the simulator, circuit layer, models and fitter.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit operands must be pairwise distinct, got {0:?}")]
    DuplicateOperand(Vec<usize>),

    #[error("register must have at least one qubit")]
    EmptyRegister,

    #[error("amplitude count {len} is not 2^{num_qubits}")]
    AmplitudeCount { len: usize, num_qubits: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("gate matrix is not unitary (max deviation {0:e})")]
    NonUnitary(f64),

    #[error("gate matrix must be 2x2 or 4x4, got {0} entries")]
    GateDimension(usize),

    #[error("control value must be 0 or 1, got {0}")]
    ControlValue(u8),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("unknown qubit `{0}`")]
    UnknownQubit(String),

    #[error("qubit `{0}` declared twice")]
    DuplicateQubit(String),

    #[error("insertion point {at} is past the end of a {len}-instruction circuit")]
    InsertionPoint { at: usize, len: usize },

    #[error("malformed pattern `{pattern}` for a {width}-qubit register")]
    Pattern { pattern: String, width: usize },

    #[error("numerator pattern `{numerator}` does not refine condition `{condition}`")]
    PatternRefinement { numerator: String, condition: String },

    #[error("conditional is undefined: no counts match condition `{0}`")]
    UndefinedConditional(String),

    #[error("probability {name} = {value} is outside [0, 1]")]
    Probability { name: String, value: f64 },

    #[error("angle {name} = {value} is outside [{low}, {high}]")]
    Angle { name: String, value: f64, low: f64, high: f64 },

    #[error("phase is infeasible: total probability {0} is outside [0, 1]")]
    InfeasiblePhase(f64),

    #[error("target {target} is infeasible: cos(theta) would be {cosine}")]
    InfeasibleTarget { target: f64, cosine: f64 },

    #[error("target {target} is unattainable; attainable range is [{min}, {max}]")]
    Unattainable { target: f64, min: f64, max: f64 },

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("unknown kernel variant `{0}`")]
    UnknownVariant(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scenario field `{path}`: {message}")]
    Scenario { path: String, message: String },

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn scenario(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario { path: path.into(), message: message.into() }
    }
}

/// Rejects probabilities outside the closed unit interval.
pub fn check_probability(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Probability { name: name.to_string(), value })
    }
}
