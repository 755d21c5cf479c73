pub mod circuit;
pub mod cognition;
pub mod error;
pub mod fit;
pub mod models;
pub mod outcomes;
pub mod report;
pub mod scenario;
pub mod statevector;
pub mod verify;

pub use circuit::{Circuit, Fragment, Gate, Instruction, Measurement};
pub use error::{Error, Result};
pub use outcomes::{ConditionalRatioQuery, Distribution, Histogram, Pattern};
pub use statevector::{Amplitude, GateMatrix, StateVector};
