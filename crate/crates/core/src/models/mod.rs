//! Scenario models and their classical baselines.

pub mod classical;
pub mod disjunction;
pub mod order;

pub use classical::{
    boole_joint_bounds, classical_total_probability, conjunction_fallacy_check, quantum_total_probability,
    solve_interference_phase, stp_violation, TotalProbabilityDecomposition, ViolationReport,
};
pub use disjunction::{DisjunctionCircuits, DisjunctionModel, KernelModel};
pub use order::{OrderCircuits, OrderEffectModel};
