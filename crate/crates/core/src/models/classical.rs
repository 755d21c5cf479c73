//! Classical probability baselines, the interference-corrected total
//! probability, and detectors for violations of classical bounds.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// `P(B) = P(B|A)P(A) + P(B|A')P(A')`.
pub fn classical_total_probability(p_a: f64, p_b_given_a: f64, p_b_given_not_a: f64) -> Result<f64> {
    check_probability("p_a", p_a)?;
    check_probability("p_b_given_a", p_b_given_a)?;
    check_probability("p_b_given_not_a", p_b_given_not_a)?;
    Ok(p_b_given_a * p_a + p_b_given_not_a * (1.0 - p_a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalProbabilityDecomposition {
    pub classical_part: f64,
    pub interference_part: f64,
    pub total: f64,
}

fn interference_amplitude(p_a: f64, p_b_given_a: f64, p_b_given_not_a: f64) -> f64 {
    2.0 * (p_b_given_a * p_a * p_b_given_not_a * (1.0 - p_a)).sqrt()
}

/// Classical total plus `2√(P(B|A)P(A)·P(B|A')P(A'))·cos θ`. Phases that push
/// the total outside [0, 1] are rejected rather than clamped.
pub fn quantum_total_probability(
    p_a: f64,
    p_b_given_a: f64,
    p_b_given_not_a: f64,
    theta: f64,
) -> Result<TotalProbabilityDecomposition> {
    let classical_part = classical_total_probability(p_a, p_b_given_a, p_b_given_not_a)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta".into()));
    }
    let interference_part = interference_amplitude(p_a, p_b_given_a, p_b_given_not_a) * theta.cos();
    let total = classical_part + interference_part;
    if !(0.0..=1.0).contains(&total) {
        return Err(Error::InfeasiblePhase(total));
    }
    Ok(TotalProbabilityDecomposition { classical_part, interference_part, total })
}

/// Closed-form θ ∈ [0, π] reproducing `target_total`.
pub fn solve_interference_phase(p_a: f64, p_b_given_a: f64, p_b_given_not_a: f64, target_total: f64) -> Result<f64> {
    let classical = classical_total_probability(p_a, p_b_given_a, p_b_given_not_a)?;
    check_probability("target_total", target_total)?;
    let amplitude = interference_amplitude(p_a, p_b_given_a, p_b_given_not_a);
    let gap = target_total - classical;
    if amplitude == 0.0 {
        // no interference term: only the classical total is reachable
        return if gap == 0.0 {
            Ok(std::f64::consts::FRAC_PI_2)
        } else {
            Err(Error::InfeasibleTarget { target: target_total, cosine: gap.signum() * f64::INFINITY })
        };
    }
    let cosine = gap / amplitude;
    if cosine.abs() > 1.0 + 1e-12 {
        return Err(Error::InfeasibleTarget { target: target_total, cosine });
    }
    Ok(cosine.clamp(-1.0, 1.0).acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violated: bool,
    pub bound_low: f64,
    pub bound_high: f64,
    pub observed: f64,
}

/// Sure-thing check: a rate under uncertainty must lie between the two
/// known-outcome rates.
pub fn stp_violation(p_known_1: f64, p_known_2: f64, p_unknown: f64) -> Result<ViolationReport> {
    check_probability("p_known_1", p_known_1)?;
    check_probability("p_known_2", p_known_2)?;
    check_probability("p_unknown", p_unknown)?;
    let (bound_low, bound_high) = (p_known_1.min(p_known_2), p_known_1.max(p_known_2));
    Ok(ViolationReport {
        violated: !(bound_low..=bound_high).contains(&p_unknown),
        bound_low,
        bound_high,
        observed: p_unknown,
    })
}

/// Fréchet bounds every classical joint `P(A ∧ B)` must satisfy.
pub fn boole_joint_bounds(p_a: f64, p_b: f64) -> Result<(f64, f64)> {
    check_probability("p_a", p_a)?;
    check_probability("p_b", p_b)?;
    // subtracting the complement keeps (1, p) -> (p, p) exact
    let low = (p_a - (1.0 - p_b)).max(0.0);
    Ok((low, p_a.min(p_b)))
}

/// True when a conjunction is judged more likely than one of its conjuncts.
pub fn conjunction_fallacy_check(p_conjunction: f64, p_a: f64, p_b: f64) -> Result<bool> {
    check_probability("p_conjunction", p_conjunction)?;
    check_probability("p_a", p_a)?;
    check_probability("p_b", p_b)?;
    Ok(p_conjunction > p_a.min(p_b))
}
