//! Reusable cognitive circuit components and the sequential-projection
//! ("and then") calculus they implement.
//!
//! Outcome encoding throughout: |0⟩ means the event occurs.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Fragment, Gate, Instruction};
use crate::error::{check_probability, Error, Result};

/// Grid spacing of stored kernel response curves.
pub const CURVE_STEP: f64 = 1e-3;

/// Angle θ ∈ [0, π/2] of the probability rotation with `cos²θ = p`.
pub fn event_angle(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(p.sqrt().acos())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSpec {
    pub name: String,
    /// Marginal probability; absent for events whose rate comes from links.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
}

impl EventSpec {
    pub fn new(name: &str, probability: f64) -> Self {
        EventSpec { name: name.to_string(), probability: Some(probability) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalLink {
    pub cause: String,
    pub effect: String,
    pub p_effect_given_cause: f64,
    pub p_effect_given_not_cause: f64,
}

impl ConditionalLink {
    pub fn new(cause: &str, effect: &str, given_cause: f64, given_not_cause: f64) -> Self {
        ConditionalLink {
            cause: cause.to_string(),
            effect: effect.to_string(),
            p_effect_given_cause: given_cause,
            p_effect_given_not_cause: given_not_cause,
        }
    }
}

/// One qubit with a single probability rotation: `P(|0⟩) = probability`.
pub fn event_component(qubit: &str, probability: f64) -> Result<Fragment> {
    let theta = event_angle(probability)?;
    Ok(Fragment { qubits: vec![qubit.to_string()], instructions: vec![Instruction::single(Gate::Rot(theta), qubit)] })
}

/// Two controlled probability rotations on `effect_qubit`: control value 0
/// (cause occurred) sets `P(effect | cause)`, control value 1 sets
/// `P(effect | not cause)`. The cause qubit must already be declared by the
/// circuit the fragment is added to.
pub fn conditional_component(link: &ConditionalLink, cause_qubit: &str, effect_qubit: &str) -> Result<Fragment> {
    if cause_qubit == effect_qubit {
        return Err(Error::DuplicateQubit(cause_qubit.to_string()));
    }
    let given = event_angle(check_probability("p_effect_given_cause", link.p_effect_given_cause)?)?;
    let given_not = event_angle(check_probability("p_effect_given_not_cause", link.p_effect_given_not_cause)?)?;
    Ok(Fragment {
        qubits: vec![effect_qubit.to_string()],
        instructions: vec![
            Instruction::controlled(Gate::Rot(given), cause_qubit, 0, effect_qubit),
            Instruction::controlled(Gate::Rot(given_not), cause_qubit, 1, effect_qubit),
        ],
    })
}

/// Single-qubit gates placed before and after the controlled phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelVariant {
    HadamardHadamard,
    HadamardRx,
    RxHadamard,
    RxRx,
}

impl KernelVariant {
    pub const ALL: [KernelVariant; 4] =
        [KernelVariant::HadamardHadamard, KernelVariant::HadamardRx, KernelVariant::RxHadamard, KernelVariant::RxRx];

    pub fn pre_gate(self) -> Gate {
        match self {
            KernelVariant::HadamardHadamard | KernelVariant::HadamardRx => Gate::H,
            KernelVariant::RxHadamard | KernelVariant::RxRx => Gate::Rx(FRAC_PI_2),
        }
    }

    pub fn post_gate(self) -> Gate {
        match self {
            KernelVariant::HadamardHadamard | KernelVariant::RxHadamard => Gate::H,
            KernelVariant::HadamardRx | KernelVariant::RxRx => Gate::Rx(FRAC_PI_2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelVariant::HadamardHadamard => "hadamard_hadamard",
            KernelVariant::HadamardRx => "hadamard_rx",
            KernelVariant::RxHadamard => "rx_hadamard",
            KernelVariant::RxRx => "rx_rx",
        }
    }

    /// Target `P(|1⟩)` over `[0, 2π)` with the source in an equal superposition,
    /// sampled every [`CURVE_STEP`] radians. Computed once per variant.
    pub fn response_curve(self) -> &'static ResponseCurve {
        static CURVES: [OnceLock<ResponseCurve>; 4] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        let slot = KernelVariant::ALL.iter().position(|v| *v == self).expect("listed variant");
        CURVES[slot].get_or_init(|| ResponseCurve::sweep(|phi| kernel_response(self, phi, 0.5)))
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelVariant::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| Error::UnknownVariant(s.to_string()))
    }
}

/// Exact sweep of a phase response.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub values: Vec<f64>,
    pub step: f64,
    /// `P(φ) = P(2π − φ)` on the grid within 1e-10.
    pub even: bool,
}

impl ResponseCurve {
    pub fn sweep(f: impl Fn(f64) -> f64) -> Self {
        let n = (TAU / CURVE_STEP).ceil() as usize;
        let values: Vec<f64> = (0..n).map(|i| f(i as f64 * CURVE_STEP)).collect();
        let even = (1..n).all(|i| (f(i as f64 * CURVE_STEP) - f(TAU - i as f64 * CURVE_STEP)).abs() < 1e-10);
        ResponseCurve { values, step: CURVE_STEP, even }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceKernel {
    pub variant: KernelVariant,
    /// Phase φ in radians; absent until fitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
}

impl InterferenceKernel {
    pub fn new(variant: KernelVariant, phase: f64) -> Self {
        InterferenceKernel { variant, phase: Some(phase) }
    }
}

/// `pre(target) · controlled-Rz(φ)[source = 1](target) · post(target)`.
pub fn interference_component(variant: KernelVariant, phase: f64, source: &str, target: &str) -> Result<Fragment> {
    if source == target {
        return Err(Error::DuplicateQubit(source.to_string()));
    }
    if !phase.is_finite() {
        return Err(Error::NonFinite("kernel phase".into()));
    }
    Ok(Fragment {
        qubits: vec![target.to_string()],
        instructions: vec![
            Instruction::single(variant.pre_gate(), target),
            Instruction::controlled(Gate::Rz(phase), source, 1, target),
            Instruction::single(variant.post_gate(), target),
        ],
    })
}

/// Target `P(|1⟩)` after the kernel when the source has `P(|0⟩) = source_probability`.
pub fn kernel_response(variant: KernelVariant, phase: f64, source_probability: f64) -> f64 {
    kernel_circuit(variant, phase, source_probability)
        .and_then(|c| c.run_exact())
        .map(|d| d.get("1"))
        .expect("kernel circuit is well-formed")
}

/// Source `q0` prepared with `P(|0⟩) = source_probability`, kernel onto `q1`, `q1` measured.
pub fn kernel_circuit(variant: KernelVariant, phase: f64, source_probability: f64) -> Result<Circuit> {
    Circuit::builder()
        .fragment(event_component("q0", source_probability)?)
        .fragment(interference_component(variant, phase, "q0", "q1")?)
        .measure("q1", "c0")
        .build()
}

/// Controlled swap of `a` and `b`, active when `control` is |1⟩.
pub fn bias_activation_component(control: &str, a: &str, b: &str) -> Result<Fragment> {
    if control == a || control == b || a == b {
        return Err(Error::DuplicateQubit(if a == b { a } else { control }.to_string()));
    }
    Ok(Fragment {
        qubits: vec![control.to_string(), a.to_string(), b.to_string()],
        instructions: vec![Instruction::controlled_swap(control, 1, a, b)],
    })
}

/// A ray on the Bloch sphere written as `cos θ|0⟩ + e^{iφ} sin θ|1⟩`, so that
/// `θ` is the probability angle (`|⟨0|d⟩|² = cos²θ`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDirection {
    theta: f64,
    phi: f64,
}

impl QubitDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
            return Err(Error::Angle { name: "theta".into(), value: theta, low: 0.0, high: PI });
        }
        if !(phi.is_finite() && (0.0..TAU).contains(&phi)) {
            return Err(Error::Angle { name: "phi".into(), value: phi, low: 0.0, high: TAU });
        }
        Ok(QubitDirection { theta, phi })
    }

    /// Like [`QubitDirection::new`] but wraps `phi` into `[0, 2π)`.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self::new(theta, phi)
    }

    /// |0⟩.
    pub fn pole() -> Self {
        QubitDirection { theta: 0.0, phi: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn ket(&self) -> [Complex64; 2] {
        let (s, c) = self.theta.sin_cos();
        [Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi)]
    }

    /// The ray orthogonal to this one ("answer no").
    pub fn orthogonal(&self) -> Self {
        if self.theta <= FRAC_PI_2 {
            let phi = (self.phi + PI).rem_euclid(TAU);
            QubitDirection { theta: FRAC_PI_2 - self.theta, phi: if phi >= TAU { 0.0 } else { phi } }
        } else {
            QubitDirection { theta: self.theta - FRAC_PI_2, phi: self.phi }
        }
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &QubitDirection) -> f64 {
        let [a0, a1] = self.ket();
        let [b0, b1] = other.ket();
        (a0.conj() * b0 + a1.conj() * b1).norm_sqr()
    }
}

/// Probability of projecting `initial` onto `first`, then onto `second`.
pub fn and_then(initial: &QubitDirection, first: &QubitDirection, second: &QubitDirection) -> f64 {
    second.overlap(first) * first.overlap(initial)
}

/// `[P(Ay→Bn) + P(An→By)] − [P(By→An) + P(Bn→Ay)]`; identically zero for a qubit.
pub fn qq_discrepancy(initial: &QubitDirection, a: &QubitDirection, b: &QubitDirection) -> f64 {
    let (an, bn) = (a.orthogonal(), b.orthogonal());
    (and_then(initial, a, &bn) + and_then(initial, &an, b)) - (and_then(initial, b, &an) + and_then(initial, &bn, a))
}
