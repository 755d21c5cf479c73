//! Two-event disjunction model: event 1 (`q0`) feeds an interference kernel
//! and a conditional link into event 2 (`q1`).
//!
//! The known-outcome circuits swap a fresh ancilla in for event 1 (set to
//! the known answer) and a |0⟩ ancilla in for event 2, directly after the
//! kernel, so the conditional link sees a definite cause and a reset effect.

use crate::circuit::Circuit;
use crate::cognition::{
    conditional_component, event_component, interference_component, kernel_response, ConditionalLink, KernelVariant,
};
use crate::error::{check_probability, Result};
use crate::outcomes::Pattern;

pub const EVENT_1: &str = "q0";
pub const EVENT_2: &str = "q1";

#[derive(Debug, Clone, PartialEq)]
pub struct DisjunctionModel {
    prior: f64,
    given_yes: f64,
    given_no: f64,
    variant: KernelVariant,
    phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjunctionCircuits {
    pub unknown: Circuit,
    /// Event 1 known to have occurred.
    pub known_yes: Circuit,
    /// Event 1 known not to have occurred.
    pub known_no: Circuit,
}

impl DisjunctionModel {
    pub fn new(prior: f64, given_yes: f64, given_no: f64, variant: KernelVariant, phase: f64) -> Result<Self> {
        Ok(DisjunctionModel {
            prior: check_probability("prior", prior)?,
            given_yes: check_probability("p_effect_given_cause", given_yes)?,
            given_no: check_probability("p_effect_given_not_cause", given_no)?,
            variant,
            phase,
        })
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        DisjunctionModel { phase, ..self.clone() }
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    fn link(&self) -> ConditionalLink {
        ConditionalLink::new(EVENT_1, EVENT_2, self.given_yes, self.given_no)
    }

    /// Event prior, kernel, then the conditional link; both events measured.
    pub fn unknown_circuit(&self) -> Result<Circuit> {
        Circuit::builder()
            .fragment(event_component(EVENT_1, self.prior)?)
            .fragment(interference_component(self.variant, self.phase, EVENT_1, EVENT_2)?)
            .fragment(conditional_component(&self.link(), EVENT_1, EVENT_2)?)
            .measure(EVENT_1, "c0")
            .measure(EVENT_2, "c1")
            .build()
    }

    /// Circuit with event 1 fixed to `answer` (0 = occurred) after the kernel.
    pub fn known_circuit(&self, answer: u8) -> Result<Circuit> {
        // prior rotation + three kernel gates
        let after_kernel = 4;
        let unknown = self.unknown_circuit()?;
        let fixed = unknown.ancilla_swap_for_measurement(EVENT_1, answer, after_kernel)?;
        let shift = usize::from(answer == 1);
        fixed.ancilla_swap_for_measurement(EVENT_2, 0, after_kernel + 1 + shift)
    }

    pub fn circuits(&self) -> Result<DisjunctionCircuits> {
        Ok(DisjunctionCircuits {
            unknown: self.unknown_circuit()?,
            known_yes: self.known_circuit(0)?,
            known_no: self.known_circuit(1)?,
        })
    }

    /// Pattern selecting "event 2 occurred" in any of this model's circuits.
    pub fn event_2_pattern(circuit: &Circuit) -> Result<Pattern> {
        Pattern::single(circuit.measured_names().len(), circuit.register_position(EVENT_2)?, 0)
    }

    pub fn event_2_probability(circuit: &Circuit) -> Result<f64> {
        Ok(circuit.run_exact()?.probability(&Self::event_2_pattern(circuit)?))
    }

    /// Event 2 rate with event 1 unknown.
    pub fn unknown_rate(&self) -> Result<f64> {
        Self::event_2_probability(&self.unknown_circuit()?)
    }

    pub fn known_rate(&self, answer: u8) -> Result<f64> {
        Self::event_2_probability(&self.known_circuit(answer)?)
    }
}

/// Bare kernel with an uncertain source; the response is the target's `P(|1⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelModel {
    pub source_probability: f64,
    pub variant: KernelVariant,
}

impl KernelModel {
    pub fn new(source_probability: f64, variant: KernelVariant) -> Result<Self> {
        Ok(KernelModel { source_probability: check_probability("source_probability", source_probability)?, variant })
    }

    pub fn response(&self, phase: f64) -> f64 {
        kernel_response(self.variant, phase, self.source_probability)
    }
}
